#include "tropgw/gwengine.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>

namespace tropgw {

namespace {

IntVec ivec(std::initializer_list<long> xs) {
  IntVec v(static_cast<Eigen::Index>(xs.size()));
  int i = 0;
  for (long x : xs) v(i++) = x;
  return v;
}

RatMat ray_rows(const std::vector<IntVec>& rays, const std::vector<int>& idx) {
  RatMat m(static_cast<Eigen::Index>(idx.size()), rays[0].size());
  for (size_t i = 0; i < idx.size(); ++i)
    for (Eigen::Index j = 0; j < rays[idx[i]].size(); ++j) m(i, j) = Rat(rays[idx[i]](j));
  return m;
}

WeightedComplex one_cycle(int r, const std::vector<IntVec>& rays,
                          const std::vector<std::pair<int, Int>>& ray_weights) {
  std::vector<Polyhedron> cells;
  std::vector<Int> weights;
  for (const auto& [i, w] : ray_weights) {
    if (w == 0) continue;
    cells.push_back(Polyhedron::cone_from_rays(r, ray_rows(rays, {i}), RatMat(0, r)));
    weights.push_back(w);
  }
  return WeightedComplex::from_facets(r, 1, cells, weights);
}

WeightedComplex origin_cycle(int r) {
  RatVec z(r);
  for (int i = 0; i < r; ++i) z(i) = 0;
  return WeightedComplex::from_facets(r, 0, {Polyhedron::point(z)}, {Int(1)});
}

RatMat invert(const RatMat& a) {
  const Eigen::Index n = a.rows();
  RatMat work = a;
  RatMat inv(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) inv(i, j) = (i == j) ? 1 : 0;
  for (Eigen::Index c = 0; c < n; ++c) {
    Eigen::Index piv = -1;
    for (Eigen::Index i = c; i < n; ++i)
      if (work(i, c) != 0) {
        piv = i;
        break;
      }
    if (piv < 0) throw std::runtime_error("pairing matrix is singular");
    work.row(c).swap(work.row(piv));
    inv.row(c).swap(inv.row(piv));
    Rat d = work(c, c);
    for (Eigen::Index j = 0; j < n; ++j) {
      work(c, j) /= d;
      work(c, j).canonicalize();
      inv(c, j) /= d;
      inv(c, j).canonicalize();
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i == c || work(i, c) == 0) continue;
      Rat f = work(i, c);
      for (Eigen::Index j = 0; j < n; ++j) {
        work(i, j) -= f * work(c, j);
        work(i, j).canonicalize();
        inv(i, j) -= f * inv(c, j);
        inv(i, j).canonicalize();
      }
    }
  }
  return inv;
}

std::string dir_string(const IntVec& v) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += v(i).get_str();
  }
  return s + ")";
}

// weight of the cycle on each ray of the model, by matching primitive rays
IntVec ray_weights_of(const SurfaceModel& m, const WeightedComplex& c) {
  IntVec w(static_cast<Eigen::Index>(m.rays.size()));
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = 0;
  for (int f = 0; f < c.facet_count(); ++f) {
    RatVec ray = c.facet(f).rays().row(0).transpose();
    IntVec prim = primitive_scale(ray);
    int idx = m.ray_index(prim);
    if (idx < 0) throw std::invalid_argument("cycle not directional for the model");
    w(idx) += c.weight(f);
  }
  return w;
}

// coefficients of the degree fan over the model basis
IntVec degree_class(const SurfaceModel& m, const std::vector<IntVec>& dirs) {
  IntVec coeffs(m.m() + 1);
  for (Eigen::Index i = 0; i < coeffs.size(); ++i) coeffs(i) = 0;
  if (dirs.empty()) return coeffs;
  if (m.r == 1) {
    Int d = 0;
    for (const auto& v : dirs)
      if (v(0) > 0) d += v(0);
    coeffs(m.m()) = d;
    return coeffs;
  }
  IntVec w(static_cast<Eigen::Index>(m.rays.size()));
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = 0;
  for (const auto& v : dirs) {
    int idx = m.ray_index(primitive_scale(to_rat(v)));
    if (idx < 0) throw std::invalid_argument("degree direction " + dir_string(v) +
                                             " is not on a ray of the model fan");
    w(idx) += content(v);
  }
  std::vector<int> mid;
  for (int e = 0; e <= m.m(); ++e)
    if (m.basis_dim[e] == 1) mid.push_back(e);
  RatMat sys(w.size(), static_cast<Eigen::Index>(mid.size()));
  for (size_t j = 0; j < mid.size(); ++j) {
    IntVec bw = ray_weights_of(m, m.basis[mid[j]]);
    for (Eigen::Index i = 0; i < w.size(); ++i) sys(i, static_cast<Eigen::Index>(j)) = Rat(bw(i));
  }
  auto sol = solve_consistent(sys, to_rat(w));
  if (!sol) throw std::runtime_error("degree class not in the basis span");
  for (size_t j = 0; j < mid.size(); ++j) {
    Rat q = (*sol)(static_cast<Eigen::Index>(j));
    q.canonicalize();
    if (q.get_den() != 1) throw std::runtime_error("degree class not integral over the basis");
    coeffs(mid[j]) = q.get_num();
  }
  return coeffs;
}

bool strictly_inside_cone(const IntVec& rho, const IntVec& v1, const IntVec& v2) {
  Rat det = Rat(v1(0)) * Rat(v2(1)) - Rat(v1(1)) * Rat(v2(0));
  if (det == 0) return false;
  Rat a = (Rat(rho(0)) * Rat(v2(1)) - Rat(rho(1)) * Rat(v2(0))) / det;
  Rat b = (Rat(v1(0)) * Rat(rho(1)) - Rat(v1(1)) * Rat(rho(0))) / det;
  a.canonicalize();
  b.canonicalize();
  return a > 0 && b > 0;
}

std::vector<IntVec> distinct_primitive_dirs(const std::vector<IntVec>& dirs) {
  std::vector<IntVec> out;
  for (const auto& v : dirs) {
    IntVec p = primitive_scale(to_rat(v));
    bool seen = false;
    for (const auto& q : out)
      if (q == p) seen = true;
    if (!seen) out.push_back(p);
  }
  return out;
}

std::vector<IntVec> class_rays(const SurfaceModel& m, const IntVec& coeffs) {
  WeightedComplex c = m.materialize(coeffs);
  std::vector<IntVec> out;
  for (int f = 0; f < c.facet_count(); ++f)
    out.push_back(primitive_scale(RatVec(c.facet(f).rays().row(0).transpose())));
  return out;
}

}  // namespace

ModelName model_from_string(const std::string& s) {
  if (s == "P1xKstar") return ModelName::P1xKstar;
  if (s == "P2") return ModelName::P2;
  if (s == "P1xP1") return ModelName::P1xP1;
  if (s == "F1") return ModelName::F1;
  if (s == "Bl2P2") return ModelName::Bl2P2;
  if (s == "Bl3P2") return ModelName::Bl3P2;
  if (s == "R1") return ModelName::R1;
  throw std::invalid_argument("unknown model: " + s);
}

std::string model_to_string(ModelName m) {
  switch (m) {
    case ModelName::P1xKstar: return "P1xKstar";
    case ModelName::P2: return "P2";
    case ModelName::P1xP1: return "P1xP1";
    case ModelName::F1: return "F1";
    case ModelName::Bl2P2: return "Bl2P2";
    case ModelName::Bl3P2: return "Bl3P2";
    case ModelName::R1: return "R1";
  }
  throw std::invalid_argument("unknown model");
}

int SurfaceModel::dim_of_class(const IntVec& coeffs) const {
  int d = -1;
  for (Eigen::Index e = 0; e < coeffs.size(); ++e) {
    if (coeffs(e) == 0) continue;
    if (d < 0)
      d = basis_dim[static_cast<size_t>(e)];
    else if (d != basis_dim[static_cast<size_t>(e)])
      throw std::invalid_argument("inhomogeneous condition class");
  }
  if (d < 0) throw std::invalid_argument("zero condition class");
  return d;
}

int SurfaceModel::codim_of_class(const IntVec& coeffs) const { return r - dim_of_class(coeffs); }

Rat SurfaceModel::pairing(const IntVec& x, const IntVec& y) const {
  Rat s = 0;
  for (Eigen::Index e = 0; e < x.size(); ++e) {
    if (x(e) == 0) continue;
    for (Eigen::Index f = 0; f < y.size(); ++f) {
      if (y(f) == 0) continue;
      s += Rat(x(e)) * alpha(e, f) * Rat(y(f));
    }
  }
  s.canonicalize();
  return s;
}

IntVec SurfaceModel::class_product(const IntVec& x, const IntVec& y) const {
  IntVec zero = zero_class();
  bool xz = true, yz = true;
  for (Eigen::Index e = 0; e < x.size(); ++e)
    if (x(e) != 0) xz = false;
  for (Eigen::Index e = 0; e < y.size(); ++e)
    if (y(e) != 0) yz = false;
  if (xz || yz) return zero;
  int cx = codim_of_class(x), cy = codim_of_class(y);
  if (cx == 0) {
    IntVec out = y;
    for (Eigen::Index e = 0; e < out.size(); ++e) out(e) *= x(m());
    return out;
  }
  if (cy == 0) {
    IntVec out = x;
    for (Eigen::Index e = 0; e < out.size(); ++e) out(e) *= y(m());
    return out;
  }
  if (cx + cy > r) return zero;
  Rat p = pairing(x, y);
  if (p.get_den() != 1) throw std::runtime_error("non-integer class pairing");
  IntVec out = zero;
  out(0) = p.get_num();
  return out;
}

IntVec SurfaceModel::zero_class() const {
  IntVec v(m() + 1);
  for (Eigen::Index e = 0; e < v.size(); ++e) v(e) = 0;
  return v;
}

IntVec SurfaceModel::unit_class(int e) const {
  IntVec v = zero_class();
  v(e) = 1;
  return v;
}

WeightedComplex SurfaceModel::materialize(const IntVec& coeffs) const {
  if (dim_of_class(coeffs) != 1) throw std::invalid_argument("materialize needs a curve class");
  IntVec w(static_cast<Eigen::Index>(rays.size()));
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = 0;
  for (int e = 0; e <= m(); ++e) {
    if (coeffs(e) == 0 || basis_dim[e] != 1) continue;
    IntVec bw = ray_weights_of(*this, basis[e]);
    for (Eigen::Index i = 0; i < w.size(); ++i) w(i) += coeffs(e) * bw(i);
  }
  std::vector<std::pair<int, Int>> rw;
  for (Eigen::Index i = 0; i < w.size(); ++i) rw.emplace_back(static_cast<int>(i), w(i));
  return one_cycle(r, rays, rw);
}

int SurfaceModel::ray_index(const IntVec& dir) const {
  for (size_t i = 0; i < rays.size(); ++i)
    if (rays[i] == dir) return static_cast<int>(i);
  return -1;
}

SurfaceModel build_surface_model(ModelName name) {
  SurfaceModel sm;
  sm.name = name;
  if (name == ModelName::R1) {
    sm.r = 1;
    sm.rays = {ivec({1}), ivec({-1})};
    sm.theta = WeightedComplex::from_facets(
        1, 1,
        {Polyhedron::cone_from_rays(1, ray_rows(sm.rays, {0}), RatMat(0, 1)),
         Polyhedron::cone_from_rays(1, ray_rows(sm.rays, {1}), RatMat(0, 1))},
        {Int(1), Int(1)});
    sm.basis = {origin_cycle(1), WeightedComplex::full_space(1)};
    sm.basis_dim = {0, 1};
    sm.aux_class_a = sm.aux_class_b = sm.unit_class(0);
    RatVec ex(1);
    ex(0) = 1;
    sm.aux_fn_a = sm.aux_fn_b =
        PLFunction::max_terms({{RatVec::Zero(1), Rat(0)}, {ex, Rat(0)}});
  } else if (name == ModelName::P1xKstar) {
    sm.r = 2;
    sm.degenerate = true;
    sm.rays = {ivec({1, 0}), ivec({-1, 0})};
    sm.theta = one_cycle(2, sm.rays, {{0, 1}, {1, 1}});
    sm.basis = {origin_cycle(2), one_cycle(2, sm.rays, {{0, 1}, {1, 1}})};
    sm.basis_dim = {0, 1};
  } else {
    sm.r = 2;
    std::vector<std::vector<std::pair<int, Int>>> mids;
    switch (name) {
      case ModelName::P2:
        sm.rays = {ivec({1, 0}), ivec({0, 1}), ivec({-1, -1})};
        mids = {{{0, 1}, {1, 1}, {2, 1}}};
        break;
      case ModelName::P1xP1:
        sm.rays = {ivec({1, 0}), ivec({0, 1}), ivec({-1, 0}), ivec({0, -1})};
        mids = {{{0, 1}, {2, 1}}, {{1, 1}, {3, 1}}};
        break;
      case ModelName::F1:
        sm.rays = {ivec({1, 0}), ivec({0, 1}), ivec({-1, 1}), ivec({0, -1})};
        mids = {{{1, 1}, {3, 1}}, {{0, 1}, {2, 1}, {3, 1}}};
        break;
      case ModelName::Bl2P2:
        sm.rays = {ivec({1, 0}), ivec({1, 1}), ivec({0, 1}), ivec({-1, 0}), ivec({-1, -1})};
        mids = {{{0, 1}, {2, 1}, {4, 1}}, {{1, 1}, {4, 1}}, {{0, 1}, {3, 1}}};
        break;
      default:  // Bl3P2
        sm.rays = {ivec({1, 0}),  ivec({1, 1}),   ivec({0, 1}),
                   ivec({-1, 0}), ivec({-1, -1}), ivec({0, -1})};
        mids = {{{0, 1}, {2, 1}, {4, 1}}, {{1, 1}, {4, 1}}, {{0, 1}, {3, 1}}, {{2, 1}, {5, 1}}};
        break;
    }
    const int s = static_cast<int>(sm.rays.size());
    std::vector<Polyhedron> cones;
    for (int i = 0; i < s; ++i)
      cones.push_back(
          Polyhedron::cone_from_rays(2, ray_rows(sm.rays, {i, (i + 1) % s}), RatMat(0, 2)));
    sm.theta = WeightedComplex::from_facets(2, 2, cones, std::vector<Int>(s, Int(1)));
    sm.basis.push_back(origin_cycle(2));
    sm.basis_dim.push_back(0);
    for (const auto& mid : mids) {
      sm.basis.push_back(one_cycle(2, sm.rays, mid));
      sm.basis_dim.push_back(1);
    }
    sm.basis.push_back(WeightedComplex::full_space(2));
    sm.basis_dim.push_back(2);
    switch (name) {
      case ModelName::P2: {
        sm.aux_class_a = sm.aux_class_b = sm.unit_class(1);
        RatVec mx(2), my(2);
        mx << Rat(-1), Rat(0);
        my << Rat(0), Rat(-1);
        sm.aux_fn_a = sm.aux_fn_b = PLFunction::max_terms(
            {{RatVec::Zero(2), Rat(0)}, {mx, Rat(0)}, {my, Rat(0)}});
        break;
      }
      case ModelName::P1xP1: {
        IntVec d = sm.zero_class();
        d(1) = 1;
        d(2) = 1;
        sm.aux_class_a = sm.aux_class_b = d;
        RatVec ex(2), ey(2), exy(2);
        ex << Rat(1), Rat(0);
        ey << Rat(0), Rat(1);
        exy << Rat(1), Rat(1);
        sm.aux_fn_a = sm.aux_fn_b = PLFunction::max_terms(
            {{RatVec::Zero(2), Rat(0)}, {ex, Rat(0)}, {ey, Rat(0)}, {exy, Rat(0)}});
        break;
      }
      case ModelName::F1:
        sm.aux_class_a = sm.aux_class_b = sm.unit_class(2);
        break;
      case ModelName::Bl2P2:
        sm.aux_class_a = sm.unit_class(1);
        sm.aux_class_b = sm.unit_class(2);
        break;
      default: {  // Bl3P2
        sm.aux_class_a = sm.unit_class(1);
        IntVec d = sm.zero_class();
        d(1) = -1;
        d(2) = 1;
        d(3) = 1;
        d(4) = 1;
        sm.aux_class_b = d;
        break;
      }
    }
  }
  const int nb = static_cast<int>(sm.basis.size());
  sm.alpha = RatMat(nb, nb);
  for (int e = 0; e < nb; ++e)
    for (int f = 0; f < nb; ++f) {
      if (sm.basis_dim[e] + sm.basis_dim[f] != sm.r)
        sm.alpha(e, f) = 0;
      else
        sm.alpha(e, f) = sm.basis[e].diagonal_intersection(sm.basis[f]).degree0();
    }
  if (!sm.degenerate) {
    sm.beta = invert(sm.alpha);
    if (sm.r == 2 && sm.pairing(sm.aux_class_a, sm.aux_class_b) == 0)
      throw std::runtime_error("auxiliary divisor pair pairs to zero");
  }
  return sm;
}

InvariantKey make_key(ModelName model, const std::vector<IntVec>& dirs,
                      std::vector<std::pair<int, IntVec>> marks, bool labelled) {
  InvariantKey key;
  key.model = model;
  key.dirs = dirs;
  IntVec sum;
  for (const auto& v : dirs) {
    bool zero = true;
    for (Eigen::Index i = 0; i < v.size(); ++i)
      if (v(i) != 0) zero = false;
    if (zero) throw std::invalid_argument("zero direction in degree");
    if (sum.size() == 0) sum = IntVec::Zero(v.size()).eval();
    sum += v;
  }
  for (Eigen::Index i = 0; i < sum.size(); ++i)
    if (sum(i) != 0) throw std::invalid_argument("degree directions do not balance");
  std::sort(key.dirs.begin(), key.dirs.end(),
            [](const IntVec& a, const IntVec& b) { return lex_less(a, b); });
  for (auto& [a, c] : marks)
    if (a < 0) throw std::invalid_argument("negative psi exponent");
  std::sort(marks.begin(), marks.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return lex_less(a.second, b.second);
  });
  key.marks = std::move(marks);
  key.labelled = labelled;
  return key;
}

InvariantKey projective_key(ModelName model, int d,
                            std::vector<std::pair<int, IntVec>> marks, bool labelled) {
  std::vector<IntVec> dirs;
  if (model == ModelName::R1) {
    for (int i = 0; i < d; ++i) {
      dirs.push_back(ivec({1}));
      dirs.push_back(ivec({-1}));
    }
  } else {
    for (int i = 0; i < d; ++i) {
      dirs.push_back(ivec({1, 0}));
      dirs.push_back(ivec({0, 1}));
      dirs.push_back(ivec({-1, -1}));
    }
  }
  return make_key(model, dirs, std::move(marks), labelled);
}

std::string key_canonical_string(const SurfaceModel& m, const InvariantKey& key) {
  InvariantKey c = make_key(key.model, key.dirs, key.marks, key.labelled);
  std::ostringstream os;
  os << model_to_string(c.model) << ";d:";
  for (const auto& v : c.dirs) os << dir_string(v);
  os << ";m:";
  for (const auto& [a, cls] : c.marks) {
    os << "[" << a << "|";
    for (Eigen::Index e = 0; e < cls.size(); ++e) {
      if (e) os << ",";
      os << cls(e).get_str();
    }
    os << "]";
  }
  (void)m;
  return os.str();
}

Int degree_factorial_of_dirs(const std::vector<IntVec>& dirs) {
  std::map<std::string, int> counts;
  for (const auto& v : dirs) counts[dir_string(v)]++;
  Int f = 1;
  for (const auto& [_, c] : counts) f *= factorial_int(c);
  return f;
}

bool is_zero_dimensional(const SurfaceModel& m, const InvariantKey& key) {
  int lhs = 0;
  for (const auto& [a, cls] : key.marks) lhs += a + m.codim_of_class(cls);
  return lhs == key.n() + key.degree_size() + m.r - 3;
}

UnimodularReport check_strongly_unimodular(const std::vector<IntVec>& dirs) {
  UnimodularReport rep;
  for (const auto& v : dirs)
    if (content(v) != 1) {
      rep.ok = false;
      rep.witness = "non-primitive direction " + dir_string(v);
      return rep;
    }
  if (!dirs.empty() && dirs[0].size() == 2) {
    auto prim = distinct_primitive_dirs(dirs);
    for (size_t i = 0; i < prim.size(); ++i)
      for (size_t j = i + 1; j < prim.size(); ++j) {
        Int det = prim[i](0) * prim[j](1) - prim[i](1) * prim[j](0);
        if (det != 0 && det != 1 && det != -1) {
          rep.ok = false;
          rep.witness = "det" + dir_string(prim[i]) + dir_string(prim[j]) + " = " + det.get_str();
          return rep;
        }
      }
  }
  return rep;
}

UnimodularReport check_strongly_unimodular(const Degree& d) {
  return check_strongly_unimodular(d.dirs);
}

ModelName classify_directions(const std::vector<IntVec>& dirs) {
  if (dirs.empty()) throw std::invalid_argument("empty direction set");
  auto rep = check_strongly_unimodular(dirs);
  if (!rep.ok) throw std::invalid_argument("not strongly unimodular: " + rep.witness);
  if (dirs[0].size() == 1) return ModelName::R1;
  auto prim = distinct_primitive_dirs(dirs);
  int s = static_cast<int>(prim.size());
  int opp = 0;
  for (size_t i = 0; i < prim.size(); ++i)
    for (size_t j = i + 1; j < prim.size(); ++j) {
      IntVec neg = prim[j];
      for (Eigen::Index t = 0; t < neg.size(); ++t) neg(t) = -neg(t);
      if (prim[i] == neg) opp++;
    }
  if (s == 2 && opp == 1) return ModelName::P1xKstar;
  if (s == 3) return ModelName::P2;
  if (s == 4 && opp == 2) return ModelName::P1xP1;
  if (s == 4 && opp == 1) return ModelName::F1;
  if (s == 5) return ModelName::Bl2P2;
  if (s == 6) return ModelName::Bl3P2;
  throw std::invalid_argument("direction set matches no complete unimodular plane fan");
}

bool PrecondReport::has(const std::string& label) const {
  for (const auto& [l, _] : violations)
    if (l == label) return true;
  return false;
}

PrecondError::PrecondError(const PrecondReport& rep)
    : std::runtime_error([&rep] {
        std::string msg = "precondition violated:";
        for (const auto& [l, d] : rep.violations) msg += " [" + l + "] " + d;
        return msg;
      }()),
      report(rep) {}

namespace {

void common_preconditions(const SurfaceModel& m, const InvariantKey& family, PrecondReport& rep) {
  for (int t = 0; t < family.n(); ++t) {
    const auto& [a, cls] = family.marks[t];
    int codim = m.codim_of_class(cls);
    if (a > 0 && codim > 0 && codim < m.r)
      rep.violations.emplace_back("i", "psi exponent at non-point condition (mark " +
                                           std::to_string(t) + ")");
    if (codim == 0 && a > 1)
      rep.violations.emplace_back("directionality",
                                  "exponent above 1 at a full-space condition (mark " +
                                      std::to_string(t) + ")");
  }
  auto uni = check_strongly_unimodular(family.dirs);
  if (!uni.ok) rep.violations.emplace_back("ii", uni.witness);
  for (const auto& v : family.dirs)
    if (m.ray_index(primitive_scale(to_rat(v))) < 0)
      rep.violations.emplace_back("directionality",
                                  "degree direction " + dir_string(v) + " off the model fan");
}

void pair_condition_iii(const SurfaceModel& m, const InvariantKey& family, int x, int y,
                        PrecondReport& rep) {
  if (m.r != 2) return;
  const auto& cx = family.marks[x].second;
  const auto& cy = family.marks[y].second;
  if (m.codim_of_class(cx) != 1 || m.codim_of_class(cy) != 1) return;
  auto rx = class_rays(m, cx);
  auto ry = class_rays(m, cy);
  auto prim = distinct_primitive_dirs(family.dirs);
  for (size_t i = 0; i < prim.size(); ++i)
    for (size_t j = i + 1; j < prim.size(); ++j) {
      bool hit_x = false, hit_y = false;
      for (const auto& r : rx)
        if (strictly_inside_cone(r, prim[i], prim[j])) hit_x = true;
      for (const auto& r : ry)
        if (strictly_inside_cone(r, prim[i], prim[j])) hit_y = true;
      if (hit_x && hit_y) {
        rep.violations.emplace_back(
            "iii", "degree cone " + dir_string(prim[i]) + dir_string(prim[j]) +
                       " meets both divisor conditions (marks " + std::to_string(x) + "," +
                       std::to_string(y) + ")");
        return;
      }
    }
}

void check_indices(const InvariantKey& family, std::initializer_list<int> idx) {
  std::vector<int> seen;
  for (int i : idx) {
    if (i < 0 || i >= family.n()) throw std::invalid_argument("mark index out of range");
    if (std::find(seen.begin(), seen.end(), i) != seen.end())
      throw std::invalid_argument("mark indices not pairwise different");
    seen.push_back(i);
  }
}

}  // namespace

PrecondReport check_wdvv_preconditions(const SurfaceModel& m, const InvariantKey& family,
                                       int i, int j, int k, int l) {
  check_indices(family, {i, j, k, l});
  PrecondReport rep;
  common_preconditions(m, family, rep);
  pair_condition_iii(m, family, i, j, rep);
  pair_condition_iii(m, family, k, l, rep);
  rep.ok = rep.violations.empty();
  return rep;
}

PrecondReport check_toprec_preconditions(const SurfaceModel& m, const InvariantKey& family,
                                         int i, int k, int l) {
  check_indices(family, {i, k, l});
  PrecondReport rep;
  common_preconditions(m, family, rep);
  pair_condition_iii(m, family, k, l, rep);
  if (m.codim_of_class(family.marks[i].second) != m.r)
    rep.violations.emplace_back("iv", "recursion mark " + std::to_string(i) +
                                          " carries a non-point condition");
  rep.ok = rep.violations.empty();
  return rep;
}

std::vector<IntVec> theta_of_family(const SurfaceModel& m, const InvariantKey& key) {
  std::vector<IntVec> out = distinct_primitive_dirs(key.dirs);
  for (const auto& [a, cls] : key.marks) {
    if (a == 0 || m.dim_of_class(cls) != 1) continue;
    for (const auto& r : class_rays(m, cls)) {
      bool seen = false;
      for (const auto& q : out)
        if (q == r) seen = true;
      if (!seen) out.push_back(r);
    }
  }
  return out;
}

Rat degree_zero_invariant(const SurfaceModel& m,
                          const std::vector<std::pair<int, IntVec>>& marks) {
  const int n = static_cast<int>(marks.size());
  if (n < 3) throw std::invalid_argument("empty-degree invariant needs at least 3 marks");
  int acc = 0;
  std::vector<int> a;
  int codims = 0;
  for (const auto& [ak, cls] : marks) {
    a.push_back(ak);
    acc += ak + m.codim_of_class(cls);
    codims += m.codim_of_class(cls);
  }
  if (acc != n + m.r - 3) throw std::invalid_argument("not a zero-dimensional product");
  if (codims != m.r) return Rat(0);
  IntVec prod = m.fund_class();
  for (const auto& [ak, cls] : marks) prod = m.class_product(prod, cls);
  return abstract_invariant(a) * Rat(prod(0));
}

bool split_is_reducible(const InvariantKey& key, const Split& s) {
  if (key.dirs.empty()) return true;
  IntVec sum = IntVec::Zero(key.dirs[0].size()).eval();
  for (int i : s.dirs_first) sum += key.dirs[i];
  for (Eigen::Index t = 0; t < sum.size(); ++t)
    if (sum(t) != 0) return false;
  return true;
}

TermSum splitting_lemma(const SurfaceModel& m, const InvariantKey& family, const Split& s) {
  if (m.degenerate) throw std::invalid_argument("degenerate model has no splitting matrices");
  if (!split_is_reducible(family, s)) throw std::invalid_argument("split is not reducible");
  std::vector<bool> mark_first(family.n(), false), dir_first(family.degree_size(), false);
  for (int i : s.marks_first) mark_first[i] = true;
  for (int i : s.dirs_first) dir_first[i] = true;
  std::vector<std::pair<int, IntVec>> ml, mr;
  std::vector<IntVec> dl, dr;
  for (int i = 0; i < family.n(); ++i)
    (mark_first[i] ? ml : mr).push_back(family.marks[i]);
  for (int i = 0; i < family.degree_size(); ++i)
    (dir_first[i] ? dl : dr).push_back(family.dirs[i]);
  if (ml.size() + dl.size() < 2 || mr.size() + dr.size() < 2)
    throw std::invalid_argument("split side too small to be a boundary divisor");
  TermSum out;
  for (int e = 0; e <= m.m(); ++e)
    for (int f = 0; f <= m.m(); ++f) {
      if (m.beta(e, f) == 0) continue;
      auto mle = ml;
      mle.emplace_back(0, m.unit_class(e));
      auto mrf = mr;
      mrf.emplace_back(0, m.unit_class(f));
      InvariantKey left = make_key(family.model, dl, mle, family.labelled);
      InvariantKey right = make_key(family.model, dr, mrf, family.labelled);
      if (!is_zero_dimensional(m, left) || !is_zero_dimensional(m, right)) continue;
      out.push_back({m.beta(e, f), left, right});
    }
  return out;
}

namespace {

struct SplitEnum {
  Split split;
  Rat mult;
};

// all reducible stable splits with the pinned marks on the prescribed
// sides; equal degree sub-multisets enumerated once, with the labelled
// multiplicity factor when requested
std::vector<SplitEnum> reducible_splits(const InvariantKey& key,
                                        const std::vector<int>& pin_first,
                                        const std::vector<int>& pin_second, bool labelled) {
  std::vector<int> free_marks;
  for (int i = 0; i < key.n(); ++i) {
    if (std::find(pin_first.begin(), pin_first.end(), i) != pin_first.end()) continue;
    if (std::find(pin_second.begin(), pin_second.end(), i) != pin_second.end()) continue;
    free_marks.push_back(i);
  }
  if (free_marks.size() > 24) throw std::runtime_error("too many marks to enumerate splits");
  // group equal directions
  std::vector<std::vector<int>> groups;
  for (int i = 0; i < key.degree_size(); ++i) {
    bool placed = false;
    for (auto& g : groups)
      if (key.dirs[g[0]] == key.dirs[i]) {
        g.push_back(i);
        placed = true;
      }
    if (!placed) groups.push_back({i});
  }
  std::vector<SplitEnum> out;
  std::vector<int> take(groups.size(), 0);
  while (true) {
    // direction subset from the take counts
    std::vector<int> dirs_first;
    Rat mult = 1;
    for (size_t g = 0; g < groups.size(); ++g) {
      for (int t = 0; t < take[g]; ++t) dirs_first.push_back(groups[g][t]);
      if (labelled) mult *= Rat(binomial_int(static_cast<int>(groups[g].size()), take[g]));
    }
    Split base;
    base.dirs_first = dirs_first;
    if (split_is_reducible(key, base)) {
      for (uint32_t sub = 0; sub < (1u << free_marks.size()); ++sub) {
        Split s = base;
        s.marks_first = pin_first;
        std::vector<int> second = pin_second;
        for (size_t b = 0; b < free_marks.size(); ++b)
          ((sub >> b) & 1 ? s.marks_first : second).push_back(free_marks[b]);
        size_t first_size = s.marks_first.size() + s.dirs_first.size();
        size_t second_size = (key.n() - s.marks_first.size()) +
                             (key.degree_size() - s.dirs_first.size());
        if (first_size < 2 || second_size < 2) continue;
        out.push_back({s, mult});
      }
    }
    // next take vector
    size_t g = 0;
    while (g < groups.size() && take[g] == static_cast<int>(groups[g].size())) {
      take[g] = 0;
      ++g;
    }
    if (g == groups.size()) break;
    take[g]++;
  }
  return out;
}

TermSum expand_splits(const SurfaceModel& m, const InvariantKey& family,
                      const std::vector<int>& pin_first, const std::vector<int>& pin_second) {
  TermSum out;
  for (const auto& se : reducible_splits(family, pin_first, pin_second, family.labelled))
    for (auto term : splitting_lemma(m, family, se.split)) {
      term.coeff *= se.mult;
      out.push_back(term);
    }
  return out;
}

}  // namespace

std::pair<TermSum, TermSum> wdvv_reduce(const SurfaceModel& m, const InvariantKey& family,
                                        int i, int j, int k, int l) {
  auto rep = check_wdvv_preconditions(m, family, i, j, k, l);
  if (!rep.ok) throw PrecondError(rep);
  return {expand_splits(m, family, {i, j}, {k, l}), expand_splits(m, family, {i, k}, {j, l})};
}

TermSum topological_recursion(const SurfaceModel& m, const InvariantKey& family, int i, int k,
                              int l) {
  auto rep = check_toprec_preconditions(m, family, i, k, l);
  if (!rep.ok) throw PrecondError(rep);
  return expand_splits(m, family, {i}, {k, l});
}

namespace {

InvariantKey erase_mark(const InvariantKey& key, int t) {
  InvariantKey out = key;
  out.marks.erase(out.marks.begin() + t);
  return out;
}

int find_mark(const SurfaceModel& m, const InvariantKey& key, int codim, int a_exact) {
  for (int t = 0; t < key.n(); ++t)
    if (m.codim_of_class(key.marks[t].second) == codim &&
        (a_exact < 0 ? key.marks[t].first > 0 : key.marks[t].first == a_exact))
      return t;
  return -1;
}

}  // namespace

WeightedKeys string_rewrite(const SurfaceModel& m, const InvariantKey& key) {
  int t = find_mark(m, key, 0, 0);
  if (t < 0) throw std::invalid_argument("no full-space mark with exponent 0");
  WeightedKeys out;
  for (int s = 0; s < key.n(); ++s) {
    if (s == t || key.marks[s].first == 0) continue;
    InvariantKey k2 = erase_mark(key, t);
    int s2 = s < t ? s : s - 1;
    k2.marks[s2].first -= 1;
    out.emplace_back(Rat(1), k2);
  }
  return out;
}

WeightedKeys dilaton_rewrite(const SurfaceModel& m, const InvariantKey& key) {
  int t = find_mark(m, key, 0, 1);
  if (t < 0) throw std::invalid_argument("no full-space mark with exponent 1");
  Rat factor = Rat(key.n() - 1 + key.degree_size() - 2);
  return {{factor, erase_mark(key, t)}};
}

WeightedKeys divisor_rewrite(const SurfaceModel& m, const InvariantKey& key) {
  int t = find_mark(m, key, 1, 0);
  if (t < 0) throw std::invalid_argument("no divisor mark with exponent 0");
  const IntVec d = key.marks[t].second;
  WeightedKeys out;
  Rat p = m.pairing(d, degree_class(m, key.dirs));
  InvariantKey base = erase_mark(key, t);
  if (p != 0 && base.n() > 0) out.emplace_back(p, base);
  for (int s = 0; s < key.n(); ++s) {
    if (s == t || key.marks[s].first == 0) continue;
    IntVec prod = m.class_product(d, key.marks[s].second);
    bool zero = true;
    for (Eigen::Index e = 0; e < prod.size(); ++e)
      if (prod(e) != 0) zero = false;
    if (zero) continue;
    InvariantKey k2 = erase_mark(key, t);
    int s2 = s < t ? s : s - 1;
    k2.marks[s2].first -= 1;
    k2.marks[s2].second = prod;
    out.emplace_back(Rat(1), k2);
  }
  return out;
}

Rat to_unlabelled(const Rat& labelled_value, const std::vector<IntVec>& dirs) {
  Rat v = labelled_value / Rat(degree_factorial_of_dirs(dirs));
  v.canonicalize();
  return v;
}

Engine::Engine(ModelName name, Order order) : model_(build_surface_model(name)), order_(order) {}

Rat Engine::compute(const InvariantKey& key) {
  if (key.model != model_.name) throw std::invalid_argument("key model does not match engine");
  InvariantKey canon = make_key(key.model, key.dirs, key.marks, false);
  Rat u = compute_unlabelled(canon, 0);
  if (key.labelled) u *= Rat(degree_factorial_of_dirs(key.dirs));
  u.canonicalize();
  return u;
}

Rat Engine::evaluate(const TermSum& terms) {
  Rat s = 0;
  for (const auto& t : terms) s += t.coeff * compute(t.left) * compute(t.right);
  s.canonicalize();
  return s;
}

nlohmann::json Engine::ledger_json() const {
  std::shared_lock lock(mu_);
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : memo_) j[k] = rat_to_string(v);
  return j;
}

Rat Engine::compute_unlabelled(const InvariantKey& key, int depth) {
  if (depth > 64) throw std::runtime_error("recursion depth exceeded");
  // factor scalar content out of every condition class
  Rat scale = 1;
  InvariantKey norm = key;
  for (auto& [a, cls] : norm.marks) {
    Int c = content(cls);
    if (c == 0) return Rat(0);
    Eigen::Index first = 0;
    while (cls(first) == 0) ++first;
    Int s = cls(first) > 0 ? c : -c;
    for (Eigen::Index e = 0; e < cls.size(); ++e) cls(e) /= s;
    scale *= Rat(s);
  }
  norm = make_key(norm.model, norm.dirs, norm.marks, false);
  const std::string canon = key_canonical_string(model_, norm);
  {
    std::shared_lock lock(mu_);
    auto it = memo_.find(canon);
    if (it != memo_.end()) {
      Rat v = scale * it->second;
      v.canonicalize();
      return v;
    }
  }
  Rat value = reduce(norm, depth);
  value.canonicalize();
  {
    std::unique_lock lock(mu_);
    memo_.emplace(canon, value);
  }
  Rat v = scale * value;
  v.canonicalize();
  return v;
}

Rat Engine::reduce(const InvariantKey& key, int depth) {
  const SurfaceModel& m = model_;
  if (m.degenerate) throw std::runtime_error("invariants are not defined on a degenerate model");
  PrecondReport rep;
  common_preconditions(m, key, rep);
  rep.ok = rep.violations.empty();
  if (!rep.ok) throw PrecondError(rep);
  if (!is_zero_dimensional(m, key))
    throw std::invalid_argument("key is not zero-dimensional");
  auto eval = [&](const WeightedKeys& terms) {
    Rat s = 0;
    for (const auto& [c, k2] : terms) s += c * compute_unlabelled(k2, depth + 1);
    return s;
  };
  // empty degree
  if (key.dirs.empty()) return degree_zero_invariant(m, key.marks);
  // full-space marks: dilaton, then string
  if (find_mark(m, key, 0, 1) >= 0) return eval(dilaton_rewrite(m, key));
  if (find_mark(m, key, 0, 0) >= 0) return eval(string_rewrite(m, key));
  // psi elimination by topological recursion
  int psi = -1;
  for (int t = 0; t < key.n(); ++t)
    if (key.marks[t].first > 0) psi = (psi < 0 || order_ == Order::Alt) ? t : psi;
  if (order_ == Order::Lex)
    for (int t = 0; t < key.n(); ++t)
      if (key.marks[t].first > 0) {
        psi = t;
        break;
      }
  if (psi >= 0) {
    std::vector<int> others;
    for (int t = 0; t < key.n(); ++t)
      if (t != psi) others.push_back(t);
    if (others.size() < 2) {
      // add an auxiliary divisor mark by the divisor equation in reverse;
      // the correction terms vanish because psi sits at point conditions
      IntVec aux = (order_ == Order::Lex) == (others.empty()) ? m.aux_class_a : m.aux_class_b;
      if (m.r == 1) aux = m.point_class();
      Rat p = m.pairing(aux, degree_class(m, key.dirs));
      if (p == 0) throw std::runtime_error("auxiliary divisor pairs to zero with the degree");
      InvariantKey k2 = key;
      k2.marks.emplace_back(0, aux);
      Rat v = compute_unlabelled(k2, depth + 1) / p;
      v.canonicalize();
      return v;
    }
    InvariantKey family = key;
    family.marks[psi].first -= 1;
    int k = others[order_ == Order::Lex ? 0 : static_cast<int>(others.size()) - 2];
    int l = others[order_ == Order::Lex ? 1 : static_cast<int>(others.size()) - 1];
    TermSum terms = topological_recursion(m, family, psi, k, l);
    Rat s = 0;
    for (const auto& t : terms)
      s += t.coeff * compute_unlabelled(t.left, depth + 1) *
           compute_unlabelled(t.right, depth + 1);
    return s;
  }
  // r = 1 bases before stripping the last point marks
  if (m.r == 1 && key.n() <= 1) {
    if (key.degree_size() == 2) return Rat(1);
    throw std::runtime_error("unexpected base case");
  }
  // divisor marks (and, for r = 1, point marks) with exponent 0
  if (find_mark(m, key, 1, 0) >= 0) return eval(divisor_rewrite(m, key));
  // r = 2 point invariants
  if (key.n() == 1 && key.degree_size() == 2) return Rat(1);
  if (key.n() == 2 && key.degree_size() == 3) return Rat(1);
  // WDVV descent: two auxiliary divisor marks against two point marks
  InvariantKey family;
  family.model = key.model;
  family.labelled = false;
  family.dirs = key.dirs;
  family.marks.emplace_back(0, order_ == Order::Lex ? m.aux_class_a : m.aux_class_b);
  family.marks.emplace_back(0, order_ == Order::Lex ? m.aux_class_b : m.aux_class_a);
  for (int t = 0; t + 1 < key.n(); ++t) family.marks.push_back(key.marks[t]);
  if (family.n() < 4) throw std::runtime_error("unexpected point invariant shape");
  int ki = order_ == Order::Lex ? 2 : family.n() - 2;
  int li = order_ == Order::Lex ? 3 : family.n() - 1;
  auto [lhs, rhs] = wdvv_reduce(m, family, 0, 1, ki, li);
  const std::string target = key_canonical_string(m, key);
  Rat self_coeff = 0, rest = 0;
  auto accumulate = [&](const TermSum& terms, const Rat& sign) {
    for (const auto& t : terms) {
      std::string ls = key_canonical_string(m, t.left);
      std::string rs = key_canonical_string(m, t.right);
      if (ls == target) {
        self_coeff += sign * t.coeff * compute_unlabelled(t.right, depth + 1);
      } else if (rs == target) {
        self_coeff += sign * t.coeff * compute_unlabelled(t.left, depth + 1);
      } else {
        rest += sign * t.coeff * compute_unlabelled(t.left, depth + 1) *
                compute_unlabelled(t.right, depth + 1);
      }
    }
  };
  accumulate(lhs, Rat(1));
  accumulate(rhs, Rat(-1));
  if (self_coeff == 0) throw std::runtime_error("descent equation does not contain the target");
  Rat v = -rest / self_coeff;
  v.canonicalize();
  return v;
}

std::vector<BoundaryPsiFacet> boundary_psi_facets(int n, const std::vector<int>& a,
                                                  const Partition& p) {
  if (static_cast<int>(a.size()) != n) throw std::invalid_argument("exponent count mismatch");
  if (p.n != n) throw std::invalid_argument("partition size mismatch");
  int total = std::accumulate(a.begin(), a.end(), 0);
  int ridge_dim = n - 3 - total - 1;
  if (ridge_dim < 0) throw std::invalid_argument("psi product has no codimension-one types");
  const uint32_t maskI = p.mask;
  const uint32_t maskJ = p.other();
  std::vector<BoundaryPsiFacet> out;
  for (const auto& t : enumerate_types(n, ridge_dim)) {
    auto verts = tree_vertices(t);
    int special = -1;
    bool shape_ok = true;
    for (size_t v = 0; v < verts.size(); ++v) {
      int ea = 0;
      for (int leaf : verts[v].leaves) ea += a[leaf];
      if (verts[v].valence() == ea + 4) {
        if (special >= 0) shape_ok = false;
        special = static_cast<int>(v);
      } else if (verts[v].valence() != ea + 3) {
        shape_ok = false;
      }
    }
    if (!shape_ok || special < 0) continue;
    // partition around the special vertex: branch masks plus leaf singletons
    std::vector<uint32_t> parts = verts[special].branches;
    for (int leaf : verts[special].leaves) parts.push_back(1u << leaf);
    int m_i = 0, m_j = 0;
    bool sub = true;
    for (uint32_t part : parts) {
      if ((part & ~maskI) == 0)
        m_i++;
      else if ((part & ~maskJ) == 0)
        m_j++;
      else
        sub = false;
    }
    int ea_i = 0;
    for (int leaf : verts[special].leaves)
      if ((1u << leaf) & maskI) ea_i += a[leaf];
    BoundaryPsiFacet f;
    f.type = t;
    if (!sub)
      f.sign = 0;
    else if (m_i == 1 || m_j == 1)
      f.sign = -1;
    else if (m_i == ea_i + 2)
      f.sign = 1;
    else
      f.sign = 0;
    out.push_back(f);
  }
  return out;
}

}  // namespace tropgw
