#include "tropgw/complex.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

namespace tropgw {

namespace {

Rat dot(const RatVec& a, const RatVec& b) {
  Rat s = 0;
  for (Eigen::Index i = 0; i < a.size(); ++i) s += a(i) * b(i);
  return s;
}

// canonical key of the hyperplane a.x = b, up to positive scaling and sign
std::string hyperplane_key(const RatVec& a, const Rat& b) {
  RatVec w(a.size() + 1);
  w.head(a.size()) = a;
  w(a.size()) = b;
  IntVec p = primitive_scale(w);
  int sgn = 0;
  for (Eigen::Index i = 0; i < p.size() && sgn == 0; ++i)
    if (p(i) != 0) sgn = p(i) > 0 ? 1 : -1;
  if (sgn < 0) p = -p;
  std::ostringstream os;
  for (Eigen::Index i = 0; i < p.size(); ++i) os << p(i) << ",";
  return os.str();
}

// split P along a.x = b, keeping only pieces of dimension d; returns {P}
// untouched when the hyperplane does not cut through the relative interior
std::vector<Polyhedron> split_piece(const Polyhedron& P, const RatVec& a, const Rat& b, int d) {
  bool has_pos = false, has_neg = false;
  for (int i = 0; i < P.vertices().rows(); ++i) {
    Rat s = dot(a, P.vertices().row(i).transpose()) - b;
    if (s > 0) has_pos = true;
    if (s < 0) has_neg = true;
  }
  for (int i = 0; i < P.rays().rows(); ++i) {
    Rat s = dot(a, P.rays().row(i).transpose());
    if (s > 0) has_pos = true;
    if (s < 0) has_neg = true;
  }
  for (int i = 0; i < P.lineality().rows(); ++i) {
    if (dot(a, P.lineality().row(i).transpose()) != 0) {
      has_pos = true;
      has_neg = true;
    }
  }
  if (!has_pos || !has_neg) return {P};
  std::vector<Polyhedron> out;
  Polyhedron up = P.intersect_halfspace(a, b);
  if (up.dim() == d) out.push_back(std::move(up));
  Polyhedron down = P.intersect_halfspace(-a, -b);
  if (down.dim() == d) out.push_back(std::move(down));
  return out;
}

std::vector<std::pair<RatVec, Rat>> collect_hyperplanes(const std::vector<Polyhedron>& cells) {
  std::vector<std::pair<RatVec, Rat>> hyps;
  std::map<std::string, bool> seen;
  for (const auto& P : cells) {
    const HRep& h = P.hrep();
    auto add = [&](const RatVec& a, const Rat& b) {
      if (a.isZero()) return;
      std::string k = hyperplane_key(a, b);
      if (seen.emplace(k, true).second) hyps.push_back({a, b});
    };
    for (const auto& [a, b] : h.ineqs) add(a, b);
    for (const auto& [c, dd] : h.eqs) add(c, dd);
  }
  return hyps;
}

std::vector<Polyhedron> refine_cell(const Polyhedron& P,
                                    const std::vector<std::pair<RatVec, Rat>>& hyps, int d) {
  std::vector<Polyhedron> pieces = {P};
  for (const auto& [a, b] : hyps) {
    std::vector<Polyhedron> next;
    for (const auto& Q : pieces) {
      auto parts = split_piece(Q, a, b, d);
      next.insert(next.end(), parts.begin(), parts.end());
    }
    pieces = std::move(next);
  }
  return pieces;
}

// overlay possibly-overlapping weighted cells of dimension d into a common
// arrangement; the weight of a piece is the sum over the cells covering it
WeightedComplex overlay(int ambient, int d, const std::vector<std::pair<Polyhedron, Int>>& cells,
                        bool prune = true) {
  std::vector<Polyhedron> polys;
  for (const auto& [P, w] : cells) polys.push_back(P);
  auto hyps = collect_hyperplanes(polys);
  std::map<std::string, std::pair<Polyhedron, Int>> acc;
  for (const auto& [P, w] : cells)
    for (auto& Q : refine_cell(P, hyps, d)) {
      auto it = acc.find(Q.key());
      if (it == acc.end())
        acc.emplace(Q.key(), std::make_pair(Q, w));
      else
        it->second.second += w;
    }
  std::vector<Polyhedron> fs;
  std::vector<Int> ws;
  for (auto& [k, pw] : acc) {
    fs.push_back(std::move(pw.first));
    ws.push_back(std::move(pw.second));
  }
  return WeightedComplex::from_facets(ambient, d, std::move(fs), std::move(ws), prune);
}

} // namespace

// ---------------------------------------------------------------------------
// PLFunction

PLFunction PLFunction::max_terms(std::vector<std::pair<RatVec, Rat>> terms) {
  PLFunction f;
  f.data_ = MaxForm{std::move(terms)};
  return f;
}

PLFunction PLFunction::linear(const RatVec& a) { return max_terms({{a, Rat(0)}}); }

PLFunction PLFunction::ray_values(std::vector<std::pair<IntVec, Rat>> values) {
  PLFunction f;
  f.data_ = RayValues{std::move(values)};
  return f;
}

PLFunction PLFunction::cell_affine(std::vector<std::pair<RatVec, Rat>> per_facet) {
  PLFunction f;
  f.data_ = CellAffine{std::move(per_facet)};
  return f;
}

std::pair<RatVec, Rat> PLFunction::affine_on(const Polyhedron& cell, int facet_index) const {
  if (const auto* mf = std::get_if<MaxForm>(&data_)) {
    for (size_t i = 0; i < mf->terms.size(); ++i) {
      const auto& [a, c] = mf->terms[i];
      bool dominates = true;
      for (size_t j = 0; j < mf->terms.size() && dominates; ++j) {
        if (i == j) continue;
        RatVec d = a - mf->terms[j].first;
        Rat e = c - mf->terms[j].second;
        for (int k = 0; k < cell.vertices().rows() && dominates; ++k)
          if (dot(d, cell.vertices().row(k).transpose()) + e < 0) dominates = false;
        for (int k = 0; k < cell.rays().rows() && dominates; ++k)
          if (dot(d, cell.rays().row(k).transpose()) < 0) dominates = false;
        for (int k = 0; k < cell.lineality().rows() && dominates; ++k)
          if (dot(d, cell.lineality().row(k).transpose()) != 0) dominates = false;
      }
      if (dominates) return {a, c};
    }
    throw std::invalid_argument("PLFunction: not affine on cell (refine first)");
  }
  if (const auto* rv = std::get_if<RayValues>(&data_)) {
    if (!cell.is_cone()) throw std::invalid_argument("PLFunction: ray values need a cone");
    int m = cell.ambient_dim();
    int nr = static_cast<int>(cell.rays().rows());
    int nl = static_cast<int>(cell.lineality().rows());
    RatMat M(nr + nl, m);
    RatVec rhs(nr + nl);
    for (int i = 0; i < nr; ++i) {
      IntVec r = primitive_scale(cell.rays().row(i).transpose());
      bool found = false;
      for (const auto& [v, val] : rv->values)
        if (v == r) {
          rhs(i) = val;
          found = true;
          break;
        }
      if (!found) throw std::invalid_argument("PLFunction: no value for a ray of the cell");
      M.row(i) = to_rat(r).transpose();
    }
    for (int i = 0; i < nl; ++i) {
      M.row(nr + i) = cell.lineality().row(i);
      rhs(nr + i) = 0;
    }
    auto sol = solve_consistent(M, rhs);
    if (!sol) throw std::invalid_argument("PLFunction: ray values not linear on cell");
    return {*sol, Rat(0)};
  }
  const auto& ca = std::get<CellAffine>(data_);
  if (facet_index < 0 || facet_index >= static_cast<int>(ca.per_facet.size()))
    throw std::invalid_argument("PLFunction: facet index required for per-cell data");
  return ca.per_facet[facet_index];
}

Rat PLFunction::value_at(const RatVec& x) const {
  const auto* mf = std::get_if<MaxForm>(&data_);
  if (!mf) throw std::invalid_argument("PLFunction: pointwise evaluation needs max form");
  if (mf->terms.empty()) throw std::invalid_argument("PLFunction: empty max form");
  Rat best = dot(mf->terms[0].first, x) + mf->terms[0].second;
  for (size_t i = 1; i < mf->terms.size(); ++i) {
    Rat v = dot(mf->terms[i].first, x) + mf->terms[i].second;
    if (v > best) best = v;
  }
  return best;
}

// ---------------------------------------------------------------------------
// WeightedComplex

WeightedComplex WeightedComplex::from_facets(int ambient, int dim, std::vector<Polyhedron> facets,
                                             std::vector<Int> weights, bool prune) {
  if (facets.size() != weights.size())
    throw std::invalid_argument("WeightedComplex: facet/weight count mismatch");
  WeightedComplex x;
  x.ambient_ = ambient;
  x.dim_ = dim;
  std::map<std::string, size_t> index;
  for (size_t i = 0; i < facets.size(); ++i) {
    if (facets[i].is_empty()) continue;
    if (facets[i].dim() != dim) throw std::invalid_argument("WeightedComplex: not pure-dimensional");
    if (facets[i].ambient_dim() != ambient)
      throw std::invalid_argument("WeightedComplex: ambient mismatch");
    auto it = index.find(facets[i].key());
    if (it == index.end()) {
      index.emplace(facets[i].key(), x.facets_.size());
      x.facets_.push_back(std::move(facets[i]));
      x.weights_.push_back(std::move(weights[i]));
    } else {
      x.weights_[it->second] += weights[i];
    }
  }
  if (prune) {
    std::vector<Polyhedron> fs;
    std::vector<Int> ws;
    for (size_t i = 0; i < x.facets_.size(); ++i)
      if (x.weights_[i] != 0) {
        fs.push_back(std::move(x.facets_[i]));
        ws.push_back(std::move(x.weights_[i]));
      }
    x.facets_ = std::move(fs);
    x.weights_ = std::move(ws);
  }
  return x;
}

WeightedComplex WeightedComplex::empty_cycle(int ambient, int dim) {
  WeightedComplex x;
  x.ambient_ = ambient;
  x.dim_ = dim;
  return x;
}

WeightedComplex WeightedComplex::full_space(int ambient) {
  return from_facets(ambient, ambient, {Polyhedron::full_space(ambient)}, {Int(1)});
}

bool WeightedComplex::is_fan() const {
  for (const auto& f : facets_)
    if (!f.is_cone()) return false;
  return true;
}

bool WeightedComplex::support_contains(const RatVec& x) const {
  for (const auto& f : facets_)
    if (f.contains(x)) return true;
  return false;
}

const std::vector<WeightedComplex::Ridge>& WeightedComplex::ridges() const {
  if (ridges_cache_) return *ridges_cache_;
  auto out = std::make_shared<std::vector<Ridge>>();
  std::map<std::string, size_t> index;
  for (size_t i = 0; i < facets_.size(); ++i)
    for (auto& r : facets_[i].facets()) {
      auto it = index.find(r.key());
      if (it == index.end()) {
        index.emplace(r.key(), out->size());
        out->push_back(Ridge{std::move(r), {static_cast<int>(i)}});
      } else {
        (*out)[it->second].facets.push_back(static_cast<int>(i));
      }
    }
  ridges_cache_ = std::move(out);
  return *ridges_cache_;
}

WeightedComplex::BalanceReport WeightedComplex::check_balanced() const {
  BalanceReport rep;
  const auto& rs = ridges();
  for (size_t t = 0; t < rs.size(); ++t) {
    const auto& ridge = rs[t];
    RatVec p = ridge.poly.relint_point();
    RatVec residue = RatVec::Zero(ambient_);
    for (int fi : ridge.facets) {
      IntVec v = primitive_vector(ridge.poly.dir_lattice(), facets_[fi].dir_lattice(),
                                  facets_[fi].relint_point() - p);
      residue += weights_[fi] * to_rat(v);
    }
    bool ok;
    if (ridge.poly.dir_lattice().rank() == 0)
      ok = residue.isZero();
    else
      ok = ridge.poly.dir_lattice().span_contains(residue);
    if (!ok) {
      rep.ok = false;
      rep.failures.push_back({static_cast<int>(t), residue});
    }
  }
  return rep;
}

WeightedComplex WeightedComplex::divisor(const PLFunction& phi, bool prune) const {
  if (phi.is_max_form()) {
    // refine along term-difference hyperplanes so phi is affine per cell
    std::vector<std::pair<RatVec, Rat>> hyps;
    const auto& terms = phi.max_form().terms;
    for (size_t i = 0; i < terms.size(); ++i)
      for (size_t j = i + 1; j < terms.size(); ++j) {
        RatVec a = terms[i].first - terms[j].first;
        if (a.isZero()) continue;
        hyps.push_back({a, terms[j].second - terms[i].second});
      }
    if (!hyps.empty()) return refined_by(hyps).divisor_impl(phi, prune);
  }
  return divisor_impl(phi, prune);
}

WeightedComplex WeightedComplex::divisor_impl(const PLFunction& phi, bool prune) const {
  std::vector<Polyhedron> cells;
  std::vector<Int> ws;
  for (const auto& ridge : ridges()) {
    RatVec p = ridge.poly.relint_point();
    RatVec phi_tau = phi.affine_on(facets_[ridge.facets[0]], ridge.facets[0]).first;
    Rat w = 0;
    RatVec vsum = RatVec::Zero(ambient_);
    for (int fi : ridge.facets) {
      IntVec v = primitive_vector(ridge.poly.dir_lattice(), facets_[fi].dir_lattice(),
                                  facets_[fi].relint_point() - p);
      RatVec cov = phi.affine_on(facets_[fi], fi).first;
      w += weights_[fi] * dot(cov, to_rat(v));
      vsum += weights_[fi] * to_rat(v);
    }
    w -= dot(phi_tau, vsum);
    if (w.get_den() != 1) throw std::logic_error("divisor: non-integer weight (non-integer slopes)");
    cells.push_back(ridge.poly);
    ws.push_back(w.get_num());
  }
  return from_facets(ambient_, dim_ - 1, std::move(cells), std::move(ws), prune);
}

WeightedComplex WeightedComplex::star(const Polyhedron& tau) const {
  return star_cones(tau).first;
}

std::pair<WeightedComplex, std::vector<int>> WeightedComplex::star_cones(
    const Polyhedron& tau) const {
  RatVec p = tau.relint_point();
  std::vector<int> incident;
  for (size_t i = 0; i < facets_.size(); ++i)
    if (facets_[i].contains(p)) incident.push_back(static_cast<int>(i));
  if (incident.empty()) throw std::invalid_argument("star: cell not in the complex");
  IntMat pi = quotient_projection(tau.dir_lattice());
  RatMat piq = to_rat(pi);
  int mq = static_cast<int>(pi.rows());
  std::vector<Polyhedron> cones;
  std::vector<Int> ws;
  for (int fi : incident) {
    const Polyhedron& s = facets_[fi];
    RatMat gen(s.vertices().rows() + s.rays().rows(), ambient_);
    for (int i = 0; i < s.vertices().rows(); ++i)
      gen.row(i) = s.vertices().row(i) - p.transpose();
    for (int i = 0; i < s.rays().rows(); ++i) gen.row(s.vertices().rows() + i) = s.rays().row(i);
    RatMat qrays = gen * piq.transpose();
    RatMat qlin = s.lineality() * piq.transpose();
    cones.push_back(Polyhedron::cone_from_rays(mq, qrays, qlin));
    ws.push_back(weights_[fi]);
  }
  int d = dim_ - tau.dim();
  return {from_facets(mq, d, std::move(cones), std::move(ws), false), incident};
}

std::pair<WeightedComplex, PLFunction> WeightedComplex::star_with_germ(
    const Polyhedron& tau, const PLFunction& phi) const {
  auto [fan, incident] = star_cones(tau);
  IntMat pi = quotient_projection(tau.dir_lattice());
  RatMat piT = to_rat(pi).transpose();
  RatVec a_tau = phi.affine_on(facets_[incident[0]], incident[0]).first;
  std::vector<std::pair<RatVec, Rat>> per;
  for (int fi : incident) {
    RatVec diff = phi.affine_on(facets_[fi], fi).first - a_tau;
    auto b = solve_consistent(piT, diff);
    if (!b) throw std::logic_error("germ: function not continuous across the cell");
    per.push_back({*b, Rat(0)});
  }
  return {fan, PLFunction::cell_affine(std::move(per))};
}

WeightedComplex WeightedComplex::product(const WeightedComplex& o) const {
  int m = ambient_ + o.ambient_;
  std::vector<Polyhedron> cells;
  std::vector<Int> ws;
  for (size_t i = 0; i < facets_.size(); ++i)
    for (size_t j = 0; j < o.facets_.size(); ++j) {
      cells.push_back(facets_[i].product(o.facets_[j]));
      ws.push_back(weights_[i] * o.weights_[j]);
    }
  return from_facets(m, dim_ + o.dim_, std::move(cells), std::move(ws));
}

WeightedComplex WeightedComplex::translate(const RatVec& v) const {
  std::vector<Polyhedron> cells;
  for (const auto& f : facets_) cells.push_back(f.translate(v));
  return from_facets(ambient_, dim_, std::move(cells), weights_, false);
}

WeightedComplex WeightedComplex::scaled(const Int& c) const {
  std::vector<Int> ws;
  for (const auto& w : weights_) ws.push_back(w * c);
  return from_facets(ambient_, dim_, facets_, std::move(ws));
}

WeightedComplex WeightedComplex::plus(const WeightedComplex& o) const {
  if (is_empty()) return o;
  if (o.is_empty()) return *this;
  if (ambient_ != o.ambient_ || dim_ != o.dim_)
    throw std::invalid_argument("plus: shape mismatch");
  std::vector<std::pair<Polyhedron, Int>> cells;
  for (size_t i = 0; i < facets_.size(); ++i) cells.push_back({facets_[i], weights_[i]});
  for (size_t i = 0; i < o.facets_.size(); ++i) cells.push_back({o.facets_[i], o.weights_[i]});
  return overlay(ambient_, dim_, cells);
}

WeightedComplex WeightedComplex::refined_by(
    const std::vector<std::pair<RatVec, Rat>>& hyperplanes) const {
  std::vector<Polyhedron> cells;
  std::vector<Int> ws;
  for (size_t i = 0; i < facets_.size(); ++i)
    for (auto& Q : refine_cell(facets_[i], hyperplanes, dim_)) {
      cells.push_back(std::move(Q));
      ws.push_back(weights_[i]);
    }
  return from_facets(ambient_, dim_, std::move(cells), std::move(ws), false);
}

WeightedComplex WeightedComplex::diagonal_intersection(const WeightedComplex& o) const {
  if (ambient_ != o.ambient_) throw std::invalid_argument("diagonal_intersection: ambient mismatch");
  int r = ambient_;
  int target = dim_ + o.dim_ - r;
  if (target < 0 || is_empty() || o.is_empty()) return empty_cycle(r, target);
  WeightedComplex z = product(o);
  for (int i = 0; i < r; ++i) {
    RatVec e1 = RatVec::Zero(2 * r), e2 = RatVec::Zero(2 * r);
    e1(i) = 1;
    e2(r + i) = 1;
    z = z.divisor(PLFunction::max_terms({{e1, Rat(0)}, {e2, Rat(0)}}));
    if (z.is_empty()) return empty_cycle(r, target);
  }
  CycleMorphism proj;
  proj.map = IntMat(IntMat::Zero(r, 2 * r));
  for (int i = 0; i < r; ++i) proj.map(i, i) = 1;
  WeightedComplex res = push_forward(proj, z);
  res.dim_ = target;
  return res;
}

WeightedComplex WeightedComplex::transversal_intersection(const WeightedComplex& o) const {
  if (ambient_ != o.ambient_)
    throw std::invalid_argument("transversal_intersection: ambient mismatch");
  int expected = dim_ + o.dim_ - ambient_;
  if (expected < 0) return empty_cycle(ambient_, expected);
  std::vector<Polyhedron> cells;
  std::vector<Int> ws;
  for (size_t i = 0; i < facets_.size(); ++i)
    for (size_t j = 0; j < o.facets_.size(); ++j) {
      Polyhedron q = facets_[i].intersect(o.facets_[j]);
      if (q.is_empty() || q.dim() < expected) continue;
      if (q.dim() > expected)
        throw std::invalid_argument("transversal_intersection: input not transversal");
      ExtNat idx = index_of_sum(facets_[i].dir_lattice(), o.facets_[j].dir_lattice());
      if (is_infinite(idx))
        throw std::invalid_argument("transversal_intersection: input not transversal");
      cells.push_back(std::move(q));
      ws.push_back(weights_[i] * o.weights_[j] * finite_value(idx));
    }
  return from_facets(ambient_, expected, std::move(cells), std::move(ws));
}

WeightedComplex WeightedComplex::recession_fan() const {
  std::vector<std::pair<Polyhedron, Int>> cells;
  for (size_t i = 0; i < facets_.size(); ++i) {
    Polyhedron rc = facets_[i].recession_cone();
    if (rc.dim() == dim_) cells.push_back({std::move(rc), weights_[i]});
  }
  if (cells.empty()) return empty_cycle(ambient_, dim_);
  return overlay(ambient_, dim_, cells);
}

Rat WeightedComplex::degree0() const {
  if (is_empty()) return 0;
  if (dim_ != 0) throw std::invalid_argument("degree0: cycle not zero-dimensional");
  Rat s = 0;
  for (const auto& w : weights_) s += w;
  return s;
}

bool WeightedComplex::equals_up_to_refinement(const WeightedComplex& o) const {
  if (is_empty() && o.is_empty()) return true;
  if (is_empty() != o.is_empty()) return false;
  if (ambient_ != o.ambient_ || dim_ != o.dim_) return false;
  auto covered = [](const WeightedComplex& x, const WeightedComplex& y) {
    std::vector<Polyhedron> ycells(y.facets_.begin(), y.facets_.end());
    auto hyps = collect_hyperplanes(ycells);
    for (size_t i = 0; i < x.facets_.size(); ++i)
      for (const auto& Q : refine_cell(x.facets_[i], hyps, x.dim_)) {
        RatVec p = Q.relint_point();
        Int wy = 0;
        for (size_t j = 0; j < y.facets_.size(); ++j)
          if (y.facets_[j].contains(p)) wy += y.weights_[j];
        if (wy != x.weights_[i]) return false;
      }
    return true;
  };
  return covered(*this, o) && covered(o, *this);
}

std::vector<Polyhedron> WeightedComplex::cells_of_dim(int k) const {
  std::map<std::string, Polyhedron> level;
  for (const auto& f : facets_) level.emplace(f.key(), f);
  int cur = dim_;
  while (cur > k) {
    std::map<std::string, Polyhedron> next;
    for (const auto& [key, P] : level)
      for (auto& face : P.facets()) next.emplace(face.key(), std::move(face));
    level = std::move(next);
    --cur;
  }
  std::vector<Polyhedron> out;
  for (auto& [key, P] : level) out.push_back(std::move(P));
  return out;
}

// ---------------------------------------------------------------------------
// morphisms

RatVec CycleMorphism::t_or_zero(int rows) const {
  if (translation.size() == rows) return translation;
  return RatVec::Zero(rows);
}

WeightedComplex push_forward(const CycleMorphism& f, const WeightedComplex& z) {
  int m = static_cast<int>(f.map.rows());
  int d = z.dim();
  RatMat A = to_rat(f.map);
  RatVec t = f.t_or_zero(m);
  std::vector<std::pair<Polyhedron, Int>> cells;
  for (int i = 0; i < z.facet_count(); ++i) {
    Polyhedron img = z.facet(i).affine_image(A, t);
    if (img.dim() < d) continue; // measure-zero image: contributes nothing
    IntMat gens = z.facet(i).dir_lattice().basis * f.map.transpose();
    ExtNat idx = sublattice_index(img.dir_lattice(), gens);
    if (is_infinite(idx)) throw std::logic_error("push_forward: index infinite at full dimension");
    cells.push_back({std::move(img), z.weight(i) * finite_value(idx)});
  }
  if (cells.empty()) return WeightedComplex::empty_cycle(m, d);
  return overlay(m, d, cells);
}

PLFunction pull_back(const CycleMorphism& f, const PLFunction& phi) {
  if (!phi.is_max_form()) throw std::invalid_argument("pull_back: need max form (use pull_back_on)");
  RatMat A = to_rat(f.map);
  RatVec t = f.t_or_zero(static_cast<int>(f.map.rows()));
  std::vector<std::pair<RatVec, Rat>> terms;
  for (const auto& [a, c] : phi.max_form().terms)
    terms.push_back({A.transpose() * a, dot(a, t) + c});
  return PLFunction::max_terms(std::move(terms));
}

PLFunction pull_back_on(const CycleMorphism& f, const PLFunction& phi,
                        const WeightedComplex& domain, const WeightedComplex& codomain) {
  RatMat A = to_rat(f.map);
  RatVec t = f.t_or_zero(static_cast<int>(f.map.rows()));
  std::vector<std::pair<RatVec, Rat>> per;
  for (int i = 0; i < domain.facet_count(); ++i) {
    RatVec y = A * domain.facet(i).relint_point() + t;
    int j = -1;
    for (int k = 0; k < codomain.facet_count(); ++k)
      if (codomain.facet(k).contains(y)) {
        j = k;
        break;
      }
    if (j < 0) throw std::invalid_argument("pull_back_on: image outside codomain support");
    auto [a, c] = phi.affine_on(codomain.facet(j), j);
    per.push_back({A.transpose() * a, dot(a, t) + c});
  }
  return PLFunction::cell_affine(std::move(per));
}

WeightedComplex random_translation(const WeightedComplex& x, uint64_t seed) {
  Rng rng(seed);
  RatVec v(x.ambient_dim());
  for (int i = 0; i < x.ambient_dim(); ++i) v(i) = rng.rat16();
  return x.translate(v);
}

bool is_convex_on(const PLFunction& phi, const WeightedComplex& x) {
  for (const auto& ridge : x.ridges()) {
    if (ridge.facets.size() < 2) continue;
    int s = static_cast<int>(ridge.facets.size());
    RatVec p = ridge.poly.relint_point();
    std::vector<RatVec> vs;
    std::vector<Rat> gs;
    RatVec a0 = phi.affine_on(x.facet(ridge.facets[0]), ridge.facets[0]).first;
    for (int fi : ridge.facets) {
      IntVec v = primitive_vector(ridge.poly.dir_lattice(), x.facet(fi).dir_lattice(),
                                  x.facet(fi).relint_point() - p);
      RatVec cov = phi.affine_on(x.facet(fi), fi).first;
      vs.push_back(to_rat(v));
      gs.push_back(dot(cov - a0, to_rat(v)));
    }
    // positive relations: lambda >= 0 with sum lambda_i v_i inside the
    // ridge's span; convexity means sum lambda_i g_i >= 0 on that cone
    RatMat K = kernel_basis(ridge.poly.direction_span());
    std::vector<RatVec> ineqs, eqs;
    for (int i = 0; i < s; ++i) {
      RatVec e = RatVec::Zero(s);
      e(i) = 1;
      ineqs.push_back(e);
    }
    for (int r = 0; r < K.rows(); ++r) {
      RatVec eq(s);
      for (int i = 0; i < s; ++i) eq(i) = dot(K.row(r).transpose(), vs[i]);
      eqs.push_back(eq);
    }
    ConeVRep vr = dd_cone(ineqs, eqs, s);
    for (const auto& lam : vr.rays) {
      Rat total = 0;
      for (int i = 0; i < s; ++i) total += lam(i) * gs[i];
      if (total < 0) return false;
    }
  }
  return true;
}

WeightedComplex fan_displacement_product(const WeightedComplex& c, const WeightedComplex& c2,
                                         const WeightedComplex& theta, uint64_t seed,
                                         int max_attempts) {
  const int r = theta.ambient_dim();
  if (c.ambient_dim() != r || c2.ambient_dim() != r)
    throw std::invalid_argument("fan_displacement_product: ambient mismatch");
  if (!c.is_fan() || !c2.is_fan() || !theta.is_fan())
    throw std::invalid_argument("fan_displacement_product: fan input required");
  int target = c.dim() + c2.dim() - r;
  if (target < 0 || c.is_empty() || c2.is_empty())
    return WeightedComplex::empty_cycle(r, target);
  Rng rng(seed);
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    RatVec v(r);
    for (int i = 0; i < r; ++i) v(i) = rng.rat16();
    // transversality of every incidence between support cones
    bool generic = true;
    std::vector<std::vector<bool>> meets(c.facet_count(),
                                         std::vector<bool>(c2.facet_count(), false));
    std::vector<std::vector<Int>> idx(c.facet_count(), std::vector<Int>(c2.facet_count(), 0));
    for (int i = 0; i < c.facet_count() && generic; ++i)
      for (int j = 0; j < c2.facet_count() && generic; ++j) {
        Polyhedron q = c.facet(i).translate(v).intersect(c2.facet(j));
        if (q.is_empty()) continue;
        if (q.dim() != c.facet(i).dim() + c2.facet(j).dim() - r) {
          generic = false;
          break;
        }
        ExtNat e = index_of_sum(c.facet(i).dir_lattice(), c2.facet(j).dir_lattice());
        if (is_infinite(e)) {
          generic = false;
          break;
        }
        meets[i][j] = true;
        idx[i][j] = finite_value(e);
      }
    if (!generic) continue;
    std::vector<Polyhedron> taus = theta.cells_of_dim(target);
    std::vector<Int> ws(taus.size(), 0);
    for (size_t t = 0; t < taus.size(); ++t) {
      RatVec p = taus[t].relint_point();
      for (int i = 0; i < c.facet_count(); ++i) {
        if (!c.facet(i).contains(p)) continue;
        for (int j = 0; j < c2.facet_count(); ++j) {
          if (!meets[i][j] || !c2.facet(j).contains(p)) continue;
          ws[t] += c.weight(i) * c2.weight(j) * idx[i][j];
        }
      }
    }
    return WeightedComplex::from_facets(r, target, std::move(taus), std::move(ws));
  }
  throw std::runtime_error("fan_displacement_product: no generic displacement found");
}

} // namespace tropgw
