#include "tropgw/parmod.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

namespace tropgw {

// ---------------------------------------------------------------------------
// degrees

Degree make_degree(std::vector<std::string> labels, std::vector<IntVec> dirs) {
  if (labels.size() != dirs.size())
    throw std::invalid_argument("make_degree: label/direction count mismatch");
  std::vector<int> order(labels.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return labels[a] < labels[b]; });
  Degree d;
  for (int i : order) {
    if (!d.labels.empty() && d.labels.back() == labels[i])
      throw std::invalid_argument("make_degree: duplicate label " + labels[i]);
    d.labels.push_back(std::move(labels[i]));
    d.dirs.push_back(std::move(dirs[i]));
  }
  if (!d.dirs.empty()) {
    IntVec sum = IntVec::Zero(d.dirs[0].size());
    for (const IntVec& v : d.dirs) {
      if (v.size() != sum.size())
        throw std::invalid_argument("make_degree: mixed ambient dimensions");
      if (v.isZero()) throw std::invalid_argument("make_degree: zero direction");
      sum += v;
    }
    if (!sum.isZero()) throw std::invalid_argument("make_degree: directions do not sum to zero");
  }
  return d;
}

Degree degree_of_directions(const std::vector<std::pair<IntVec, int>>& dirs_counts) {
  std::vector<std::string> labels;
  std::vector<IntVec> dirs;
  int next = 1;
  for (const auto& [v, c] : dirs_counts)
    for (int i = 0; i < c; ++i) {
      char buf[16];
      std::snprintf(buf, sizeof buf, "d%03d", next++);
      labels.push_back(buf);
      dirs.push_back(v);
    }
  return make_degree(std::move(labels), std::move(dirs));
}

Degree projective_degree(int d, int r) {
  if (d < 1 || r < 1) throw std::invalid_argument("projective_degree: need d, r >= 1");
  IntVec e0 = IntVec::Constant(r, -1);
  std::vector<std::pair<IntVec, int>> dc;
  dc.push_back({e0, d});
  for (int i = 0; i < r; ++i) {
    IntVec ei = IntVec::Zero(r);
    ei(i) = 1;
    dc.push_back({ei, d});
  }
  return degree_of_directions(dc);
}

namespace {
std::string dir_key(const IntVec& v) {
  std::string s;
  for (int i = 0; i < v.size(); ++i) s += v(i).get_str() + ",";
  return s;
}
} // namespace

Int degree_factorial(const Degree& d) {
  std::map<std::string, int> counts;
  for (const IntVec& v : d.dirs) counts[dir_key(v)]++;
  Int out = 1;
  for (const auto& [k, c] : counts) out *= factorial_int(c);
  return out;
}

WeightedComplex delta_of_degree(const Degree& d) {
  const int r = d.r();
  std::map<std::string, std::pair<IntVec, Int>> rays; // primitive -> weight
  for (const IntVec& v : d.dirs) {
    IntVec p = v;
    Int c = content(p);
    for (int i = 0; i < p.size(); ++i) p(i) /= c;
    auto [it, fresh] = rays.try_emplace(dir_key(p), std::pair<IntVec, Int>{p, 0});
    it->second.second += c;
  }
  std::vector<Polyhedron> facets;
  std::vector<Int> weights;
  for (const auto& [k, rw] : rays) {
    RatMat ray(1, r);
    ray.row(0) = to_rat(rw.first).transpose();
    facets.push_back(Polyhedron::cone_from_rays(r, ray, RatMat(0, r)));
    weights.push_back(rw.second);
  }
  return WeightedComplex::from_facets(r, 1, std::move(facets), std::move(weights));
}

Rat h_dot_degree(const PLFunction& h, const Degree& d) {
  return delta_of_degree(d).divisor(h).degree0();
}

std::optional<std::pair<Degree, Degree>> split_degree(const Degree& d,
                                                      const std::vector<bool>& in_first) {
  if (static_cast<int>(in_first.size()) != d.count())
    throw std::invalid_argument("split_degree: side vector size mismatch");
  const int r = d.r();
  IntVec sum = IntVec::Zero(std::max(r, 1));
  for (int i = 0; i < d.count(); ++i)
    if (in_first[i]) sum += d.dirs[i];
  if (!sum.isZero()) return std::nullopt;
  Degree a, b;
  for (int i = 0; i < d.count(); ++i) {
    Degree& side = in_first[i] ? a : b;
    side.labels.push_back(d.labels[i]);
    side.dirs.push_back(d.dirs[i]);
  }
  return std::make_pair(std::move(a), std::move(b));
}

nlohmann::json degree_to_json(const Degree& d) {
  nlohmann::json j;
  j["labels"] = d.labels;
  nlohmann::json dirs = nlohmann::json::object();
  for (int i = 0; i < d.count(); ++i) {
    std::vector<long> v(d.dirs[i].size());
    for (int c = 0; c < d.dirs[i].size(); ++c) v[c] = d.dirs[i](c).get_si();
    dirs[d.labels[i]] = v;
  }
  j["dirs"] = std::move(dirs);
  return j;
}

Degree degree_from_json(const nlohmann::json& j) {
  std::vector<std::string> labels = j.at("labels").get<std::vector<std::string>>();
  std::vector<IntVec> dirs;
  for (const std::string& l : labels) {
    const auto& arr = j.at("dirs").at(l);
    IntVec v(arr.size());
    for (size_t c = 0; c < arr.size(); ++c) v(c) = Int(arr[c].get<long>());
    dirs.push_back(std::move(v));
  }
  return make_degree(std::move(labels), std::move(dirs));
}

// ---------------------------------------------------------------------------
// the parametrized space

IntVec ParamSpace::dir_of(int label) const {
  if (label < n) return IntVec::Zero(r());
  return deg.dirs[label - n];
}

IntVec ParamSpace::v_of_side(uint32_t mask) const {
  IntVec sum = IntVec::Zero(r());
  for (int i = 0; i < deg.count(); ++i)
    if (mask & (1u << (n + i))) sum += deg.dirs[i];
  return sum;
}

bool ParamSpace::reducible(const Partition& p) const {
  return v_of_side(p.mask).isZero();
}

EvalMap eval_map(const ModuliFan& m, const ParamSpace& s, int k) {
  if (m.n != s.total()) throw std::invalid_argument("eval_map: fan size mismatch");
  if (k < 0 || k >= s.n) throw std::invalid_argument("eval_map: not a marked leaf");
  const int a = s.anchor;
  const int d = static_cast<int>(m.basis.rows());
  const int r = s.r();
  const int nr = static_cast<int>(m.ray_partitions.size());
  // per-ray displacement: (direction of the k-side) when the edge separates
  // the anchor from k, zero otherwise
  RatMat X(nr, d);
  RatMat Y(nr, r);
  for (int i = 0; i < nr; ++i) {
    X.row(i) = to_rat(m.ray_coords[i]).transpose();
    const Partition& p = m.ray_partitions[i];
    if (p.separates(a, k))
      Y.row(i) = to_rat(s.v_of_side(p.side_of(k))).transpose();
    else
      Y.row(i).setZero();
  }
  EvalMap e;
  e.k = k;
  e.anchor = a;
  e.section = RatMat(r, d);
  for (int c = 0; c < r; ++c) {
    auto sol = solve_consistent(X, Y.col(c));
    if (!sol) throw std::logic_error("eval_map: ray displacements not linear");
    e.section.row(c) = sol->transpose();
  }
  return e;
}

RatVec eval_apply(const ParamSpace& s, int k, const ParamCurve& c) {
  RatVec out = c.anchor_pos;
  for (size_t i = 0; i < c.tree.edges.size(); ++i) {
    const Partition& p = c.tree.edges[i];
    if (!p.separates(s.anchor, k)) continue;
    out += c.tree.lengths.at(i) * to_rat(s.v_of_side(p.side_of(k)));
  }
  return out;
}

RatVec eval_apply_linear(const EvalMap& e, const RatVec& section_point, const RatVec& pos) {
  return (e.section * section_point + pos).eval();
}

CycleMorphism eval_morphism(const EvalMap& e) {
  const int d = static_cast<int>(e.section.cols());
  const int r = static_cast<int>(e.section.rows());
  CycleMorphism f;
  f.map = IntMat(r, d + r);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < d; ++j) {
      if (e.section(i, j).get_den() != 1)
        throw std::logic_error("eval_morphism: non-integer linear part");
      f.map(i, j) = e.section(i, j).get_num();
    }
    for (int j = 0; j < r; ++j) f.map(i, d + j) = (i == j) ? 1 : 0;
  }
  return f;
}

// ---------------------------------------------------------------------------
// psi-products

PsiProductFan psi_product_param(const ParamSpace& s, const std::vector<int>& a) {
  if (static_cast<int>(a.size()) != s.n)
    throw std::invalid_argument("psi_product_param: exponent count != marks");
  std::vector<int> ext(a);
  ext.resize(s.total(), 0);
  return psi_product(s.total(), ext);
}

WeightedComplex psi_product_param_complex(const ModuliFan& m, const ParamSpace& s,
                                          const PsiProductFan& f) {
  return psi_product_complex(m, f).product(WeightedComplex::full_space(s.r()));
}

// ---------------------------------------------------------------------------
// identity suite on the product fans

SuiteReport map_equations_suite(const ParamSpace& s) {
  SuiteReport rep;
  auto run = [&rep](const std::string& name, auto&& fn) {
    bool ok;
    try {
      ok = fn();
    } catch (const std::exception&) {
      ok = false;
    }
    rep.checks.push_back({name, ok});
  };
  const int N = s.total();
  if (N > 5) throw std::invalid_argument("map_equations_suite: needs n + #degree <= 5");
  if (N < 4) throw std::invalid_argument("map_equations_suite: needs n + #degree >= 4");
  const int r = s.r();
  // extra leaf x_0 carries the top abstract label N; marks 0..n-1
  ModuliFan M1 = embed_moduli_fan(N + 1);
  ModuliFan M0 = embed_moduli_fan(N);
  const int x0 = N;
  const int d1 = M1.fan.ambient_dim();
  const int d0 = M0.fan.ambient_dim();
  WeightedComplex Rr = WeightedComplex::full_space(r);
  WeightedComplex E1 = M1.fan.product(Rr);
  WeightedComplex E0 = M0.fan.product(Rr);
  CycleMorphism ft_abs = forgetful_map(M1, M0, x0);
  // the forgetful map and the two projections on the product structures
  CycleMorphism ft, pr1, pr0;
  ft.map = IntMat::Zero(d0 + r, d1 + r);
  ft.map.topLeftCorner(d0, d1) = ft_abs.map;
  ft.map.bottomRightCorner(r, r) = IntMat::Identity(r, r);
  pr1.map = IntMat::Zero(d1, d1 + r);
  pr1.map.leftCols(d1) = IntMat::Identity(d1, d1);
  pr0.map = IntMat::Zero(d0, d0 + r);
  pr0.map.leftCols(d0) = IntMat::Identity(d0, d0);
  auto on1 = [&](const PLFunction& f) { return pull_back_on(pr1, f, E1, M1.fan); };
  auto on0 = [&](const PLFunction& f) { return pull_back_on(pr0, f, E0, M0.fan); };
  auto phi1 = [&](std::initializer_list<int> side) {
    uint32_t m = 0;
    for (int i : side) m |= 1u << i;
    return phi_function(M1, Partition(N + 1, m));
  };
  auto phi0 = [&](int i, int j) {
    return phi_function(M0, Partition(N, (1u << i) | (1u << j)));
  };

  {
    run("(a) phi_ij.phi_ik = 0", [&] {
      WeightedComplex A = E0.divisor(on0(phi0(0, 1)));
      return A.divisor(pull_back_on(pr0, phi0(0, 2), A, M0.fan)).is_empty();
    });
    run("(b) phi_ij.psi_i = 0", [&] {
      WeightedComplex A = E0.divisor(on0(phi0(0, 1)));
      return A.divisor(pull_back_on(pr0, psi_function(M0, 0), A, M0.fan)).is_empty();
    });
  }
  run("(c) div(psi_k) = div(ft*psi_k) + div(phi_0k)", [&] {
    int k = 0;
    PLFunction pulled = pull_back_on(ft, on0(psi_function(M0, k)), E1, E0);
    WeightedComplex lhs = E1.divisor(on1(psi_function(M1, k)));
    WeightedComplex rhs = E1.divisor(pulled).plus(E1.divisor(on1(phi1({x0, k}))));
    return lhs.equals_up_to_refinement(rhs);
  });
  run("(d) phi_0k^2 = -ft*(psi_k).phi_0k", [&] {
    int k = 0;
    WeightedComplex A = E1.divisor(on1(phi1({x0, k})));
    PLFunction pulled = pull_back_on(ft, on0(psi_function(M0, k)), A, E0);
    PLFunction again = pull_back_on(pr1, phi1({x0, k}), A, M1.fan);
    return A.divisor(again).equals_up_to_refinement(A.divisor(pulled).scaled(Int(-1)));
  });
  if (N >= 4) {
    run("(e) psi_k^2 = ft*(psi_k)^2 + ft*(psi_k).phi_0k", [&] {
      int k = 0;
      WeightedComplex P = E1.divisor(on1(psi_function(M1, k)));
      WeightedComplex lhs = P.divisor(pull_back_on(pr1, psi_function(M1, k), P, M1.fan));
      PLFunction fpsi = pull_back_on(ft, on0(psi_function(M0, k)), E1, E0);
      WeightedComplex t1 = E1.divisor(fpsi);
      WeightedComplex rhs = t1.divisor(pull_back_on(ft, on0(psi_function(M0, k)), t1, E0))
                                .plus(t1.divisor(pull_back_on(pr1, phi1({x0, k}), t1, M1.fan)));
      return lhs.equals_up_to_refinement(rhs);
    });
    run("(f) psi_k^2 = ft*(psi_k)^2 - phi_0k^2", [&] {
      int k = 0;
      WeightedComplex P = E1.divisor(on1(psi_function(M1, k)));
      WeightedComplex lhs = P.divisor(pull_back_on(pr1, psi_function(M1, k), P, M1.fan));
      PLFunction fpsi = pull_back_on(ft, on0(psi_function(M0, k)), E1, E0);
      WeightedComplex t1 = E1.divisor(fpsi);
      WeightedComplex sq1 = t1.divisor(pull_back_on(ft, on0(psi_function(M0, k)), t1, E0));
      WeightedComplex ph = E1.divisor(on1(phi1({x0, k})));
      WeightedComplex sq2 = ph.divisor(pull_back_on(pr1, phi1({x0, k}), ph, M1.fan));
      return lhs.equals_up_to_refinement(sq1.plus(sq2.scaled(Int(-1))));
    });
  }
  run("(g) ft_*(div phi_0k) = ft_*(div psi_k) = M", [&] {
    int k = 0;
    bool first = push_forward(ft, E1.divisor(on1(phi1({x0, k})))).equals_up_to_refinement(E0);
    bool second = push_forward(ft, E1.divisor(on1(psi_function(M1, k)))).equals_up_to_refinement(E0);
    return first && second;
  });
  run("(h) ft_*(div phi_I|J) = M iff a side is {x0, mark}", [&] {
    int k = 0;
    bool mark_side =
        push_forward(ft, E1.divisor(on1(phi1({x0, k})))).equals_up_to_refinement(E0);
    bool big_side = push_forward(ft, E1.divisor(on1(phi1({x0, 0, 1})))).is_empty();
    return mark_side && big_side;
  });
  run("(i) psi as boundary over all partitions", [&] {
    // div(psi_0) = sum of div(phi_I|J), 0 in I and two fixed leaves in J,
    // irreducible partitions included
    WeightedComplex sum = WeightedComplex::empty_cycle(d0 + r, N - 4 + r);
    for (const auto& p : M0.ray_partitions) {
      if (!((p.mask & 1) && !p.separates(1, 2) && p.separates(0, 1))) continue;
      sum = sum.plus(E0.divisor(on0(phi_function(M0, p))));
    }
    return E0.divisor(on0(psi_function(M0, 0))).equals_up_to_refinement(sum);
  });
  run("(j) ft_*(div psi_x0) = (n+#degree-2) M", [&] {
    return push_forward(ft, E1.divisor(on1(psi_function(M1, x0))))
        .equals_up_to_refinement(E0.scaled(Int(N - 2)));
  });
  return rep;
}

} // namespace tropgw
