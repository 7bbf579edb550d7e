#include "tropgw/modcurves.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <sstream>

namespace tropgw {

Int factorial_int(int k) {
  Int f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

Int binomial_int(int n, int k) {
  if (k < 0 || k > n) return 0;
  Int b = 1;
  for (int i = 0; i < k; ++i) {
    b *= (n - i);
    b /= (i + 1);
  }
  return b;
}

// ---------------------------------------------------------------------------
// Partition

Partition::Partition(int n_, uint32_t side) : n(n_) {
  uint32_t full = full_mask(n_);
  side &= full;
  if (side == 0 || side == full) throw std::invalid_argument("Partition: a side is empty");
  mask = (side & 1) ? side : (full & ~side);
}

int Partition::size_zero_side() const { return std::popcount(mask); }

bool Partition::separates(int k, int l) const {
  return (((mask >> k) ^ (mask >> l)) & 1) != 0;
}

bool Partition::is_bounded_edge() const {
  int s = std::popcount(mask);
  return s >= 2 && n - s >= 2;
}

bool Partition::compatible(const Partition& o) const {
  // both stored sides contain label 0: nested one way or jointly covering
  return (mask & o.mask) == mask || (mask & o.mask) == o.mask ||
         (mask | o.mask) == full_mask(n);
}

bool Partition::operator<(const Partition& o) const {
  int a = std::popcount(mask), b = std::popcount(o.mask);
  if (a != b) return a < b;
  return mask < o.mask;
}

std::string Partition::to_string() const {
  std::ostringstream os;
  for (int i = 0; i < n; ++i)
    if ((mask >> i) & 1) os << (i + 1);
  os << "|";
  for (int i = 0; i < n; ++i)
    if (!((mask >> i) & 1)) os << (i + 1);
  return os.str();
}

bool MarkedTree::compatible() const {
  for (size_t i = 0; i < edges.size(); ++i) {
    if (!edges[i].is_bounded_edge()) return false;
    for (size_t j = i + 1; j < edges.size(); ++j) {
      if (edges[i] == edges[j]) return false;
      if (!edges[i].compatible(edges[j])) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// tree structure: the sides away from label 0 form a laminar family

namespace {

struct Laminar {
  // cluster index per edge (side not containing 0), parent -1 = root
  std::vector<uint32_t> clusters;
  std::vector<int> parent;
  std::vector<std::vector<int>> children;
  std::vector<int> root_children;
};

Laminar laminar_of(const MarkedTree& t) {
  Laminar lam;
  for (const auto& e : t.edges) lam.clusters.push_back(e.other());
  size_t m = lam.clusters.size();
  lam.parent.assign(m, -1);
  lam.children.assign(m, {});
  for (size_t i = 0; i < m; ++i) {
    int best = -1;
    for (size_t j = 0; j < m; ++j) {
      if (i == j) continue;
      if ((lam.clusters[i] & lam.clusters[j]) != lam.clusters[i]) continue;
      if (lam.clusters[j] == lam.clusters[i]) continue;
      if (best < 0 || (lam.clusters[j] & lam.clusters[best]) == lam.clusters[j])
        best = static_cast<int>(j);
    }
    lam.parent[i] = best;
    if (best >= 0)
      lam.children[best].push_back(static_cast<int>(i));
    else
      lam.root_children.push_back(static_cast<int>(i));
  }
  return lam;
}

} // namespace

std::vector<TreeVertex> tree_vertices(const MarkedTree& t) {
  Laminar lam = laminar_of(t);
  uint32_t full = Partition::full_mask(t.n);
  std::vector<TreeVertex> out;
  // one vertex per cluster (its top end) plus the root vertex at label 0
  for (size_t i = 0; i < lam.clusters.size(); ++i) {
    TreeVertex v;
    v.branches.push_back(full & ~lam.clusters[i]); // toward the root
    uint32_t used = 0;
    for (int c : lam.children[i]) {
      v.branches.push_back(lam.clusters[c]);
      used |= lam.clusters[c];
    }
    uint32_t direct = lam.clusters[i] & ~used;
    for (int l = 0; l < t.n; ++l)
      if ((direct >> l) & 1) v.leaves.push_back(l);
    out.push_back(std::move(v));
  }
  TreeVertex root;
  uint32_t used = 0;
  for (int c : lam.root_children) {
    root.branches.push_back(lam.clusters[c]);
    used |= lam.clusters[c];
  }
  uint32_t direct = full & ~used;
  for (int l = 0; l < t.n; ++l)
    if ((direct >> l) & 1) root.leaves.push_back(l);
  out.push_back(std::move(root));
  return out;
}

std::vector<Partition> all_bounded_partitions(int n) {
  std::vector<Partition> out;
  uint32_t full = Partition::full_mask(n);
  for (uint32_t m = 1; m <= full; m += 2) { // label 0 always on the stored side
    if ((m & ~full) != 0) continue;
    int s = std::popcount(m);
    if (s < 2 || n - s < 2) continue;
    Partition p;
    p.n = n;
    p.mask = m;
    out.push_back(p);
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

void extend_types(const std::vector<Partition>& all, size_t start, int remaining,
                  std::vector<Partition>& cur, std::vector<MarkedTree>& out, int n) {
  if (remaining == 0) {
    MarkedTree t;
    t.n = n;
    t.edges = cur;
    out.push_back(std::move(t));
    return;
  }
  for (size_t i = start; i < all.size(); ++i) {
    bool ok = true;
    for (const auto& e : cur)
      if (!all[i].compatible(e)) {
        ok = false;
        break;
      }
    if (!ok) continue;
    cur.push_back(all[i]);
    extend_types(all, i + 1, remaining - 1, cur, out, n);
    cur.pop_back();
  }
}

} // namespace

std::vector<MarkedTree> enumerate_types(int n, int dim) {
  if (n < 3 || dim < 0 || dim > n - 3) throw std::invalid_argument("enumerate_types: bad dim");
  auto all = all_bounded_partitions(n);
  std::vector<MarkedTree> out;
  std::vector<Partition> cur;
  extend_types(all, 0, dim, cur, out, n);
  return out;
}

IntVec v_vector(const Partition& p) {
  int n = p.n;
  IntVec v(n * (n - 1) / 2);
  int idx = 0;
  for (int k = 0; k < n; ++k)
    for (int l = k + 1; l < n; ++l) v(idx++) = p.separates(k, l) ? 1 : 0;
  return v;
}

// ---------------------------------------------------------------------------
// the embedded moduli fan

ModuliFan embed_moduli_fan(int n) {
  if (n < 4) throw std::invalid_argument("embed_moduli_fan: need n >= 4");
  const int C = n * (n - 1) / 2;
  // the double-distance sublattice spanned by the leaf vectors
  RatMat leaf_span(n, C);
  for (int a = 0; a < n; ++a) {
    Partition leaf;
    leaf.n = n;
    leaf.mask = (a == 0) ? 1u : (Partition::full_mask(n) & ~(1u << a));
    leaf_span.row(a) = to_rat(v_vector(leaf)).transpose();
  }
  Sublattice imphi = saturated_lattice(C, leaf_span);
  IntMat q = quotient_projection(imphi);

  ModuliFan m;
  m.n = n;
  m.quotient = q;
  m.ray_partitions = all_bounded_partitions(n);
  IntMat w(m.ray_partitions.size(), q.rows());
  for (size_t i = 0; i < m.ray_partitions.size(); ++i)
    w.row(i) = (q * v_vector(m.ray_partitions[i])).transpose();
  m.basis = hermite_basis(w);
  const int d = static_cast<int>(m.basis.rows());
  RatMat BT = to_rat(m.basis).transpose();
  for (size_t i = 0; i < m.ray_partitions.size(); ++i) {
    IntVec wi = w.row(i).transpose();
    auto sol = solve_consistent(BT, to_rat(wi));
    if (!sol) throw std::logic_error("embed_moduli_fan: ray outside section lattice");
    IntVec c(d);
    for (int j = 0; j < d; ++j) {
      if ((*sol)(j).get_den() != 1)
        throw std::logic_error("embed_moduli_fan: non-integer ray coordinate");
      c(j) = (*sol)(j).get_num();
    }
    if (content(c) != 1) throw std::logic_error("embed_moduli_fan: ray not primitive");
    m.ray_coords.push_back(std::move(c));
  }
  std::vector<Polyhedron> cones;
  std::vector<Int> ws;
  for (const auto& t : enumerate_types(n, n - 3)) {
    cones.push_back(m.type_cone(t.edges));
    ws.push_back(1);
  }
  m.fan = WeightedComplex::from_facets(d, n - 3, std::move(cones), std::move(ws), false);
  return m;
}

int ModuliFan::ray_index(const Partition& p) const {
  for (size_t i = 0; i < ray_partitions.size(); ++i)
    if (ray_partitions[i] == p) return static_cast<int>(i);
  throw std::invalid_argument("ModuliFan: unknown partition " + p.to_string());
}

RatVec ModuliFan::tree_point(const MarkedTree& t) const {
  RatVec p = RatVec::Zero(fan.ambient_dim());
  for (size_t i = 0; i < t.edges.size(); ++i)
    p += t.lengths.at(i) * to_rat(ray_coords[ray_index(t.edges[i])]);
  return p;
}

Polyhedron ModuliFan::type_cone(const std::vector<Partition>& edges) const {
  int d = static_cast<int>(basis.rows());
  RatMat rays(edges.size(), d);
  for (size_t i = 0; i < edges.size(); ++i)
    rays.row(i) = to_rat(ray_coords[ray_index(edges[i])]).transpose();
  return Polyhedron::cone_from_rays(d, rays, RatMat(0, d));
}

PLFunction phi_function(const ModuliFan& m, const Partition& p) {
  std::vector<std::pair<IntVec, Rat>> vals;
  for (size_t i = 0; i < m.ray_partitions.size(); ++i)
    vals.push_back({m.ray_coords[i], m.ray_partitions[i] == p ? Rat(1) : Rat(0)});
  return PLFunction::ray_values(std::move(vals));
}

Rat psi_value(int k, const Partition& p) {
  int n = p.n;
  int s = n - std::popcount(p.side_of(k)); // size of the side away from k
  return Rat(s * (s - 1)) / Rat((n - 1) * (n - 2));
}

PLFunction psi_function(const ModuliFan& m, int k) {
  std::vector<std::pair<IntVec, Rat>> vals;
  for (size_t i = 0; i < m.ray_partitions.size(); ++i)
    vals.push_back({m.ray_coords[i], psi_value(k, m.ray_partitions[i])});
  return PLFunction::ray_values(std::move(vals));
}

std::optional<RidgeType> ridge_type(const MarkedTree& t) {
  auto vs = tree_vertices(t);
  RidgeType r;
  int found = 0;
  for (const auto& v : vs) {
    if (v.valence() == 4) {
      ++found;
      int i = 0;
      for (uint32_t b : v.branches) r.parts[i++] = b;
      for (int l : v.leaves) r.parts[i++] = 1u << l;
    } else if (v.valence() != 3) {
      return std::nullopt;
    }
  }
  if (found != 1) return std::nullopt;
  r.edges = t.edges;
  return r;
}

int boundary_divisor_weight(const Partition& p, const RidgeType& r) {
  uint32_t I = p.mask, J = p.other();
  for (int i = 0; i < 4; ++i) {
    if (I == r.parts[i] || J == r.parts[i]) return -1;
    for (int j = i + 1; j < 4; ++j) {
      uint32_t u = r.parts[i] | r.parts[j];
      if (I == u || J == u) return 1;
    }
  }
  return 0;
}

PsiProductFan psi_product(int n, const std::vector<int>& a) {
  if (static_cast<int>(a.size()) != n) throw std::invalid_argument("psi_product: size mismatch");
  int total = 0;
  for (int x : a) {
    if (x < 0) throw std::invalid_argument("psi_product: negative exponent");
    total += x;
  }
  if (total > n - 3) throw std::invalid_argument("psi_product: exponents exceed dimension");
  PsiProductFan f;
  f.n = n;
  f.exponents = a;
  for (auto& t : enumerate_types(n, n - 3 - total)) {
    bool ok = true;
    Int weight = 1;
    for (const auto& v : tree_vertices(t)) {
      int need = 3;
      Int denom = 1;
      for (int l : v.leaves) {
        need += a[l];
        denom *= factorial_int(a[l]);
      }
      if (v.valence() != need) {
        ok = false;
        break;
      }
      weight *= factorial_int(v.valence() - 3) / denom;
    }
    if (!ok) continue;
    f.types.push_back(std::move(t));
    f.weights.push_back(std::move(weight));
  }
  return f;
}

WeightedComplex psi_product_complex(const ModuliFan& m, const PsiProductFan& f) {
  std::vector<Polyhedron> cones;
  for (const auto& t : f.types) cones.push_back(m.type_cone(t.edges));
  int total = 0;
  for (int x : f.exponents) total += x;
  int dim = f.n - 3 - total;
  return WeightedComplex::from_facets(m.fan.ambient_dim(), dim, std::move(cones), f.weights);
}

Rat abstract_invariant(const std::vector<int>& a) {
  int n = static_cast<int>(a.size());
  int total = 0;
  for (int x : a) {
    if (x < 0) return 0;
    total += x;
  }
  if (total != n - 3) return 0;
  Int denom = 1;
  for (int x : a) denom *= factorial_int(x);
  return Rat(factorial_int(n - 3)) / Rat(denom);
}

// ---------------------------------------------------------------------------
// forgetful maps

namespace {

uint32_t drop_label(uint32_t mask, int forget) {
  uint32_t low = mask & ((1u << forget) - 1);
  uint32_t high = (mask >> (forget + 1)) << forget;
  return low | high;
}

} // namespace

CycleMorphism forgetful_map(const ModuliFan& from, const ModuliFan& to, int forget) {
  if (to.n != from.n - 1) throw std::invalid_argument("forgetful_map: size mismatch");
  const int df = from.fan.ambient_dim();
  const int dt = to.fan.ambient_dim();
  const int nr = static_cast<int>(from.ray_partitions.size());
  RatMat X(nr, df);
  RatMat Y(nr, dt);
  for (int i = 0; i < nr; ++i) {
    X.row(i) = to_rat(from.ray_coords[i]).transpose();
    const Partition& p = from.ray_partitions[i];
    uint32_t side = drop_label(p.mask, forget);
    Y.row(i).setZero();
    if (side != 0 && side != Partition::full_mask(to.n)) {
      Partition q(to.n, side);
      if (q.is_bounded_edge())
        Y.row(i) = to_rat(to.ray_coords[to.ray_index(q)]).transpose();
    }
  }
  CycleMorphism f;
  f.map = IntMat(dt, df);
  for (int r = 0; r < dt; ++r) {
    auto sol = solve_consistent(X, Y.col(r));
    if (!sol) throw std::logic_error("forgetful_map: ray images not linear");
    for (int c = 0; c < df; ++c) {
      if ((*sol)(c).get_den() != 1) throw std::logic_error("forgetful_map: non-integer matrix");
      f.map(r, c) = (*sol)(c).get_num();
    }
  }
  return f;
}

// ---------------------------------------------------------------------------
// identity suites

bool SuiteReport::all_ok() const {
  for (const auto& [name, ok] : checks)
    if (!ok) return false;
  return true;
}

SuiteReport forgetful_pushpull_suite(int n) {
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
  ModuliFan Mn = embed_moduli_fan(n);
  ModuliFan Mm = embed_moduli_fan(n - 1);
  const int q = n - 1; // forgotten label
  CycleMorphism ft = forgetful_map(Mn, Mm, q);
  auto phi2 = [&](int i, int j) { return phi_function(Mn, Partition(n, (1u << i) | (1u << j))); };

  run("phi_ij.phi_ik = 0", [&] {
    return Mn.fan.divisor(phi2(0, 1)).divisor(phi2(0, 2)).is_empty();
  });
  run("phi_ij.psi_i = 0", [&] {
    return Mn.fan.divisor(phi2(0, 1)).divisor(psi_function(Mn, 0)).is_empty();
  });
  run("div(psi_k) = div(ft*psi_k) + div(phi_qk)", [&] {
    int k = 0;
    PLFunction pulled = pull_back_on(ft, psi_function(Mm, k), Mn.fan, Mm.fan);
    WeightedComplex lhs = Mn.fan.divisor(psi_function(Mn, k));
    WeightedComplex rhs = Mn.fan.divisor(pulled).plus(Mn.fan.divisor(phi2(q, k)));
    return lhs.equals_up_to_refinement(rhs);
  });
  run("phi_qk^2 = -ft*(psi_k).phi_qk", [&] {
    int k = 0;
    WeightedComplex A = Mn.fan.divisor(phi2(q, k));
    PLFunction pulled = pull_back_on(ft, psi_function(Mm, k), A, Mm.fan);
    return A.divisor(phi2(q, k)).equals_up_to_refinement(A.divisor(pulled).scaled(Int(-1)));
  });
  run("ft_*(div phi_qk) = M", [&] {
    return push_forward(ft, Mn.fan.divisor(phi2(q, 0))).equals_up_to_refinement(Mm.fan);
  });
  run("ft_*(div psi_q) = (n-3) M", [&] {
    return push_forward(ft, Mn.fan.divisor(psi_function(Mn, q)))
        .equals_up_to_refinement(Mm.fan.scaled(Int(n - 3)));
  });
  run("psi as boundary", [&] {
    // div(psi_0) = sum of div(phi_I|J) over partitions with 0 in I, 1,2 in J
    WeightedComplex sum = WeightedComplex::empty_cycle(Mn.fan.ambient_dim(), n - 4);
    for (const auto& p : Mn.ray_partitions) {
      if (!((p.mask & 1) && !p.separates(1, 2) && p.separates(0, 1))) continue;
      sum = sum.plus(Mn.fan.divisor(phi_function(Mn, p)));
    }
    return Mn.fan.divisor(psi_function(Mn, 0)).equals_up_to_refinement(sum);
  });
  run("ft_*(phi_qk^2) = -psi_k.M", [&] {
    int k = 0;
    WeightedComplex sq = Mn.fan.divisor(phi2(q, k)).divisor(phi2(q, k));
    return push_forward(ft, sq).equals_up_to_refinement(
        Mm.fan.divisor(psi_function(Mm, k)).scaled(Int(-1)));
  });
  return rep;
}

SuiteReport string_dilaton_abstract(const std::vector<int>& a) {
  SuiteReport rep;
  int n = static_cast<int>(a.size());
  std::vector<int> ext = a;
  ext.push_back(0);
  Rat rhs = 0;
  for (int i = 0; i < n; ++i) {
    if (a[i] == 0) continue;
    std::vector<int> dec = a;
    --dec[i];
    rhs += abstract_invariant(dec);
  }
  rep.checks.push_back({"string", abstract_invariant(ext) == rhs});
  std::vector<int> dil = a;
  dil.push_back(1);
  rep.checks.push_back(
      {"dilaton", abstract_invariant(dil) == Rat(n - 2) * abstract_invariant(a)});
  return rep;
}

std::string tree_to_string(const MarkedTree& t) {
  Laminar lam = laminar_of(t);
  bool with_len = t.lengths.size() == t.edges.size();
  std::function<std::string(int)> node = [&](int ci) -> std::string {
    std::vector<std::pair<int, std::string>> items; // (min label, text)
    uint32_t used = 0;
    for (int c : lam.children[ci]) {
      items.push_back({std::countr_zero(lam.clusters[c]), node(c)});
      used |= lam.clusters[c];
    }
    uint32_t direct = lam.clusters[ci] & ~used;
    for (int l = 0; l < t.n; ++l)
      if ((direct >> l) & 1) items.push_back({l, std::to_string(l + 1)});
    std::sort(items.begin(), items.end());
    std::string s = "(";
    for (size_t i = 0; i < items.size(); ++i) {
      if (i) s += ",";
      s += items[i].second;
    }
    s += ")";
    if (with_len) s += ":" + rat_to_string(t.lengths[ci]);
    return s;
  };
  std::vector<std::pair<int, std::string>> items;
  uint32_t used = 0;
  for (int c : lam.root_children) {
    items.push_back({std::countr_zero(lam.clusters[c]), node(c)});
    used |= lam.clusters[c];
  }
  uint32_t direct = Partition::full_mask(t.n) & ~used;
  for (int l = 0; l < t.n; ++l)
    if ((direct >> l) & 1) items.push_back({l, std::to_string(l + 1)});
  std::sort(items.begin(), items.end());
  std::string s = "(";
  for (size_t i = 0; i < items.size(); ++i) {
    if (i) s += ",";
    s += items[i].second;
  }
  s += ");";
  return s;
}

} // namespace tropgw
