#ifndef TROPGW_MODCURVES_HPP
#define TROPGW_MODCURVES_HPP

// Moduli of abstract rational n-marked tropical curves: marked trees,
// distance-coordinate embeddings, boundary and psi functions, psi-product
// fans, forgetful maps, string and dilaton identities.

#include "tropgw/complex.hpp"

#include <array>
#include <map>
#include <optional>

namespace tropgw {

Int factorial_int(int k);
Int binomial_int(int n, int k);

// A two-sided partition of the labels {0..n-1}; the stored mask is the side
// containing label 0. Labels are 0-based internally, 1-based in all I/O.
struct Partition {
  int n = 0;
  uint32_t mask = 0;

  Partition() = default;
  Partition(int n_, uint32_t side);
  static uint32_t full_mask(int n) { return (n >= 32) ? ~0u : ((1u << n) - 1); }

  uint32_t other() const { return full_mask(n) & ~mask; }
  int size_zero_side() const;  // size of the side containing label 0
  // the side containing leaf k, as a mask
  uint32_t side_of(int k) const { return (mask >> k) & 1 ? mask : other(); }
  bool separates(int k, int l) const;
  bool is_bounded_edge() const; // both sides of size >= 2
  bool compatible(const Partition& o) const;
  bool operator==(const Partition& o) const { return n == o.n && mask == o.mask; }
  bool operator<(const Partition& o) const;
  std::string to_string() const; // "12|345" with 1-based labels
};

struct MarkedTree {
  int n = 0;
  std::vector<Partition> edges;           // pairwise compatible bounded edges
  std::vector<Rat> lengths;               // optional, parallel to edges

  bool compatible() const;
  int dim() const { return static_cast<int>(edges.size()); }
};

// One vertex of a marked tree: the leaf sets of the branches around it plus
// the marked leaves sitting directly at it.
struct TreeVertex {
  std::vector<uint32_t> branches; // leaf mask per incident edge direction
  std::vector<int> leaves;        // marks attached at this vertex
  int valence() const { return static_cast<int>(branches.size() + leaves.size()); }
};
std::vector<TreeVertex> tree_vertices(const MarkedTree& t);

// All bounded-edge partitions of {0..n-1}, canonically ordered.
std::vector<Partition> all_bounded_partitions(int n);

// All combinatorial types with exactly dim bounded edges.
std::vector<MarkedTree> enumerate_types(int n, int dim);

// Distance-coordinate vector in R^(n choose 2): entry (k,l) is 1 when the
// partition separates k and l. Coordinates ordered (0,1),(0,2),..,(n-2,n-1).
IntVec v_vector(const Partition& p);

// The moduli fan of n-marked curves in a fixed integer section of the
// distance-coordinate quotient, with its ray dictionary.
struct ModuliFan {
  int n = 0;
  WeightedComplex fan;
  std::vector<Partition> ray_partitions;
  std::vector<IntVec> ray_coords; // coordinates of the ray generators
  IntMat quotient;                // projection from R^(n choose 2)
  IntMat basis;                   // lattice basis rows of the section

  int ray_index(const Partition& p) const;
  // coordinates of a point with the given edge lengths
  RatVec tree_point(const MarkedTree& t) const;
  // the cone spanned by the rays of the given edges
  Polyhedron type_cone(const std::vector<Partition>& edges) const;
};
ModuliFan embed_moduli_fan(int n);

// phi_{I|J}: 1 on the ray of p, 0 on all other rays
PLFunction phi_function(const ModuliFan& m, const Partition& p);
// psi_k as the symmetric rational representative
PLFunction psi_function(const ModuliFan& m, int k);
Rat psi_value(int k, const Partition& p);

// Codimension-one type with its unique 4-valent vertex recorded as the four
// leaf sets around that vertex.
struct RidgeType {
  std::array<uint32_t, 4> parts;
  std::vector<Partition> edges; // the remaining bounded edges
};
std::optional<RidgeType> ridge_type(const MarkedTree& t);

// weight of div(phi_p) at the ridge: +1 when p resolves the 4-valent vertex,
// -1 when p cuts off one of its four branches, 0 otherwise
int boundary_divisor_weight(const Partition& p, const RidgeType& r);

struct PsiProductFan {
  int n = 0;
  std::vector<int> exponents;
  std::vector<MarkedTree> types;
  std::vector<Int> weights;
};
// types of dimension n-3-sum(a) where each vertex has valence
// 3 + sum of exponents of its attached marks; weight = product of
// multinomials (valence-3; exponents)
PsiProductFan psi_product(int n, const std::vector<int>& a);
// the same fan materialized on the moduli embedding
WeightedComplex psi_product_complex(const ModuliFan& m, const PsiProductFan& f);

// (n-3)!/(a_1!...a_n!) when the exponents sum to n-3, else 0
Rat abstract_invariant(const std::vector<int>& a);

// The forgetful map to the moduli fan with label `forget` removed, as a
// matrix between the two section coordinate spaces.
CycleMorphism forgetful_map(const ModuliFan& from, const ModuliFan& to, int forget);

struct SuiteReport {
  std::vector<std::pair<std::string, bool>> checks;
  bool all_ok() const;
};
// mechanical verification of the boundary/psi/forgetful identities on the
// embedded fans of M_n and M_(n-1)
SuiteReport forgetful_pushpull_suite(int n);

// string and dilaton identities for the closed-form invariants with the
// given exponent vector
SuiteReport string_dilaton_abstract(const std::vector<int>& a);

std::string tree_to_string(const MarkedTree& t); // newick-like, 1-based

} // namespace tropgw

#endif
