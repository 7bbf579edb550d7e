#ifndef TROPGW_GWENGINE_HPP
#define TROPGW_GWENGINE_HPP

// Descendant invariants of rational curves in R^1 and R^2 by exact
// recursion: target models with diagonal-splitting matrices, splitting of
// boundary divisors, WDVV and topological recursion, string / divisor /
// dilaton rewrites, precondition guards, memoized evaluation.

#include "tropgw/parmod.hpp"

#include <map>
#include <shared_mutex>
#include <stdexcept>

namespace tropgw {

enum class ModelName { P1xKstar, P2, P1xP1, F1, Bl2P2, Bl3P2, R1 };

ModelName model_from_string(const std::string& s);
std::string model_to_string(ModelName m);

// A target fan with a fixed basis of the directional cycle groups. The
// basis always starts with the origin class and ends with the fundamental
// class; alpha(e,f) = deg(B_e . B_f), zero off complementary dimensions,
// and beta is its exact inverse. P1xKstar is the degenerate member: its fan
// is a line, the middle pairing vanishes identically and no beta exists.
struct SurfaceModel {
  ModelName name = ModelName::P2;
  int r = 2;
  bool degenerate = false;
  std::vector<IntVec> rays;            // primitive generators, cyclic order
  WeightedComplex theta;               // top-dimensional cones, weight 1
  std::vector<WeightedComplex> basis;  // B_0 = origin, ..., B_m = full space
  std::vector<int> basis_dim;          // parallel to basis
  RatMat alpha;
  RatMat beta;                         // empty when degenerate
  // Auxiliary divisor classes used to create extra marks: a pair that is
  // admissible for the boundedness condition on two divisor marks and whose
  // mutual pairing is nonzero. Stored as coefficient vectors over basis.
  IntVec aux_class_a;
  IntVec aux_class_b;
  // convex witnesses with divisor equal to the auxiliary classes, when the
  // class is the divisor of a global max-form (used by tests)
  std::optional<PLFunction> aux_fn_a;
  std::optional<PLFunction> aux_fn_b;

  int m() const { return static_cast<int>(basis.size()) - 1; }
  int dim_of_class(const IntVec& coeffs) const;  // requires homogeneous
  int codim_of_class(const IntVec& coeffs) const;
  // bilinear degree pairing coeffs_x^T alpha coeffs_y
  Rat pairing(const IntVec& x, const IntVec& y) const;
  // class of the product x.y (surface rules by codimension), zero class on
  // dimension overflow
  IntVec class_product(const IntVec& x, const IntVec& y) const;
  IntVec zero_class() const;
  IntVec unit_class(int e) const;      // coefficient vector of B_e
  IntVec point_class() const { return unit_class(0); }
  IntVec fund_class() const { return unit_class(m()); }
  // the 1-cycle of a homogeneous codim-1 class, materialized on the rays
  WeightedComplex materialize(const IntVec& coeffs) const;
  // index of the ray with the given direction, -1 if absent
  int ray_index(const IntVec& dir) const;
};

SurfaceModel build_surface_model(ModelName name);

// A descendant invariant < prod tau_{a_k}(C_k) >_Delta. Directions are the
// labelled multiset of the degree; classes are coefficient vectors over the
// model basis. The labelled value equals the unlabelled one times the
// product of the multiplicity factorials of the degree.
struct InvariantKey {
  ModelName model = ModelName::P2;
  std::vector<IntVec> dirs;
  std::vector<std::pair<int, IntVec>> marks;  // (psi exponent, class)
  bool labelled = true;

  int n() const { return static_cast<int>(marks.size()); }
  int degree_size() const { return static_cast<int>(dirs.size()); }
};

InvariantKey make_key(ModelName model, const std::vector<IntVec>& dirs,
                      std::vector<std::pair<int, IntVec>> marks, bool labelled = true);
// projective-degree key helper on P2 / R1 with the given (a, class) marks
InvariantKey projective_key(ModelName model, int d,
                            std::vector<std::pair<int, IntVec>> marks, bool labelled = true);
std::string key_canonical_string(const SurfaceModel& m, const InvariantKey& key);
Int degree_factorial_of_dirs(const std::vector<IntVec>& dirs);
// sum(a_k + codim C_k) == n + #Delta + r - 3
bool is_zero_dimensional(const SurfaceModel& m, const InvariantKey& key);

// every direction primitive and every independent pair a lattice basis
struct UnimodularReport {
  bool ok = true;
  std::string witness;  // offending direction or pair when not ok
};
UnimodularReport check_strongly_unimodular(const std::vector<IntVec>& dirs);
UnimodularReport check_strongly_unimodular(const Degree& d);
// the complete fan generated by a strongly unimodular direction set
ModelName classify_directions(const std::vector<IntVec>& dirs);

// precondition labels: "i" psi only at point conditions, "ii" strongly
// unimodular degree, "iii" no degree cone meets two divisor conditions of a
// chosen pair, "iv" recursion leaf carries a point condition,
// "directionality" bounded exponents at full-space conditions
struct PrecondReport {
  bool ok = true;
  std::vector<std::pair<std::string, std::string>> violations;  // label, detail
  bool has(const std::string& label) const;
};

struct PrecondError : std::runtime_error {
  PrecondReport report;
  explicit PrecondError(const PrecondReport& rep);
};

// family = the one-dimensional cycle whose marks i,j,k,l are split
PrecondReport check_wdvv_preconditions(const SurfaceModel& m, const InvariantKey& family,
                                       int i, int j, int k, int l);
PrecondReport check_toprec_preconditions(const SurfaceModel& m, const InvariantKey& family,
                                         int i, int k, int l);

// directions of the degree plus the rays of one-dimensional conditions
// carrying a psi exponent
std::vector<IntVec> theta_of_family(const SurfaceModel& m, const InvariantKey& key);

// binom(n-3; a) * deg(C_1 ... C_n) when the codimensions sum to r, else 0
Rat degree_zero_invariant(const SurfaceModel& m,
                          const std::vector<std::pair<int, IntVec>>& marks);

// One bilinear term of a splitting: coeff * <left> * <right>.
struct TermProduct {
  Rat coeff;
  InvariantKey left;
  InvariantKey right;
};
using TermSum = std::vector<TermProduct>;

// A partition of an invariant's marks and degree elements by index.
struct Split {
  std::vector<int> marks_first;
  std::vector<int> dirs_first;
};
bool split_is_reducible(const InvariantKey& key, const Split& s);

// expansion of the boundary divisor of the split over basis pairs; requires
// a reducible split
TermSum splitting_lemma(const SurfaceModel& m, const InvariantKey& family, const Split& s);

// the two sides of the WDVV equation for marks i,j | k,l of the family
std::pair<TermSum, TermSum> wdvv_reduce(const SurfaceModel& m, const InvariantKey& family,
                                        int i, int j, int k, int l);

// right hand side of < psi_i . family >
TermSum topological_recursion(const SurfaceModel& m, const InvariantKey& family,
                              int i, int k, int l);

// value(key) = sum of coeff * value(term key)
using WeightedKeys = std::vector<std::pair<Rat, InvariantKey>>;
WeightedKeys string_rewrite(const SurfaceModel& m, const InvariantKey& key);   // tau_0(R^r)
WeightedKeys dilaton_rewrite(const SurfaceModel& m, const InvariantKey& key);  // tau_1(R^r)
// removes the first codim-1 mark with exponent 0
WeightedKeys divisor_rewrite(const SurfaceModel& m, const InvariantKey& key);

class Engine {
 public:
  // Alt reverses the deterministic choices of the reduction (which psi leaf
  // to eliminate, which marks serve as the fixed pair) to witness path
  // independence.
  enum class Order { Lex, Alt };

  explicit Engine(ModelName name, Order order = Order::Lex);

  const SurfaceModel& model() const { return model_; }

  Rat compute(const InvariantKey& key);
  Rat evaluate(const TermSum& terms);

  nlohmann::json ledger_json() const;  // canonical key -> "p/q"

 private:
  SurfaceModel model_;
  Order order_;
  mutable std::shared_mutex mu_;
  std::map<std::string, Rat> memo_;

  Rat compute_unlabelled(const InvariantKey& key, int depth);
  Rat reduce(const InvariantKey& key, int depth);
};

Rat to_unlabelled(const Rat& labelled_value, const std::vector<IntVec>& dirs);

// Classified ridge type of a psi-product against one boundary function:
// sign +1 when the special vertex refines the partition properly on both
// sides, -1 when one side stays whole, 0 when the vertex partition is not
// refined by the boundary partition.
struct BoundaryPsiFacet {
  MarkedTree type;
  int sign = 0;
};
std::vector<BoundaryPsiFacet> boundary_psi_facets(int n, const std::vector<int>& a,
                                                  const Partition& p);

}  // namespace tropgw

#endif
