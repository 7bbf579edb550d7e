#ifndef TROPGW_PARMOD_HPP
#define TROPGW_PARMOD_HPP

// Parametrized moduli of rational curves in R^r with a labelled degree:
// degree fans and pairings, anchored product structure, evaluation maps as
// exact linear maps, psi-products and the forgetful identity suite.

#include "tropgw/fanio.hpp"
#include "tropgw/modcurves.hpp"

#include <optional>
#include <string>
#include <utility>

namespace tropgw {

// A labelled degree: distinct labels with nonzero integer directions that
// sum to zero.
struct Degree {
  std::vector<std::string> labels; // sorted, distinct
  std::vector<IntVec> dirs;        // parallel to labels

  int r() const { return dirs.empty() ? 0 : static_cast<int>(dirs[0].size()); }
  int count() const { return static_cast<int>(labels.size()); }
};

// Validates and sorts by label.
Degree make_degree(std::vector<std::string> labels, std::vector<IntVec> dirs);
// Auto-labelled degree from (direction, multiplicity) pairs.
Degree degree_of_directions(const std::vector<std::pair<IntVec, int>>& dirs_counts);
// d copies each of -(e_1+...+e_r), e_1, ..., e_r.
Degree projective_degree(int d, int r);

// prod over directions v of n(v)!, the labelling symmetry factor
Int degree_factorial(const Degree& d);

// One-dimensional fan of the occurring ray directions; the weight of a ray
// is the sum of lattice indices |Zv/Zv_k| = content(v_k) over labels on it.
WeightedComplex delta_of_degree(const Degree& d);

// deg(h . delta(d))
Rat h_dot_degree(const PLFunction& h, const Degree& d);

// Splits d along a label subset; defined exactly when the subset's
// directions already sum to zero (the partition is reducible).
std::optional<std::pair<Degree, Degree>> split_degree(const Degree& d,
                                                      const std::vector<bool>& in_first);

nlohmann::json degree_to_json(const Degree& d);
Degree degree_from_json(const nlohmann::json& j);

// The space of n-marked parametrized curves of a fixed degree, identified
// with the abstract moduli of ([n] joined with the degree labels)-marked
// trees times R^r via an anchor leaf. Combined labels: marks 0..n-1, then
// degree labels n..n+#deg-1 in degree order.
struct ParamSpace {
  int n = 0;
  Degree deg;
  int anchor = 0; // a marked leaf

  int total() const { return n + deg.count(); }
  int r() const { return deg.r(); }
  int dim() const { return total() + r() - 3; }
  IntVec dir_of(int label) const; // zero on marks
  IntVec v_of_side(uint32_t mask) const; // sum of directions over the side
  bool reducible(const Partition& p) const; // v of either side vanishes
};

// A curve as its combinatorial tree with edge lengths plus the image point
// of the anchor leaf.
struct ParamCurve {
  MarkedTree tree; // over the combined labels
  RatVec anchor_pos;
};

// Evaluation of leaf k as an exact linear map: on the anchored product
// structure it is (c, P) -> section * c + P.
struct EvalMap {
  int k = 0;
  int anchor = 0;
  RatMat section; // r x (abstract section dimension)
};

// Solves the linear part from the per-ray displacements; throws when the
// ray values are not consistent with a single linear map.
EvalMap eval_map(const ModuliFan& m, const ParamSpace& s, int k);
// Image of leaf k, computed on the tree: anchor position plus the sum of
// length * (direction of the k-side) over the edges separating anchor and k.
RatVec eval_apply(const ParamSpace& s, int k, const ParamCurve& c);
// The same via the linear map, on a section point.
RatVec eval_apply_linear(const EvalMap& e, const RatVec& section_point, const RatVec& pos);
// The map as a morphism from the product complex (section coords, R^r).
CycleMorphism eval_morphism(const EvalMap& e);

// Psi-product on the parametrized space: the abstract product over the
// combined labels (zero exponents on degree labels) crossed with R^r.
PsiProductFan psi_product_param(const ParamSpace& s, const std::vector<int>& a);
WeightedComplex psi_product_param_complex(const ModuliFan& m, const ParamSpace& s,
                                          const PsiProductFan& f);

// Verifies the boundary/psi/forgetful identities for parametrized curves on
// the embedded product fans (abstract fan times R^r); needs total() <= 5.
SuiteReport map_equations_suite(const ParamSpace& s);

} // namespace tropgw

#endif
