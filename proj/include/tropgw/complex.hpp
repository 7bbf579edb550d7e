#ifndef TROPGW_COMPLEX_HPP
#define TROPGW_COMPLEX_HPP

// Weighted rational polyhedral complexes (tropical cycles) and piecewise
// affine functions: divisors, stars and germs, push-forward, products,
// stable intersection, recession fans. All arithmetic exact.

#include "tropgw/polyhedron.hpp"

#include <map>
#include <variant>

namespace tropgw {

class WeightedComplex;

// A piecewise integer-affine function in one of three shapes:
//  - MaxForm: global max of finitely many affine terms a.x + c
//  - RayValues: values on primitive ray generators of a fan (zero at the
//    origin and on lineality), linear on each cone
//  - CellAffine: explicit (covector, constant) per facet of a host complex
class PLFunction {
public:
  struct MaxForm {
    std::vector<std::pair<RatVec, Rat>> terms;
  };
  struct RayValues {
    std::vector<std::pair<IntVec, Rat>> values;
  };
  struct CellAffine {
    std::vector<std::pair<RatVec, Rat>> per_facet;
  };

  static PLFunction max_terms(std::vector<std::pair<RatVec, Rat>> terms);
  static PLFunction linear(const RatVec& a); // single term, constant 0
  static PLFunction ray_values(std::vector<std::pair<IntVec, Rat>> values);
  static PLFunction cell_affine(std::vector<std::pair<RatVec, Rat>> per_facet);

  bool is_max_form() const { return std::holds_alternative<MaxForm>(data_); }
  bool is_ray_values() const { return std::holds_alternative<RayValues>(data_); }
  bool is_cell_affine() const { return std::holds_alternative<CellAffine>(data_); }
  const MaxForm& max_form() const { return std::get<MaxForm>(data_); }
  const RayValues& ray_vals() const { return std::get<RayValues>(data_); }

  // The affine function agreeing with this one on the cell; facet_index is
  // required for CellAffine and ignored otherwise. Throws when the function
  // is not affine on the cell.
  std::pair<RatVec, Rat> affine_on(const Polyhedron& cell, int facet_index = -1) const;

  Rat value_at(const RatVec& x) const; // MaxForm only

private:
  std::variant<MaxForm, RayValues, CellAffine> data_;
};

class WeightedComplex {
public:
  WeightedComplex() = default;
  // facets of equal dimension dim; zero weights dropped unless prune=false
  static WeightedComplex from_facets(int ambient, int dim, std::vector<Polyhedron> facets,
                                     std::vector<Int> weights, bool prune = true);
  static WeightedComplex empty_cycle(int ambient, int dim);
  // the fundamental cycle of R^ambient with weight 1
  static WeightedComplex full_space(int ambient);

  int ambient_dim() const { return ambient_; }
  int dim() const { return dim_; }
  bool is_empty() const { return facets_.empty(); }
  int facet_count() const { return static_cast<int>(facets_.size()); }
  const Polyhedron& facet(int i) const { return facets_[i]; }
  const Int& weight(int i) const { return weights_[i]; }
  bool is_fan() const;
  bool support_contains(const RatVec& x) const;

  struct Ridge {
    Polyhedron poly;
    std::vector<int> facets; // incident facet indices
  };
  const std::vector<Ridge>& ridges() const; // cached

  struct BalanceReport {
    bool ok = true;
    std::vector<std::pair<int, RatVec>> failures; // ridge index, residue
  };
  BalanceReport check_balanced() const;

  // Weil divisor of phi. MaxForm functions trigger an automatic refinement
  // along their term-difference hyperplanes so the function is affine per
  // cell; CellAffine data must already match this complex's facets.
  WeightedComplex divisor(const PLFunction& phi, bool prune = true) const;

  // Fan of outgoing directions at a cell, in the quotient modulo the cell's
  // own span (lattice coordinates of Z^ambient / Lambda_tau).
  WeightedComplex star(const Polyhedron& tau) const;
  // star plus a germ of phi at tau (CellAffine on the star's facets)
  std::pair<WeightedComplex, PLFunction> star_with_germ(const Polyhedron& tau,
                                                        const PLFunction& phi) const;

  WeightedComplex product(const WeightedComplex& o) const;
  WeightedComplex translate(const RatVec& v) const;
  WeightedComplex scaled(const Int& c) const; // multiply all weights
  WeightedComplex plus(const WeightedComplex& o) const; // formal sum, refined
  WeightedComplex refined_by(const std::vector<std::pair<RatVec, Rat>>& hyperplanes) const;

  // stable intersection via the diagonal max-function cascade
  WeightedComplex diagonal_intersection(const WeightedComplex& o) const;
  // set-theoretic intersection with product-index weights; requires the
  // expected dimension at every contributing pair
  WeightedComplex transversal_intersection(const WeightedComplex& o) const;

  WeightedComplex recession_fan() const;
  Rat degree0() const; // sum of weights of a zero-dimensional cycle

  bool equals_up_to_refinement(const WeightedComplex& o) const;

  // all k-dimensional faces of the facets, deduplicated
  std::vector<Polyhedron> cells_of_dim(int k) const;

private:
  int ambient_ = 0;
  int dim_ = -1;
  std::vector<Polyhedron> facets_;
  std::vector<Int> weights_;
  mutable std::shared_ptr<std::vector<Ridge>> ridges_cache_;

  WeightedComplex divisor_impl(const PLFunction& phi, bool prune) const;
  // star fan plus the indices of the incident facets, in matching order
  std::pair<WeightedComplex, std::vector<int>> star_cones(const Polyhedron& tau) const;
};

// Integer-linear cycle morphism x -> A x + t restricted to a complex.
struct CycleMorphism {
  IntMat map;
  RatVec translation; // zero-size means zero
  RatVec t_or_zero(int rows) const;
};

// Push-forward with weights omega(piece) = sum over facets sigma mapping onto
// the piece of [Lambda_piece : A(Lambda_sigma)] * omega(sigma). The image
// cells are overlaid into a common arrangement.
WeightedComplex push_forward(const CycleMorphism& f, const WeightedComplex& z);

// phi composed with the map; MaxForm stays MaxForm
PLFunction pull_back(const CycleMorphism& f, const PLFunction& phi);
// general composition: evaluates phi cell by cell on the codomain complex
PLFunction pull_back_on(const CycleMorphism& f, const PLFunction& phi,
                        const WeightedComplex& domain, const WeightedComplex& codomain);

WeightedComplex random_translation(const WeightedComplex& x, uint64_t seed);

bool is_convex_on(const PLFunction& phi, const WeightedComplex& x);

// Product of Minkowski weights c (on k-cones of theta) and c2 (on l-cones)
// via a generic displacement vector: the weight on a (k+l-r)-cone tau is the
// sum of c(sigma) c2(sigma') [Z^r : L_sigma + L_sigma'] over cone pairs
// containing tau with (sigma + v) meeting sigma'. The displacement v is
// sampled from the seed and rejected until every incidence is transversal.
WeightedComplex fan_displacement_product(const WeightedComplex& c, const WeightedComplex& c2,
                                         const WeightedComplex& theta, uint64_t seed,
                                         int max_attempts = 32);

} // namespace tropgw

#endif
