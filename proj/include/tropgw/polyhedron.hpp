#ifndef TROPGW_POLYHEDRON_HPP
#define TROPGW_POLYHEDRON_HPP

// Exact rational polyhedra in generator representation, with on-demand
// H-representation via the double description method. All conversions are
// exact; no tolerances exist.

#include "tropgw/exactlin.hpp"

#include <memory>
#include <string>
#include <vector>

namespace tropgw {

// Extreme rays and lineality of {x : a.x >= 0 for all a in ineqs}.
struct ConeVRep {
  std::vector<RatVec> rays;
  std::vector<RatVec> lin;
};
ConeVRep dd_cone(const std::vector<RatVec>& ineqs, const std::vector<RatVec>& eqs, int dim);

// Irredundant inequalities/equations of cone(gens) + span(lin).
struct ConeHRep {
  std::vector<RatVec> ineqs; // a.x >= 0
  std::vector<RatVec> eqs;   // a.x  = 0
};
ConeHRep cone_hrep(const std::vector<RatVec>& gens, const std::vector<RatVec>& lin, int dim);

struct HRep {
  std::vector<std::pair<RatVec, Rat>> ineqs; // a.x >= b
  std::vector<std::pair<RatVec, Rat>> eqs;   // c.x  = d
};

class Polyhedron {
public:
  Polyhedron() = default;
  // conv(vertices) + cone(rays) + span(lineality); rows are generators.
  // Empty when vertices is empty.
  static Polyhedron from_generators(int ambient, RatMat vertices, RatMat rays, RatMat lineality);
  static Polyhedron from_hrep(int ambient, const HRep& h);
  static Polyhedron point(const RatVec& p);
  static Polyhedron cone_from_rays(int ambient, const RatMat& rays, const RatMat& lineality);
  static Polyhedron full_space(int ambient);
  static Polyhedron empty(int ambient);

  int ambient_dim() const { return ambient_; }
  bool is_empty() const { return empty_; }
  int dim() const; // -1 for empty
  const RatMat& vertices() const { return vertices_; }
  const RatMat& rays() const { return rays_; }
  const RatMat& lineality() const { return lineality_; }

  const HRep& hrep() const; // cached
  // Rows spanning the direction space (rays, lineality, vertex differences).
  RatMat direction_span() const;
  // Saturated lattice of the direction space.
  const Sublattice& dir_lattice() const; // cached

  bool contains(const RatVec& x) const;
  RatVec relint_point() const;
  bool is_cone() const; // single vertex at the origin

  Polyhedron intersect(const Polyhedron& o) const;
  Polyhedron intersect_halfspace(const RatVec& a, const Rat& b) const; // a.x >= b
  Polyhedron intersect_hyperplane(const RatVec& a, const Rat& b) const;
  Polyhedron translate(const RatVec& v) const;
  Polyhedron product(const Polyhedron& o) const;
  // image under x -> A x + t (A: new_ambient x ambient)
  Polyhedron affine_image(const RatMat& A, const RatVec& t) const;
  Polyhedron recession_cone() const;
  // codimension-one faces
  std::vector<Polyhedron> facets() const;

  // Minimal V-representation in canonical form; equality via key().
  const std::string& key() const; // cached canonical key
  bool same_as(const Polyhedron& o) const { return key() == o.key(); }

private:
  int ambient_ = 0;
  bool empty_ = true;
  RatMat vertices_{0, 0}, rays_{0, 0}, lineality_{0, 0};
  struct Cache {
    std::unique_ptr<HRep> hrep;
    std::unique_ptr<Sublattice> dirlat;
    std::unique_ptr<std::string> key;
    int dim = -2;
  };
  mutable std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
  void canonicalize(); // minimal generators, canonical order
  void canonical_order();
  void set_from_homog(const ConeVRep& vr);
};

} // namespace tropgw

#endif
