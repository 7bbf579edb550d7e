#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "tropgw/complex.hpp"
#include "tropgw/fanio.hpp"

using namespace tropgw;

namespace {

RatVec rv(std::initializer_list<long> xs) {
  RatVec v(xs.size());
  int i = 0;
  for (long x : xs) v(i++) = x;
  return v;
}

RatMat rows(std::initializer_list<std::initializer_list<long>> rs, int cols) {
  RatMat m(rs.size(), cols);
  int i = 0;
  for (auto& r : rs) {
    int j = 0;
    for (long x : r) m(i, j++) = x;
    ++i;
  }
  return m;
}

Polyhedron ray_cone(std::initializer_list<long> dir) {
  int m = static_cast<int>(dir.size());
  RatMat r(1, m);
  int j = 0;
  for (long x : dir) r(0, j++) = x;
  return Polyhedron::cone_from_rays(m, r, RatMat(0, m));
}

// the 1-dimensional fan with rays (1,1), (-1,0), (0,-1), weight d each
WeightedComplex curve_fan(long d) {
  return WeightedComplex::from_facets(
      2, 1, {ray_cone({1, 1}), ray_cone({-1, 0}), ray_cone({0, -1})}, {Int(d), Int(d), Int(d)});
}

// R^1 as the two-ray fan
WeightedComplex line1() {
  return WeightedComplex::from_facets(1, 1, {ray_cone({1}), ray_cone({-1})}, {Int(1), Int(1)});
}

PLFunction max_xy0() {
  return PLFunction::max_terms({{rv({1, 0}), Rat(0)}, {rv({0, 1}), Rat(0)}, {rv({0, 0}), Rat(0)}});
}

} // namespace

TEST_CASE("balancing of one-dimensional fans") {
  CHECK(line1().check_balanced().ok);
  CHECK(curve_fan(1).check_balanced().ok);
  WeightedComplex bad = WeightedComplex::from_facets(
      2, 1, {ray_cone({1, 1}), ray_cone({-1, 0}), ray_cone({0, -1})}, {Int(2), Int(1), Int(1)});
  auto rep = bad.check_balanced();
  CHECK(!rep.ok);
  CHECK(rep.failures.size() == 1);
  CHECK(rep.failures[0].second == rv({1, 1}));
}

TEST_CASE("divisor of max(x,y,0) on the plane is the one-curve") {
  WeightedComplex plane = WeightedComplex::full_space(2);
  WeightedComplex d = plane.divisor(max_xy0());
  CHECK(d.dim() == 1);
  CHECK(d.equals_up_to_refinement(curve_fan(1)));
  CHECK(d.check_balanced().ok);
}

TEST_CASE("divisor of a globally affine function vanishes") {
  WeightedComplex d = curve_fan(1).divisor(PLFunction::linear(rv({3, -2})));
  CHECK(d.is_empty());
}

TEST_CASE("iterated divisor max(x,0) then max(y,0) cuts out the origin") {
  WeightedComplex plane = WeightedComplex::full_space(2);
  PLFunction fx = PLFunction::max_terms({{rv({1, 0}), Rat(0)}, {rv({0, 0}), Rat(0)}});
  PLFunction fy = PLFunction::max_terms({{rv({0, 1}), Rat(0)}, {rv({0, 0}), Rat(0)}});
  WeightedComplex d = plane.divisor(fx).divisor(fy);
  CHECK(d.dim() == 0);
  CHECK(d.facet_count() == 1);
  CHECK(d.facet(0).same_as(Polyhedron::point(rv({0, 0}))));
  CHECK(d.degree0() == 1);
}

TEST_CASE("divisor commutes on randomized-order iterated functions") {
  WeightedComplex plane = WeightedComplex::full_space(2);
  PLFunction f = max_xy0();
  PLFunction g = PLFunction::max_terms({{rv({1, 0}), Rat(0)}, {rv({0, 0}), Rat(1)}});
  WeightedComplex a = plane.divisor(f).divisor(g);
  WeightedComplex b = plane.divisor(g).divisor(f);
  CHECK(a.equals_up_to_refinement(b));
}

TEST_CASE("star at a facet and at the origin") {
  WeightedComplex c = curve_fan(2);
  WeightedComplex s = c.star(c.facet(0));
  CHECK(s.dim() == 0);
  CHECK(s.facet_count() == 1);
  CHECK(s.weight(0) == 2);

  // the star of a fan at the origin is the fan itself
  WeightedComplex s0 = c.star(Polyhedron::point(rv({0, 0})));
  CHECK(s0.equals_up_to_refinement(c));
}

TEST_CASE("germ of max(x,y,0) at the diagonal ray has local weight 1") {
  // refine the plane along the three break lines of max(x,y,0)
  WeightedComplex plane = WeightedComplex::full_space(2);
  WeightedComplex refined = plane.refined_by(
      {{rv({1, -1}), Rat(0)}, {rv({1, 0}), Rat(0)}, {rv({0, 1}), Rat(0)}});
  Polyhedron tau = ray_cone({1, 1});
  auto [star, germ] = refined.star_with_germ(tau, max_xy0());
  CHECK(star.ambient_dim() == 1);
  CHECK(star.facet_count() == 2);
  WeightedComplex local = star.divisor(germ);
  CHECK(local.degree0() == 1);

  // locality: this equals the weight the global divisor assigns to the ray
  WeightedComplex global = plane.divisor(max_xy0());
  bool found = false;
  for (int i = 0; i < global.facet_count(); ++i)
    if (global.facet(i).same_as(tau)) {
      found = true;
      CHECK(global.weight(i) == 1);
    }
  CHECK(found);

  // germ of an affine function is affine: zero divisor
  auto [star2, germ2] = refined.star_with_germ(tau, PLFunction::linear(rv({2, 5})));
  CHECK(star2.divisor(germ2).is_empty());
}

TEST_CASE("push-forward examples") {
  // identity
  CycleMorphism id2{IntMat(IntMat::Identity(2, 2)), RatVec()};
  CHECK(push_forward(id2, curve_fan(1)).equals_up_to_refinement(curve_fan(1)));

  // doubling on R multiplies the weight by the lattice index
  CycleMorphism dbl{IntMat(IntMat::Constant(1, 1, Int(2))), RatVec()};
  WeightedComplex img = push_forward(dbl, WeightedComplex::full_space(1));
  CHECK(img.facet_count() == 1);
  CHECK(img.weight(0) == 2);

  // first-coordinate projection of the one-curve: the vertical ray collapses
  IntMat pr(1, 2);
  pr << 1, 0;
  WeightedComplex down = push_forward(CycleMorphism{pr, RatVec()}, curve_fan(1));
  CHECK(down.equals_up_to_refinement(line1()));
  CHECK(down.check_balanced().ok);
}

TEST_CASE("pull-back and the projection formula") {
  IntMat pr(1, 2);
  pr << 1, 0;
  CycleMorphism f{pr, RatVec()};
  PLFunction phi = PLFunction::max_terms({{rv({1}), Rat(0)}, {rv({0}), Rat(0)}});
  PLFunction lifted = pull_back(f, phi);
  CHECK(lifted.is_max_form());
  CHECK(lifted.value_at(rv({3, 7})) == 3);
  CHECK(lifted.value_at(rv({-2, 7})) == 0);

  WeightedComplex x = curve_fan(1);
  WeightedComplex lhs = push_forward(f, x.divisor(lifted));
  WeightedComplex rhs = push_forward(f, x).divisor(phi);
  CHECK(lhs.equals_up_to_refinement(rhs));
}

TEST_CASE("products of cycles") {
  WeightedComplex pt = WeightedComplex::from_facets(1, 0, {Polyhedron::point(rv({0}))}, {Int(1)});
  WeightedComplex x = line1();
  CHECK(x.product(pt).dim() == 1);
  CHECK(x.product(pt).facet_count() == 2);
  CHECK(x.product(x).facet_count() == 4);
  WeightedComplex scaled = x.scaled(Int(3));
  CHECK(scaled.product(x.scaled(Int(2))).weight(0) == 6);
}

TEST_CASE("stable intersection: identity, lines, Bezout") {
  WeightedComplex plane = WeightedComplex::full_space(2);
  WeightedComplex c1 = curve_fan(1);
  CHECK(plane.diagonal_intersection(c1).equals_up_to_refinement(c1));

  WeightedComplex self = c1.diagonal_intersection(c1);
  CHECK(self.dim() == 0);
  CHECK(self.degree0() == 1);

  WeightedComplex conic = curve_fan(2);
  CHECK(conic.diagonal_intersection(conic).degree0() == 4);
  CHECK(curve_fan(2).diagonal_intersection(curve_fan(3)).degree0() == 6);
}

TEST_CASE("transversal intersection of shifted curves") {
  WeightedComplex a = curve_fan(1);
  WeightedComplex b = a.translate(rv({3, 1}));
  WeightedComplex t = a.transversal_intersection(b);
  CHECK(t.dim() == 0);
  CHECK(t.facet_count() == 1);
  CHECK(t.facet(0).same_as(Polyhedron::point(rv({1, 1}))));
  CHECK(t.degree0() == 1);

  // crossing full lines with index 2
  WeightedComplex d1 = WeightedComplex::from_facets(
      2, 1, {Polyhedron::cone_from_rays(2, RatMat(0, 2), rows({{1, 1}}, 2))}, {Int(1)});
  WeightedComplex d2 = WeightedComplex::from_facets(
      2, 1, {Polyhedron::cone_from_rays(2, RatMat(0, 2), rows({{1, -1}}, 2))}, {Int(1)});
  WeightedComplex w = d1.transversal_intersection(d2);
  CHECK(w.degree0() == 2);

  // agreement with the stable intersection
  CHECK(a.diagonal_intersection(b).equals_up_to_refinement(t));
}

TEST_CASE("degree is invariant under translation of one factor") {
  WeightedComplex c = curve_fan(2);
  WeightedComplex z = curve_fan(3);
  for (uint64_t seed : {1u, 2u, 3u}) {
    WeightedComplex moved = random_translation(c, seed);
    CHECK(moved.check_balanced().ok);
    CHECK(moved.diagonal_intersection(z).degree0() == 6);
  }
}

TEST_CASE("recession fans") {
  // bounded complex: empty recession fan
  Polyhedron seg = Polyhedron::from_generators(2, rows({{0, 0}, {1, 0}}, 2), RatMat(0, 2),
                                               RatMat(0, 2));
  WeightedComplex b = WeightedComplex::from_facets(2, 1, {seg}, {Int(1)});
  CHECK(b.recession_fan().is_empty());

  // a fan is its own recession fan
  CHECK(curve_fan(1).recession_fan().equals_up_to_refinement(curve_fan(1)));

  // a translated curve recedes to the fan
  WeightedComplex moved = curve_fan(1).translate(rv({5, -2}));
  CHECK(moved.recession_fan().equals_up_to_refinement(curve_fan(1)));
}

TEST_CASE("degree0 edge cases") {
  CHECK(WeightedComplex::empty_cycle(2, 0).degree0() == 0);
  WeightedComplex p =
      WeightedComplex::from_facets(2, 0, {Polyhedron::point(rv({1, 2}))}, {Int(5)});
  CHECK(p.degree0() == 5);
  CHECK_THROWS(curve_fan(1).degree0());
}

TEST_CASE("convexity checks") {
  WeightedComplex rline = WeightedComplex::full_space(1).refined_by({{rv({1}), Rat(0)}});
  PLFunction mx = PLFunction::max_terms({{rv({1}), Rat(0)}, {rv({0}), Rat(0)}});
  CHECK(is_convex_on(mx, rline));
  // min(x,0) per cell: x on x<=0, 0 on x>=0 (facet order is canonical: the
  // negative cell sorts first)
  std::vector<std::pair<RatVec, Rat>> per;
  for (int i = 0; i < rline.facet_count(); ++i) {
    bool neg = rline.facet(i).contains(rv({-1}));
    per.push_back({neg ? rv({1}) : rv({0}), Rat(0)});
  }
  CHECK(!is_convex_on(PLFunction::cell_affine(per), rline));

  WeightedComplex rplane = WeightedComplex::full_space(2).refined_by(
      {{rv({1, -1}), Rat(0)}, {rv({1, 0}), Rat(0)}, {rv({0, 1}), Rat(0)}});
  CHECK(is_convex_on(max_xy0(), rplane));
}

TEST_CASE("fan displacement products on complete fans") {
  // the complete fan with the three maximal cones spanned by the one-curve's
  // rays, all weights 1: the fundamental class of the plane
  auto cone2 = [](std::initializer_list<long> a, std::initializer_list<long> b) {
    RatMat m(2, 2);
    int j = 0;
    for (long x : a) m(0, j++) = x;
    j = 0;
    for (long x : b) m(1, j++) = x;
    return Polyhedron::cone_from_rays(2, m, RatMat(0, 2));
  };
  WeightedComplex theta = WeightedComplex::from_facets(
      2, 2, {cone2({1, 1}, {-1, 0}), cone2({-1, 0}, {0, -1}), cone2({0, -1}, {1, 1})},
      {Int(1), Int(1), Int(1)});
  WeightedComplex lineclass = curve_fan(1);

  // fundamental class is the identity
  WeightedComplex idp = fan_displacement_product(theta, lineclass, theta, 7);
  CHECK(idp.equals_up_to_refinement(lineclass));

  // line . line = point of weight 1, matching the stable intersection
  WeightedComplex ptclass = fan_displacement_product(lineclass, lineclass, theta, 7);
  CHECK(ptclass.dim() == 0);
  CHECK(ptclass.degree0() == 1);
  CHECK(ptclass.equals_up_to_refinement(lineclass.diagonal_intersection(lineclass)));

  // parallel rulings on the quadric surface fan multiply to zero
  WeightedComplex quad = WeightedComplex::from_facets(
      2, 2,
      {cone2({1, 0}, {0, 1}), cone2({0, 1}, {-1, 0}), cone2({-1, 0}, {0, -1}),
       cone2({0, -1}, {1, 0})},
      {Int(1), Int(1), Int(1), Int(1)});
  WeightedComplex ruling = WeightedComplex::from_facets(
      2, 1, {ray_cone({0, 1}), ray_cone({0, -1})}, {Int(1), Int(1)});
  CHECK(fan_displacement_product(ruling, ruling, quad, 11).is_empty());
}

TEST_CASE("json round trip of complexes and functions") {
  WeightedComplex c = curve_fan(2).translate(rv({1, -3}));
  auto j = complex_to_json(c);
  WeightedComplex back = complex_from_json(j);
  CHECK(back.equals_up_to_refinement(c));
  CHECK(complex_to_json(back) == j);

  PLFunction f = max_xy0();
  auto jf = plfunction_to_json(f);
  PLFunction f2 = plfunction_from_json(jf);
  RatVec x = rv({3, -1});
  CHECK(f2.value_at(x) == f.value_at(x));

  PLFunction rvf = PLFunction::ray_values({{primitive_scale(rv({1, 1})), Rat(1)},
                                           {primitive_scale(rv({-1, 0})), Rat(0)},
                                           {primitive_scale(rv({0, -1})), Rat(0)}});
  PLFunction rvf2 = plfunction_from_json(plfunction_to_json(rvf));
  auto [cov, cst] = rvf2.affine_on(curve_fan(1).facet(0));
  CHECK(cov(0) + cov(1) == 1);
  CHECK(cst == 0);
}

TEST_CASE("star of a product matches the product of stars") {
  WeightedComplex a = curve_fan(1);
  WeightedComplex prod = a.product(a);
  Polyhedron origin = Polyhedron::point(rv({0, 0, 0, 0}));
  CHECK(prod.star(origin).equals_up_to_refinement(prod));
}
