#ifndef TROPGW_EXACTLIN_HPP
#define TROPGW_EXACTLIN_HPP

// Exact integer/rational linear algebra: Smith and Hermite normal forms,
// sublattices, lattice indices, primitive vectors. Everything is a pure
// function of immutable values.

#include "tropgw/rational.hpp"

#include <optional>
#include <variant>

namespace tropgw {

struct SmithResult {
  IntMat U; // rows x rows, unimodular
  IntMat D; // diagonal, d_i | d_{i+1}, d_i >= 0
  IntMat V; // cols x cols, unimodular
};

// U * m * V = D
SmithResult smith_normal_form(const IntMat& m);

// Row-style Hermite normal form of the row lattice of m: returns the
// canonical basis (independent rows, pivots positive, entries above each
// pivot reduced into [0, pivot)). Rows of the result generate the same
// lattice as rows of m.
IntMat hermite_basis(const IntMat& m);

// A sublattice of Z^ambient, canonicalized so equal lattices compare equal.
struct Sublattice {
  int ambient = 0;
  IntMat basis; // rank x ambient, Hermite form, rows independent

  Sublattice() = default;
  // rows of gens generate the lattice (dependencies allowed)
  Sublattice(int ambient_rank, const IntMat& gens);

  int rank() const { return static_cast<int>(basis.rows()); }
  bool operator==(const Sublattice& o) const;
  bool contains(const IntVec& v) const;
  // membership of a rational vector in the spanned Q-subspace
  bool span_contains(const RatVec& v) const;
  static Sublattice full(int ambient_rank);
};

struct Infinite {
  bool operator==(const Infinite&) const { return true; }
};
using ExtNat = std::variant<Int, Infinite>;

inline bool is_infinite(const ExtNat& e) { return std::holds_alternative<Infinite>(e); }
inline const Int& finite_value(const ExtNat& e) { return std::get<Int>(e); }

// |Z^l / h(dom)| where h is an l x ambient integer matrix acting on column
// vectors; Infinite when the image has rank < l.
ExtNat lattice_index(const IntMat& h, const Sublattice& dom);

// |Z^ambient / (lat_a + lat_b)|, Infinite when the sum is not full rank.
ExtNat index_of_sum(const Sublattice& lat_a, const Sublattice& lat_b);

// Primitive generator of span_big's lattice modulo span_small (corank 1),
// pointing to the same side as `direction`, canonicalized by reduction
// against the Hermite basis of span_small. Requires span_small saturated in
// span_big (true for all geometric lattices V cap Z^m used here).
IntVec primitive_vector(const Sublattice& span_small, const Sublattice& span_big,
                        const RatVec& direction);

// --- rational-space helpers shared by the polyhedral layer ---

// Basis (rows) of the null space {x : m x = 0} over Q.
RatMat kernel_basis(const RatMat& m);

// Saturated integer lattice Z^m cap span(rows of span_rows); rows of the
// result are a Hermite basis.
Sublattice saturated_lattice(int ambient, const RatMat& span_rows);

// One solution of m x = rhs over Q, or nullopt when inconsistent.
std::optional<RatVec> solve_consistent(const RatMat& m, const RatVec& rhs);

int rank_of(const RatMat& m);

// [big : Z-span(gens)] for gens lying in big's rational span (rows of gens are
// ambient vectors); Infinite when the span drops rank.
ExtNat sublattice_index(const Sublattice& big, const IntMat& gens);

// Integer matrix q ((m-k) x m) with ker q = span(sat) and q(Z^m) = Z^(m-k);
// sat must be saturated.
IntMat quotient_projection(const Sublattice& sat);

} // namespace tropgw

#endif
