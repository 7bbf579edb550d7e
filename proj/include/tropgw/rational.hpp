#ifndef TROPGW_RATIONAL_HPP
#define TROPGW_RATIONAL_HPP

// Exact scalar types for the whole library: arbitrary-precision integers and
// rationals plugged into Eigen dense matrices. No floating point anywhere.

#include <Eigen/Dense>
#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace Eigen {

template <> struct NumTraits<mpq_class> : GenericNumTraits<mpq_class> {
  typedef mpq_class Real;
  typedef mpq_class NonInteger;
  typedef mpq_class Nested;
  static inline Real epsilon() { return 0; }
  static inline Real dummy_precision() { return 0; }
  static inline int digits10() { return 0; }
  enum {
    IsInteger = 0,
    IsSigned = 1,
    IsComplex = 0,
    RequireInitialization = 1,
    ReadCost = 6,
    AddCost = 150,
    MulCost = 100
  };
};

template <> struct NumTraits<mpz_class> : GenericNumTraits<mpz_class> {
  typedef mpz_class Real;
  typedef mpz_class NonInteger;
  typedef mpz_class Nested;
  static inline Real epsilon() { return 0; }
  static inline Real dummy_precision() { return 0; }
  static inline int digits10() { return 0; }
  enum {
    IsInteger = 1,
    IsSigned = 1,
    IsComplex = 0,
    RequireInitialization = 1,
    ReadCost = 3,
    AddCost = 60,
    MulCost = 40
  };
};

} // namespace Eigen

namespace tropgw {

using Int = mpz_class;
using Rat = mpq_class;

using IntMat = Eigen::Matrix<Int, Eigen::Dynamic, Eigen::Dynamic>;
using IntVec = Eigen::Matrix<Int, Eigen::Dynamic, 1>;
using RatMat = Eigen::Matrix<Rat, Eigen::Dynamic, Eigen::Dynamic>;
using RatVec = Eigen::Matrix<Rat, Eigen::Dynamic, 1>;

inline Rat to_rat(const Int& z) { return Rat(z); }

inline RatMat to_rat(const IntMat& m) {
  RatMat r(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) r(i, j) = Rat(m(i, j));
  return r;
}

inline RatVec to_rat(const IntVec& v) {
  RatVec r(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) r(i) = Rat(v(i));
  return r;
}

// Scale a rational vector to the primitive integer vector on the same ray.
// Zero vector maps to zero.
inline IntVec primitive_scale(const RatVec& v) {
  Int l = 1;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (v(i) != 0) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), v(i).get_den().get_mpz_t());
  IntVec w(v.size());
  Int g = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    Rat s = v(i) * l;
    w(i) = s.get_num();
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), w(i).get_mpz_t());
  }
  if (g > 1)
    for (Eigen::Index i = 0; i < v.size(); ++i) w(i) /= g;
  return w;
}

// Content: v = content * primitive, content > 0 (0 for the zero vector).
inline Int content(const IntVec& v) {
  Int g = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v(i).get_mpz_t());
  return g;
}

inline std::string rat_to_string(const Rat& q) {
  Rat c = q;
  c.canonicalize();
  if (c.get_den() == 1) return c.get_num().get_str();
  return c.get_num().get_str() + "/" + c.get_den().get_str();
}

inline Rat rat_from_string(const std::string& s) {
  Rat q;
  if (q.set_str(s, 10) != 0) throw std::invalid_argument("bad rational: " + s);
  q.canonicalize();
  return q;
}

inline int cmp3(const Rat& a, const Rat& b) { return cmp(a, b); }

// Lexicographic compare of rational vectors, for canonical sorting.
inline bool lex_less(const RatVec& a, const RatVec& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    int c = cmp(a(i), b(i));
    if (c != 0) return c < 0;
  }
  return false;
}

inline bool lex_less(const IntVec& a, const IntVec& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    int c = cmp(a(i), b(i));
    if (c != 0) return c < 0;
  }
  return false;
}

// Deterministic splitmix64; used only to drive seeded rational sampling.
struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  // integer in [lo, hi] inclusive
  long range(long lo, long hi) {
    return lo + static_cast<long>(next() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  // rational with numerator in [-2^16, 2^16], denominator in [1, 2^16]
  Rat rat16() {
    long num = range(-65536, 65536);
    long den = range(1, 65536);
    Rat q(num, den);
    q.canonicalize();
    return q;
  }
};

} // namespace tropgw

#endif
