#include "tropgw/exactlin.hpp"

#include <stdexcept>

namespace tropgw {

namespace {

void swap_rows(IntMat& m, int a, int b) { m.row(a).swap(m.row(b)); }
void swap_cols(IntMat& m, int a, int b) { m.col(a).swap(m.col(b)); }

// position of an entry with minimal nonzero absolute value in m(s.., s..)
bool min_nonzero(const IntMat& m, int s, int& pi, int& pj) {
  bool found = false;
  Int best;
  for (int i = s; i < m.rows(); ++i)
    for (int j = s; j < m.cols(); ++j) {
      if (m(i, j) == 0) continue;
      Int a = abs(m(i, j));
      if (!found || a < best) {
        found = true;
        best = a;
        pi = i;
        pj = j;
      }
    }
  return found;
}

} // namespace

SmithResult smith_normal_form(const IntMat& m) {
  const int r = static_cast<int>(m.rows()), c = static_cast<int>(m.cols());
  SmithResult res;
  res.U = IntMat::Identity(r, r);
  res.V = IntMat::Identity(c, c);
  res.D = m;
  IntMat& D = res.D;
  const int k = std::min(r, c);
  for (int s = 0; s < k; ++s) {
    int pi, pj;
    if (!min_nonzero(D, s, pi, pj)) break;
    swap_rows(D, s, pi);
    swap_rows(res.U, s, pi);
    swap_cols(D, s, pj);
    swap_cols(res.V, s, pj);
    bool dirty = true;
    while (dirty) {
      dirty = false;
      for (int i = s + 1; i < r; ++i) {
        if (D(i, s) == 0) continue;
        Int q = D(i, s) / D(s, s); // C++ truncation is fine: we re-iterate
        D.row(i) -= q * D.row(s);
        res.U.row(i) -= q * res.U.row(s);
        if (D(i, s) != 0) { // remainder smaller than pivot: swap up, restart
          swap_rows(D, s, i);
          swap_rows(res.U, s, i);
          dirty = true;
        }
      }
      for (int j = s + 1; j < c; ++j) {
        if (D(s, j) == 0) continue;
        Int q = D(s, j) / D(s, s);
        D.col(j) -= q * D.col(s);
        res.V.col(j) -= q * res.V.col(s);
        if (D(s, j) != 0) {
          swap_cols(D, s, j);
          swap_cols(res.V, s, j);
          dirty = true;
        }
      }
      if (!dirty) {
        // pivot must divide every remaining entry; if not, fold the offender in
        for (int i = s + 1; i < r && !dirty; ++i)
          for (int j = s + 1; j < c && !dirty; ++j)
            if (D(i, j) % D(s, s) != 0) {
              D.row(s) += D.row(i);
              res.U.row(s) += res.U.row(i);
              dirty = true;
            }
      }
    }
    if (D(s, s) < 0) {
      D.row(s) = -D.row(s);
      res.U.row(s) = -res.U.row(s);
    }
  }
  return res;
}

IntMat hermite_basis(const IntMat& m) {
  IntMat h = m;
  const int rows = static_cast<int>(h.rows()), cols = static_cast<int>(h.cols());
  int piv_row = 0;
  std::vector<int> piv_cols;
  for (int col = 0; col < cols && piv_row < rows; ++col) {
    // euclidean elimination in this column below piv_row
    while (true) {
      int sel = -1;
      Int best;
      for (int i = piv_row; i < rows; ++i) {
        if (h(i, col) == 0) continue;
        Int a = abs(h(i, col));
        if (sel < 0 || a < best) {
          sel = i;
          best = a;
        }
      }
      if (sel < 0) break;
      swap_rows(h, piv_row, sel);
      bool any = false;
      for (int i = piv_row + 1; i < rows; ++i) {
        if (h(i, col) == 0) continue;
        Int q;
        mpz_fdiv_q(q.get_mpz_t(), h(i, col).get_mpz_t(), h(piv_row, col).get_mpz_t());
        h.row(i) -= q * h.row(piv_row);
        if (h(i, col) != 0) any = true;
      }
      if (!any) break;
    }
    if (h(piv_row, col) != 0) {
      if (h(piv_row, col) < 0) h.row(piv_row) = -h.row(piv_row);
      piv_cols.push_back(col);
      ++piv_row;
    }
  }
  IntMat out(piv_row, cols);
  for (int i = 0; i < piv_row; ++i) out.row(i) = h.row(i);
  // reduce entries above each pivot into [0, pivot)
  for (int i = 0; i < piv_row; ++i) {
    int pc = piv_cols[i];
    for (int j = 0; j < i; ++j) {
      Int q;
      mpz_fdiv_q(q.get_mpz_t(), out(j, pc).get_mpz_t(), out(i, pc).get_mpz_t());
      if (q != 0) out.row(j) -= q * out.row(i);
    }
  }
  return out;
}

Sublattice::Sublattice(int ambient_rank, const IntMat& gens) : ambient(ambient_rank) {
  if (gens.rows() == 0) {
    basis = IntMat(0, ambient_rank);
    return;
  }
  if (gens.cols() != ambient_rank) throw std::invalid_argument("sublattice: ambient mismatch");
  basis = hermite_basis(gens);
}

Sublattice Sublattice::full(int ambient_rank) {
  return Sublattice(ambient_rank, IntMat::Identity(ambient_rank, ambient_rank));
}

bool Sublattice::operator==(const Sublattice& o) const {
  return ambient == o.ambient && basis.rows() == o.basis.rows() && basis == o.basis;
}

bool Sublattice::contains(const IntVec& v) const {
  // reduce v against the Hermite basis; member iff reduction hits zero
  IntVec w = v;
  int row = 0;
  for (int col = 0; col < ambient && row < basis.rows(); ++col) {
    if (basis(row, col) == 0) continue;
    // basis(row, col) is the pivot of this row
    bool is_pivot = true;
    for (int r2 = 0; r2 < row; ++r2)
      if (basis(r2, col) != 0 && false) is_pivot = false;
    (void)is_pivot;
    if (w(col) % basis(row, col) != 0) return false;
    Int q = w(col) / basis(row, col);
    for (int j = 0; j < ambient; ++j) w(j) -= q * basis(row, j);
    ++row;
  }
  for (int j = 0; j < ambient; ++j)
    if (w(j) != 0) return false;
  return true;
}

bool Sublattice::span_contains(const RatVec& v) const {
  if (basis.rows() == 0) return v.isZero();
  RatMat a = to_rat(basis).transpose(); // ambient x rank
  return solve_consistent(a, v).has_value();
}

ExtNat lattice_index(const IntMat& h, const Sublattice& dom) {
  if (h.cols() != dom.ambient) throw std::invalid_argument("lattice_index: dimension mismatch");
  const int l = static_cast<int>(h.rows());
  // image lattice generated by h * (basis rows as columns)
  IntMat img(dom.basis.rows(), l);
  for (int i = 0; i < dom.basis.rows(); ++i) {
    IntVec b = dom.basis.row(i).transpose();
    img.row(i) = (h * b).transpose();
  }
  IntMat hb = hermite_basis(img);
  if (hb.rows() < l) return Infinite{};
  Int idx = 1;
  // hermite basis of full rank in Z^l: product of pivots
  int row = 0;
  for (int col = 0; col < l && row < hb.rows(); ++col) {
    if (hb(row, col) != 0) {
      idx *= hb(row, col);
      ++row;
    }
  }
  return idx;
}

ExtNat index_of_sum(const Sublattice& lat_a, const Sublattice& lat_b) {
  if (lat_a.ambient != lat_b.ambient) throw std::invalid_argument("index_of_sum: dimension mismatch");
  IntMat stacked(lat_a.basis.rows() + lat_b.basis.rows(), lat_a.ambient);
  stacked << lat_a.basis, lat_b.basis;
  IntMat hb = hermite_basis(stacked);
  if (hb.rows() < lat_a.ambient) return Infinite{};
  Int idx = 1;
  for (int i = 0; i < hb.rows(); ++i)
    for (int j = 0; j < hb.cols(); ++j)
      if (hb(i, j) != 0) {
        idx *= hb(i, j);
        break;
      }
  return idx;
}

IntVec primitive_vector(const Sublattice& span_small, const Sublattice& span_big,
                        const RatVec& direction) {
  if (span_small.ambient != span_big.ambient)
    throw std::invalid_argument("primitive_vector: dimension mismatch");
  const int k = span_big.rank();
  if (span_small.rank() != k - 1) throw std::invalid_argument("primitive_vector: corank is not 1");
  if (span_small.span_contains(direction))
    throw std::invalid_argument("primitive_vector: direction inside the small span");
  // express small basis in big's basis coordinates (integral since small c big)
  RatMat bigT = to_rat(span_big.basis).transpose(); // ambient x k
  IntMat C(k - 1, k);
  for (int i = 0; i < k - 1; ++i) {
    IntVec srow = span_small.basis.row(i).transpose();
    auto sol = solve_consistent(bigT, to_rat(srow));
    if (!sol) throw std::invalid_argument("primitive_vector: small not contained in big");
    for (int j = 0; j < k; ++j) {
      if ((*sol)(j).get_den() != 1)
        throw std::invalid_argument("primitive_vector: small lattice not inside big lattice");
      C(i, j) = (*sol)(j).get_num();
    }
  }
  SmithResult s = smith_normal_form(C);
  for (int i = 0; i < k - 1; ++i)
    if (s.D(i, i) != 1)
      throw std::invalid_argument("primitive_vector: small lattice not saturated in big");
  // quotient Z^k / rowlat(C) generated by the last row of V^{-1}; compute
  // V^{-1} via adjugate-free route: solve V^T x = e_k? Easier: last row of
  // V^{-1} is the last column of (V^{-1})^T = (V^T)^{-1}; use exact LU.
  RatMat Vt = to_rat(s.V).transpose();
  RatVec ek = RatVec::Zero(k);
  ek(k - 1) = 1;
  Eigen::FullPivLU<RatMat> lu(Vt);
  RatVec crat = lu.solve(ek); // row c of V^{-1} as column
  IntVec c(k);
  for (int j = 0; j < k; ++j) {
    if (crat(j).get_den() != 1) throw std::logic_error("primitive_vector: nonintegral inverse row");
    c(j) = crat(j).get_num();
  }
  // orient toward `direction`: direction = gamma . bigbasis, compare the
  // quotient coordinate (last coordinate of gamma * V)
  auto gamma = solve_consistent(bigT, direction);
  if (!gamma) throw std::invalid_argument("primitive_vector: direction outside big span");
  Rat side = 0;
  for (int j = 0; j < k; ++j) side += (*gamma)(j) * Rat(s.V(j, k - 1));
  if (side == 0) throw std::logic_error("primitive_vector: direction has no quotient component");
  if (side < 0) c = -c;
  // canonicalize modulo the small lattice (reduce against Hermite basis of C)
  IntMat hb = hermite_basis(C);
  int row = 0;
  for (int col = 0; col < k && row < hb.rows(); ++col) {
    if (hb(row, col) == 0) continue;
    Int q;
    mpz_fdiv_q(q.get_mpz_t(), c(col).get_mpz_t(), hb(row, col).get_mpz_t());
    if (q != 0)
      for (int j = 0; j < k; ++j) c(j) -= q * hb(row, j);
    ++row;
  }
  // back to ambient coordinates
  IntVec v = IntVec::Zero(span_big.ambient);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < span_big.ambient; ++j) v(j) += c(i) * span_big.basis(i, j);
  return v;
}

RatMat kernel_basis(const RatMat& m) {
  if (m.rows() == 0) return RatMat::Identity(m.cols(), m.cols());
  Eigen::FullPivLU<RatMat> lu(m);
  RatMat k = lu.kernel(); // cols span the kernel
  if (lu.rank() == m.cols()) return RatMat(0, m.cols());
  return k.transpose();
}

Sublattice saturated_lattice(int ambient, const RatMat& span_rows) {
  if (span_rows.rows() == 0) return Sublattice(ambient, IntMat(0, ambient));
  // span = kernel of N, N rows spanning the orthogonal complement
  RatMat n = kernel_basis(span_rows);
  if (n.rows() == 0) return Sublattice::full(ambient);
  IntMat nz(n.rows(), ambient);
  for (int i = 0; i < n.rows(); ++i) nz.row(i) = primitive_scale(n.row(i).transpose()).transpose();
  // integer kernel of nz via SNF: columns of V at zero diagonal entries
  SmithResult s = smith_normal_form(nz);
  const int rk = std::min<int>(static_cast<int>(nz.rows()), ambient);
  int r = 0;
  for (int i = 0; i < rk; ++i)
    if (s.D(i, i) != 0) ++r;
  IntMat gens(ambient - r, ambient);
  for (int j = r; j < ambient; ++j) gens.row(j - r) = s.V.col(j).transpose();
  return Sublattice(ambient, gens);
}

std::optional<RatVec> solve_consistent(const RatMat& m, const RatVec& rhs) {
  if (m.rows() == 0) return RatVec::Zero(m.cols());
  Eigen::FullPivLU<RatMat> lu(m);
  RatVec x = lu.solve(rhs);
  if ((m * x - rhs).isZero()) return x;
  return std::nullopt;
}

int rank_of(const RatMat& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  Eigen::FullPivLU<RatMat> lu(m);
  return static_cast<int>(lu.rank());
}

ExtNat sublattice_index(const Sublattice& big, const IntMat& gens) {
  if (gens.cols() != big.ambient) throw std::invalid_argument("sublattice_index: ambient mismatch");
  // express each generator in big's basis; coordinates are integers because
  // the generators lie in big (integer vectors inside the saturation's span
  // need not be in big itself, so check integrality)
  RatMat bigT = to_rat(IntMat(big.basis.transpose()));
  IntMat coords(gens.rows(), big.rank());
  for (int i = 0; i < gens.rows(); ++i) {
    IntVec g = gens.row(i).transpose();
    auto sol = solve_consistent(bigT, to_rat(g));
    if (!sol) throw std::invalid_argument("sublattice_index: generator outside span");
    for (int j = 0; j < big.rank(); ++j) {
      Rat c = (*sol)(j);
      if (c.get_den() != 1) throw std::invalid_argument("sublattice_index: generator outside lattice");
      coords(i, j) = c.get_num();
    }
  }
  IntMat h = hermite_basis(coords);
  if (h.rows() < big.rank()) return Infinite{};
  // HNF of a full-rank square system: index is the product of the pivots
  Int det = 1;
  for (int i = 0; i < h.rows(); ++i) {
    Int piv = 0;
    for (int j = 0; j < h.cols(); ++j)
      if (h(i, j) != 0) {
        piv = h(i, j);
        break;
      }
    det *= piv;
  }
  return abs(det);
}

IntMat quotient_projection(const Sublattice& sat) {
  const int m = sat.ambient;
  const int k = sat.rank();
  if (k == 0) return IntMat(IntMat::Identity(m, m));
  SmithResult s = smith_normal_form(sat.basis);
  for (int i = 0; i < k; ++i)
    if (s.D(i, i) != 1) throw std::invalid_argument("quotient_projection: lattice not saturated");
  // rows of V^{-1} are a basis of Z^m whose first k rows span sat; the
  // quotient coordinates of x are the last m-k entries of (V^{-1})^{-T} x,
  // which is the transpose of the last m-k columns of V
  IntMat q(m - k, m);
  for (int i = 0; i < m - k; ++i) q.row(i) = s.V.col(k + i).transpose();
  return q;
}

} // namespace tropgw
