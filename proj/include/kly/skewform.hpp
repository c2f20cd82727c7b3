#pragma once

#include <vector>

#include "kly/matrix.hpp"

namespace kly {

namespace detail {
inline i64 pair_with(const Mat& form, const Mat& u, const Mat& v) {
  // {}^t u . form . v for column vectors u, v
  Mat r = u.transpose() * form * v;
  return r(0, 0);
}
}  // namespace detail

/// Hyperbolic basis construction: returns y with {}^t y a y = J_{2m}, exactly.
/// Pairs are mapped onto the (e_i, e_{2m+1-i}) slots of J.
inline Mat symplectic_gram_schmidt(const Mat& a) {
  if (!a.square() || a.rows() % 2 != 0) throw std::invalid_argument("symplectic_gram_schmidt: size must be even");
  if (!is_alternating(a)) throw std::invalid_argument("symplectic_gram_schmidt: form is not alternating");
  if (!a.invertible()) throw std::invalid_argument("symplectic_gram_schmidt: form is singular");
  const Field f = a.field();
  const int n = a.rows();
  const int m = n / 2;

  std::vector<Mat> rest;
  rest.reserve(n);
  for (int i = 0; i < n; ++i) {
    Mat e(f, n, 1);
    e(i, 0) = 1;
    rest.push_back(e);
  }

  Mat y(f, n, n);
  for (int idx = 0; idx < m; ++idx) {
    Mat u = rest.front();
    rest.erase(rest.begin());
    int partner = -1;
    for (size_t t = 0; t < rest.size(); ++t)
      if (detail::pair_with(a, u, rest[t]) != 0) {
        partner = static_cast<int>(t);
        break;
      }
    if (partner < 0) throw TheoryViolation("gram-schmidt: no partner for a basis vector of a nondegenerate form");
    Mat v = rest[partner];
    rest.erase(rest.begin() + partner);
    v = v.scaled(f.inv(detail::pair_with(a, u, v)));  // <u,v> = 1
    for (auto& t : rest) {
      i64 cu = detail::pair_with(a, u, t);
      i64 cv = detail::pair_with(a, v, t);
      // t <- t - <u,t> v + <v,t> u   kills both pairings
      t = t - v.scaled(cu) + u.scaled(cv);
    }
    y.paste(0, idx, u);
    y.paste(0, n - 1 - idx, v);
  }
  if (y.transpose() * a * y != standard_symplectic_form(f, n)) throw TheoryViolation("gram-schmidt round trip failed");
  return y;
}

/// Given an invertible alternating x of size 2m whose top-left l x l block is
/// zero, produce q in the parabolic P_(l, 2m-l) with {}^t q x q = J_{2m}.
inline Mat skew_parabolic_reduce(const Mat& x, int l) {
  if (!x.square() || x.rows() % 2 != 0) throw std::invalid_argument("skew_parabolic_reduce: size must be even");
  const int n = x.rows();
  const int m = n / 2;
  if (l < 0 || l > m) throw std::invalid_argument("skew_parabolic_reduce: need l <= m");
  if (!is_alternating(x) || !x.invertible()) throw std::invalid_argument("skew_parabolic_reduce: need invertible alternating form");
  for (int i = 0; i < l; ++i)
    for (int j = 0; j < l; ++j)
      if (x(i, j) != 0)
        throw std::invalid_argument("skew_parabolic_reduce: isotropy precondition fails at entry (" +
                                    std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
  const Field f = x.field();
  const int c = n - l;          // 2m - l
  const int mid = n - 2 * l;    // 2(m - l)

  if (l == 0) return symplectic_gram_schmidt(x);

  // Step 1: A = top-right l x (2m-l) block has rank l; find alpha, gamma with
  // {}^t alpha A gamma = (0 | w_l). Row-reduce A to put pivots in echelon,
  // then permute/shear columns into the w_l slots.
  Mat A = x.submatrix(0, l, l, c);
  Mat alpha_t = Mat::identity(f, l);  // accumulates {}^t alpha (left factor)
  Mat gamma = Mat::identity(f, c);
  Mat M = A;
  std::vector<int> pivot_col(l, -1);
  int row = 0;
  for (int col = 0; col < c && row < l; ++col) {
    int piv = -1;
    for (int i = row; i < l; ++i)
      if (M(i, col) != 0) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    if (piv != row) {
      for (int j = 0; j < c; ++j) std::swap(M(row, j), M(piv, j));
      for (int j = 0; j < l; ++j) std::swap(alpha_t(row, j), alpha_t(piv, j));
    }
    i64 inv = f.inv(M(row, col));
    for (int j = 0; j < c; ++j) M(row, j) = f.mul(M(row, j), inv);
    for (int j = 0; j < l; ++j) alpha_t(row, j) = f.mul(alpha_t(row, j), inv);
    for (int i = 0; i < l; ++i) {
      if (i == row || M(i, col) == 0) continue;
      i64 cc = M(i, col);
      for (int j = 0; j < c; ++j) M(i, j) = f.sub(M(i, j), f.mul(cc, M(row, j)));
      for (int j = 0; j < l; ++j) alpha_t(i, j) = f.sub(alpha_t(i, j), f.mul(cc, alpha_t(row, j)));
    }
    pivot_col[row] = col;
    ++row;
  }
  if (row != l) throw TheoryViolation("skew_parabolic_reduce: A-block is rank deficient");
  // Column ops on M (accumulated into gamma): clear non-pivot columns, then
  // route pivot i to target column mid + (l - 1 - i)  (the w_l pattern).
  for (int i = 0; i < l; ++i) {
    int pc = pivot_col[i];
    for (int j = 0; j < c; ++j) {
      if (j == pc || M(i, j) == 0) continue;
      i64 cc = M(i, j);  // col_j -= cc * col_pc
      for (int t = 0; t < l; ++t) M(t, j) = f.sub(M(t, j), f.mul(cc, M(t, pc)));
      for (int t = 0; t < c; ++t) gamma(t, j) = f.sub(gamma(t, j), f.mul(cc, gamma(t, pc)));
    }
  }
  // Now M has e-columns at pivot positions and zero elsewhere; permute columns
  // so pivot row i lands at column mid + (l - 1 - i), the w_l pattern.
  {
    Mat perm(f, c, c);
    std::vector<bool> used(c, false);
    for (int i = 0; i < l; ++i) {
      perm(pivot_col[i], mid + (l - 1 - i)) = 1;
      used[pivot_col[i]] = true;
    }
    int slot = 0;
    for (int j = 0; j < c; ++j) {
      if (used[j]) continue;
      perm(j, slot++) = 1;
    }
    gamma = gamma * perm;
    M = M * perm;
  }
  Mat w_l = antidiag_identity(f, l);
  {
    Mat target = Mat::block_compose(f, {{Mat::zero(f, l, mid), w_l}});
    if (alpha_t * A * gamma != target) throw TheoryViolation("skew_parabolic_reduce: (0|w) normalization failed");
  }

  Mat alpha = alpha_t.transpose();
  Mat q0 = Mat::block_diag(alpha, gamma);
  Mat x1 = q0.transpose() * x * q0;  // ( 0 0 w ; 0 a b ; -w -tb d )

  Mat a_mid = x1.submatrix(l, l, mid, mid);
  Mat b = x1.submatrix(l, l + mid, mid, l);
  Mat d = x1.submatrix(l + mid, l + mid, l, l);

  Mat beta1 = -(w_l * b.transpose());
  Mat beta2 = w_l * strict_upper(d);
  Mat shear = Mat::identity(f, n);
  shear.paste(0, l, beta1);
  shear.paste(0, l + mid, beta2);
  Mat x2 = shear.transpose() * x1 * shear;
  if (x2.submatrix(l, l + mid, mid, l) != Mat::zero(f, mid, l) ||
      x2.submatrix(l + mid, l + mid, l, l) != Mat::zero(f, l, l))
    throw TheoryViolation("skew_parabolic_reduce: shear did not clear the border blocks");

  Mat y = symplectic_gram_schmidt(a_mid);
  Mat q = q0 * shear * Mat::block_diag(Mat::block_diag(Mat::identity(f, l), y), Mat::identity(f, l));
  if (q.transpose() * x * q != standard_symplectic_form(f, n)) throw TheoryViolation("skew_parabolic_reduce: final form is not J");
  // q must lie in P_(l, 2m-l): zero lower-left block
  for (int i = l; i < n; ++i)
    for (int j = 0; j < l; ++j)
      if (q(i, j) != 0) throw TheoryViolation("skew_parabolic_reduce: factor left the parabolic");
  return q;
}

}  // namespace kly
