#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "kly/groups.hpp"

namespace kly {

using Perm = std::vector<int>;  // w[j] = image of j, 0-indexed

inline Perm perm_identity(int n) {
  Perm w(n);
  std::iota(w.begin(), w.end(), 0);
  return w;
}

inline Perm perm_inverse(const Perm& w) {
  Perm inv(w.size());
  for (size_t j = 0; j < w.size(); ++j) inv[w[j]] = static_cast<int>(j);
  return inv;
}

inline Perm perm_compose(const Perm& a, const Perm& b) {  // (a o b)(j) = a(b(j))
  Perm r(b.size());
  for (size_t j = 0; j < b.size(); ++j) r[j] = a[b[j]];
  return r;
}

/// Matrix of w: column j carries e_{w(j)}.
inline Mat perm_matrix(const Field& f, const Perm& w) {
  Mat m(f, static_cast<int>(w.size()), static_cast<int>(w.size()));
  for (size_t j = 0; j < w.size(); ++j) m(w[j], static_cast<int>(j)) = 1;
  return m;
}

inline bool is_perm_matrix(const Mat& m, Perm* out = nullptr) {
  if (!m.square()) return false;
  Perm w(m.rows(), -1);
  for (int j = 0; j < m.cols(); ++j) {
    int hit = -1;
    for (int i = 0; i < m.rows(); ++i) {
      if (m(i, j) == 0) continue;
      if (m(i, j) != 1 || hit >= 0) return false;
      hit = i;
    }
    if (hit < 0) return false;
    w[j] = hit;
  }
  std::vector<bool> seen(m.rows(), false);
  for (int i : w) {
    if (seen[i]) return false;
    seen[i] = true;
  }
  if (out) *out = w;
  return true;
}

/// Reducedness for the pair of Levis of type (1^r, 2k) and (1^r', 2k'):
/// w^{-1} strictly increasing on the block [r+1, n] and w strictly increasing
/// on [r'+1, n].
inline bool is_reduced_weyl(const Perm& w, const PairShape& ps) {
  Perm wi = perm_inverse(w);
  for (int i = ps.r() + 1; i < ps.n(); ++i)
    if (wi[i - 1] > wi[i]) return false;
  for (int j = ps.rp() + 1; j < ps.n(); ++j)
    if (w[j - 1] > w[j]) return false;
  return true;
}

/// All reduced double-coset representatives, lexicographic order.
inline std::vector<Perm> reduced_reps(const PairShape& ps) {
  Perm w = perm_identity(ps.n());
  std::vector<Perm> out;
  do {
    if (is_reduced_weyl(w, ps)) out.push_back(w);
  } while (std::next_permutation(w.begin(), w.end()));
  return out;
}

/// I_w = { i in [1,r] : w^{-1}(i) in [1,r'] }, returned 0-indexed ascending.
inline std::vector<int> i_w_set(const Perm& w, const PairShape& ps) {
  Perm wi = perm_inverse(w);
  std::vector<int> out;
  for (int i = 0; i < ps.r(); ++i)
    if (wi[i] < ps.rp()) out.push_back(i);
  return out;
}

struct BruhatCell {
  Perm w;
  Mat p;     // in P = P_(1^r, 2k)
  Mat pbar;  // in the opposite parabolic of P' = P_(1^r', 2k')
};

namespace detail {

/// M-blocks of type (1^r, rest): {0},...,{r-1},[r,n).
inline std::vector<std::pair<int, int>> levi_blocks(int n, int r) {
  std::vector<std::pair<int, int>> b;
  for (int i = 0; i < r; ++i) b.push_back({i, i + 1});
  if (r < n) b.push_back({r, n});
  return b;
}

/// Factor w = sigma o w_red o sigma' with sigma in W_M (preserving out-blocks),
/// sigma' in W_M' (preserving in-blocks) and w_red the reduced representative.
inline void normalize_double_coset(const Perm& w, const PairShape& ps, Perm& w_red, Perm& sigma, Perm& sigma_p) {
  const int n = ps.n();
  auto rows = levi_blocks(n, ps.r());    // out-blocks R_i
  auto cols = levi_blocks(n, ps.rp());   // in-blocks C_j
  const int nr = static_cast<int>(rows.size()), nc = static_cast<int>(cols.size());

  // cell sets A_{ij} = { w(c) : c in C_j } intersect R_i, ascending
  std::vector<std::vector<std::vector<int>>> cell(nr, std::vector<std::vector<int>>(nc));
  for (int j = 0; j < nc; ++j)
    for (int c = cols[j].first; c < cols[j].second; ++c) {
      int v = w[c];
      for (int i = 0; i < nr; ++i)
        if (v >= rows[i].first && v < rows[i].second) cell[i][j].push_back(v);
    }
  for (auto& ri : cell)
    for (auto& s : ri) std::sort(s.begin(), s.end());

  // reduced representative: within R_i, consecutive chunks of sizes |A_{ij}|;
  // within C_j ascending inputs take chunk values for i ascending.
  std::vector<std::vector<std::vector<int>>> chunk(nr, std::vector<std::vector<int>>(nc));
  for (int i = 0; i < nr; ++i) {
    int next = rows[i].first;
    for (int j = 0; j < nc; ++j)
      for (size_t t = 0; t < cell[i][j].size(); ++t) chunk[i][j].push_back(next++);
  }
  w_red.assign(n, -1);
  for (int j = 0; j < nc; ++j) {
    int c = cols[j].first;
    for (int i = 0; i < nr; ++i)
      for (int v : chunk[i][j]) w_red[c++] = v;
  }
  // sigma: order-preserving map chunk(i,j) -> A_{ij} inside each R_i
  sigma = perm_identity(n);
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < nc; ++j)
      for (size_t t = 0; t < chunk[i][j].size(); ++t) sigma[chunk[i][j][t]] = cell[i][j][t];
  // sigma' = w_red^{-1} o sigma^{-1} o w
  sigma_p = perm_compose(perm_inverse(w_red), perm_compose(perm_inverse(sigma), w));
  if (perm_compose(sigma, perm_compose(w_red, sigma_p)) != w)
    throw TheoryViolation("double coset normalization does not recompose");
  if (!is_reduced_weyl(w_red, ps)) throw TheoryViolation("normalized representative is not reduced");
}

}  // namespace detail

/// Locate g in its cell P w Pbar' and produce the exact factorization
/// g = p . w . pbar. Elimination uses only moves allowed on each side:
/// adding lower rows to higher rows / row scaling on the left, adding later
/// columns to earlier columns on the right; pivots are chosen bottommost,
/// scanning columns right to left.
inline BruhatCell bruhat_cell(const Mat& g, const PairShape& ps) {
  if (!g.square() || g.rows() != ps.n()) throw std::invalid_argument("bruhat_cell: size mismatch");
  if (!g.invertible()) throw std::invalid_argument("bruhat_cell: matrix is singular");
  const Field f = g.field();
  const int n = ps.n();
  Mat m = g;
  Mat p_acc = Mat::identity(f, n);
  Mat r_acc = Mat::identity(f, n);
  std::vector<bool> pivoted(n, false);

  for (int j = n - 1; j >= 0; --j) {
    int piv = -1;
    for (int i = n - 1; i >= 0; --i)
      if (!pivoted[i] && m(i, j) != 0) {
        piv = i;
        break;
      }
    if (piv < 0) throw TheoryViolation("bruhat_cell: no pivot available in column");
    pivoted[piv] = true;
    // scale pivot row to 1 (torus factor, absorbed on the left)
    i64 v = m(piv, j);
    if (v != 1) {
      i64 inv = f.inv(v);
      for (int t = 0; t < n; ++t) m(piv, t) = f.mul(m(piv, t), inv);
      for (int t = 0; t < n; ++t) p_acc(t, piv) = f.mul(p_acc(t, piv), v);
    }
    // clear entries above the pivot: row_i += c . row_piv, i < piv
    for (int i = 0; i < piv; ++i) {
      if (m(i, j) == 0) continue;
      i64 c = f.neg(m(i, j));
      for (int t = 0; t < n; ++t) m(i, t) = f.add(m(i, t), f.mul(c, m(piv, t)));
      // p_acc <- p_acc . (I + c E_{i,piv})^{-1} = p_acc . (I - c E_{i,piv})
      i64 nc = f.neg(c);
      for (int t = 0; t < n; ++t) p_acc(t, piv) = f.add(p_acc(t, piv), f.mul(nc, p_acc(t, i)));
    }
    // clear entries left of the pivot in its row: col_{j'} += c . col_j, j' < j
    for (int jp = 0; jp < j; ++jp) {
      if (m(piv, jp) == 0) continue;
      i64 c = f.neg(m(piv, jp));
      for (int t = 0; t < n; ++t) m(t, jp) = f.add(m(t, jp), f.mul(c, m(t, j)));
      // r_acc <- (I + c E_{j,j'})^{-1} . r_acc: row j loses c . row j'
      i64 nc = f.neg(c);
      for (int t = 0; t < n; ++t) r_acc(j, t) = f.add(r_acc(j, t), f.mul(nc, r_acc(jp, t)));
    }
  }

  Perm w_borel;
  if (!is_perm_matrix(m, &w_borel)) throw TheoryViolation("bruhat_cell: elimination did not reach a permutation");

  Perm w_red, sigma, sigma_p;
  detail::normalize_double_coset(w_borel, ps, w_red, sigma, sigma_p);
  Mat p = p_acc * perm_matrix(f, sigma);
  Mat pbar = perm_matrix(f, sigma_p) * r_acc;
  if (p * perm_matrix(f, w_red) * pbar != g) throw TheoryViolation("bruhat_cell: factorization does not recompose");
  return BruhatCell{w_red, p, pbar};
}

/// One recorded orbit move: parent = step . child under the twisted action.
using ActionHistory = std::vector<TwistedPair>;

inline Mat replay(const ActionHistory& hist, Mat rep) {
  for (auto it = hist.rbegin(); it != hist.rend(); ++it) rep = it->act(rep);
  return rep;
}

struct LeviStrip {
  Mat rep;  // in M w M'
  Mat m, mprime;  // the Levi factors: rep = m . w . mprime
  ActionHistory hist;
};

/// Peel the unipotent-radical parts of p and pbar off through the pair action,
/// leaving a representative in M w M'.
inline LeviStrip strip_to_levi(const Mat& g, const BruhatCell& cell, const PairShape& ps) {
  const Field f = g.field();
  const int n = ps.n();
  // p = u . m with m the block-diagonal part
  Mat mdiag(f, n, n);
  for (int i = 0; i < ps.r(); ++i) mdiag(i, i) = cell.p(i, i);
  mdiag.paste(ps.r(), ps.r(), cell.p.submatrix(ps.r(), ps.r(), ps.left.two_k(), ps.left.two_k()));
  Mat u = cell.p * mdiag.inverse();
  // pbar = m' . ubar
  Mat mdiag_p(f, n, n);
  for (int i = 0; i < ps.rp(); ++i) mdiag_p(i, i) = cell.pbar(i, i);
  mdiag_p.paste(ps.rp(), ps.rp(), cell.pbar.submatrix(ps.rp(), ps.rp(), ps.right.two_k(), ps.right.two_k()));
  Mat ubar = mdiag_p.inverse() * cell.pbar;

  Mat rep = mdiag * perm_matrix(f, cell.w) * mdiag_p;
  TwistedPair step(ps, u, ubar.transpose(), +1);
  if (step.act(rep) != g) throw TheoryViolation("strip_to_levi: stripped factors do not replay");
  return LeviStrip{rep, mdiag, mdiag_p, ActionHistory{step}};
}

}  // namespace kly
