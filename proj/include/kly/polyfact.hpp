#pragma once

#include <optional>
#include <random>
#include <vector>

#include "kly/matrix.hpp"

namespace kly {

/// Dense univariate polynomials over F_p, ascending coefficients, trimmed.
namespace poly {

using P = std::vector<i64>;
using u128 = unsigned __int128;

inline void trim(P& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}
inline int deg(const P& a) { return static_cast<int>(a.size()) - 1; }
inline bool is_zero(const P& a) { return a.empty(); }
inline P one() { return P{1}; }
inline P x_poly() { return P{0, 1}; }

inline P add(const Field& f, P a, const P& b) {
  if (a.size() < b.size()) a.resize(b.size(), 0);
  for (size_t i = 0; i < b.size(); ++i) a[i] = f.add(a[i], b[i]);
  trim(a);
  return a;
}
inline P sub(const Field& f, P a, const P& b) {
  if (a.size() < b.size()) a.resize(b.size(), 0);
  for (size_t i = 0; i < b.size(); ++i) a[i] = f.sub(a[i], b[i]);
  trim(a);
  return a;
}
inline P mul(const Field& f, const P& a, const P& b) {
  if (is_zero(a) || is_zero(b)) return {};
  P r(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (size_t j = 0; j < b.size(); ++j) r[i + j] = f.add(r[i + j], f.mul(a[i], b[j]));
  }
  trim(r);
  return r;
}
inline P scale(const Field& f, P a, i64 c) {
  for (auto& v : a) v = f.mul(v, c);
  trim(a);
  return a;
}

inline std::pair<P, P> divmod(const Field& f, P a, const P& b) {
  if (is_zero(b)) throw std::domain_error("poly: division by zero");
  P q(a.size() > b.size() - 1 ? a.size() - b.size() + 1 : 0, 0);
  i64 lead_inv = f.inv(b.back());
  while (!is_zero(a) && a.size() >= b.size()) {
    i64 c = f.mul(a.back(), lead_inv);
    size_t shift = a.size() - b.size();
    q[shift] = c;
    for (size_t i = 0; i < b.size(); ++i) a[shift + i] = f.sub(a[shift + i], f.mul(c, b[i]));
    trim(a);
  }
  trim(q);
  return {q, a};
}
inline P mod(const Field& f, const P& a, const P& m) { return divmod(f, a, m).second; }

inline P monic(const Field& f, P a) {
  if (is_zero(a)) return a;
  return scale(f, a, f.inv(a.back()));
}

inline P gcd(const Field& f, P a, P b) {
  while (!is_zero(b)) {
    P r = mod(f, a, b);
    a = std::move(b);
    b = std::move(r);
  }
  return monic(f, a);
}

/// Extended gcd: returns g and u with u*a = g (mod m); used for inverses.
inline P inv_mod(const Field& f, const P& a, const P& m) {
  P r0 = m, r1 = mod(f, a, m);
  P t0 = {}, t1 = one();
  while (!is_zero(r1)) {
    auto [q, r2] = divmod(f, r0, r1);
    P t2 = sub(f, t0, mul(f, q, t1));
    r0 = std::move(r1);
    r1 = std::move(r2);
    t0 = std::move(t1);
    t1 = std::move(t2);
  }
  if (deg(r0) != 0) throw std::domain_error("poly: element not invertible modulo m");
  return scale(f, t0, f.inv(r0[0]));
}

inline P pow_mod(const Field& f, P base, u128 e, const P& m) {
  P r = one();
  base = mod(f, base, m);
  while (e > 0) {
    if (e & 1) r = mod(f, mul(f, r, base), m);
    base = mod(f, mul(f, base, base), m);
    e >>= 1;
  }
  return r;
}

inline P derivative(const Field& f, const P& a) {
  P r;
  for (size_t i = 1; i < a.size(); ++i) r.push_back(f.mul(a[i], f.reduce(static_cast<i64>(i))));
  trim(r);
  return r;
}

struct Factor {
  P f;      // monic irreducible
  int mult; // multiplicity
};

namespace detail {

inline void squarefree_rec(const Field& fld, const P& fin, int mult_scale, std::vector<std::pair<P, int>>& out) {
  P f = monic(fld, fin);
  if (deg(f) <= 0) return;
  P d = derivative(fld, f);
  if (is_zero(d)) {
    // f(x) = v(x^p); over the prime field the p-th root keeps coefficients
    P v;
    for (size_t i = 0; i < f.size(); i += static_cast<size_t>(fld.p())) v.push_back(f[i]);
    squarefree_rec(fld, v, mult_scale * static_cast<int>(fld.p()), out);
    return;
  }
  P c = gcd(fld, f, d);
  P w = divmod(fld, f, c).first;
  int i = 1;
  while (deg(w) > 0) {
    P y = gcd(fld, w, c);
    P z = divmod(fld, w, y).first;
    if (deg(z) > 0) out.push_back({monic(fld, z), i * mult_scale});
    w = std::move(y);
    c = divmod(fld, c, w).first;
    ++i;
  }
  if (deg(c) > 0) squarefree_rec(fld, c, mult_scale, out);
}

inline void edf(const Field& fld, const P& h, int d, std::mt19937_64& rng, std::vector<P>& out) {
  if (deg(h) == d) {
    out.push_back(monic(fld, h));
    return;
  }
  const i64 q = fld.p();
  std::uniform_int_distribution<i64> coeff(0, q - 1);
  while (true) {
    P a(static_cast<size_t>(deg(h)), 0);
    for (auto& c : a) c = coeff(rng);
    trim(a);
    if (is_zero(a)) continue;
    P b;
    if (q % 2 == 1) {
      u128 e = 1;
      for (int i = 0; i < d; ++i) e *= static_cast<u128>(q);
      b = pow_mod(fld, a, (e - 1) / 2, h);
      b = sub(fld, b, one());
    } else {
      // trace map splits in characteristic 2
      P t = mod(fld, a, h), acc = t;
      for (int i = 1; i < d; ++i) {
        t = mod(fld, mul(fld, t, t), h);
        acc = add(fld, acc, t);
      }
      b = acc;
    }
    P g = gcd(fld, b, h);
    if (deg(g) > 0 && deg(g) < deg(h)) {
      edf(fld, g, d, rng, out);
      edf(fld, divmod(fld, h, g).first, d, rng, out);
      return;
    }
  }
}

}  // namespace detail

/// Full factorization over F_p (squarefree split + distinct degree +
/// Cantor-Zassenhaus equal degree). Randomized, caller provides the stream.
inline std::vector<Factor> factorize(const Field& fld, const P& fin, std::mt19937_64& rng) {
  std::vector<Factor> out;
  std::vector<std::pair<P, int>> sqf;
  detail::squarefree_rec(fld, fin, 1, sqf);
  for (auto& [g0, mult] : sqf) {
    P g = g0;
    P xq = x_poly();  // iterated Frobenius image of x mod g
    xq = mod(fld, xq, g);
    int d = 0;
    while (deg(g) > 0) {
      ++d;
      if (2 * d > deg(g)) {
        out.push_back({monic(fld, g), mult});
        break;
      }
      xq = pow_mod(fld, xq, static_cast<u128>(fld.p()), g);
      P split = gcd(fld, sub(fld, xq, x_poly()), g);
      if (deg(split) > 0) {
        std::vector<P> irr;
        detail::edf(fld, split, d, rng, irr);
        for (auto& h : irr) out.push_back({h, mult});
        g = divmod(fld, g, split).first;
        xq = mod(fld, xq, g);
      }
    }
  }
  return out;
}

/// Square root of x in F_p[x]/(f) for irreducible f with f(0) != 0;
/// empty if x is a quadratic non-residue there. Tonelli-Shanks.
inline std::optional<P> sqrt_of_x_mod_irreducible(const Field& fld, const P& f, std::mt19937_64& rng) {
  const i64 q = fld.p();
  const int d = deg(f);
  u128 N = 1;
  for (int i = 0; i < d; ++i) N *= static_cast<u128>(q);
  N -= 1;  // order of the multiplicative group
  P x = x_poly();
  if (q == 2) {
    // squaring is bijective: sqrt(a) = a^(2^(d-1))
    u128 e = N + 1;  // 2^d
    e /= 2;
    return pow_mod(fld, x, e, f);
  }
  P legendre = pow_mod(fld, x, N / 2, f);
  if (!(legendre.size() == 1 && legendre[0] == 1)) return std::nullopt;
  // N = 2^s m, m odd
  int s = 0;
  u128 m = N;
  while ((m & 1) == 0) {
    m >>= 1;
    ++s;
  }
  // find a non-residue
  std::uniform_int_distribution<i64> coeff(0, q - 1);
  P nr;
  while (true) {
    P a(static_cast<size_t>(d), 0);
    for (auto& c : a) c = coeff(rng);
    trim(a);
    if (is_zero(a)) continue;
    P t = pow_mod(fld, a, N / 2, f);
    if (t.size() == 1 && t[0] == fld.reduce(-1)) {
      nr = a;
      break;
    }
  }
  P c = pow_mod(fld, nr, m, f);
  P t = pow_mod(fld, x, m, f);
  P r = pow_mod(fld, x, (m + 1) / 2, f);
  int mlev = s;
  while (!(t.size() == 1 && t[0] == 1)) {
    P tt = t;
    int i = 0;
    while (!(tt.size() == 1 && tt[0] == 1)) {
      tt = mod(fld, mul(fld, tt, tt), f);
      ++i;
      if (i == mlev) return std::nullopt;
    }
    P b = c;
    for (int j = 0; j < mlev - i - 1; ++j) b = mod(fld, mul(fld, b, b), f);
    mlev = i;
    c = mod(fld, mul(fld, b, b), f);
    t = mod(fld, mul(fld, t, c), f);
    r = mod(fld, mul(fld, r, b), f);
  }
  return r;
}

/// Square root of x modulo f^e (f irreducible, f(0) != 0). Hensel lifting on
/// top of the residue-field root for odd p; for p = 2 only e = 1 is supported.
inline std::optional<P> sqrt_of_x_mod_power(const Field& fld, const P& f, int e, std::mt19937_64& rng) {
  auto s0 = sqrt_of_x_mod_irreducible(fld, f, rng);
  if (!s0) return std::nullopt;
  if (e == 1) return s0;
  if (fld.p() == 2) return std::nullopt;
  P fe = one();
  for (int i = 0; i < e; ++i) fe = mul(fld, fe, f);
  P s = *s0;
  i64 half = fld.inv(2);
  for (int it = 0; it < 2 * e + 4; ++it) {
    P s_inv = inv_mod(fld, s, fe);
    P next = scale(fld, add(fld, s, mod(fld, mul(fld, x_poly(), s_inv), fe)), half);
    next = mod(fld, next, fe);
    if (next == s) break;
    s = next;
    P check = sub(fld, mod(fld, mul(fld, s, s), fe), x_poly());
    if (is_zero(check)) break;
  }
  if (!is_zero(sub(fld, mod(fld, mul(fld, s, s), fe), mod(fld, x_poly(), fe)))) return std::nullopt;
  return s;
}

inline P crt_pair(const Field& fld, const P& a1, const P& m1, const P& a2, const P& m2) {
  // u*m1 = 1 mod m2
  P u = inv_mod(fld, m1, m2);
  P diff = sub(fld, a2, a1);
  P t = mod(fld, mul(fld, u, diff), m2);
  return add(fld, a1, mul(fld, m1, t));
}

inline i64 eval(const Field& fld, const P& a, i64 x) {
  i64 r = 0;
  for (auto it = a.rbegin(); it != a.rend(); ++it) r = fld.add(fld.mul(r, x), *it);
  return r;
}

}  // namespace poly

inline Mat mat_poly_eval(const poly::P& a, const Mat& m) {
  const Field f = m.field();
  Mat r(f, m.rows(), m.cols());
  for (auto it = a.rbegin(); it != a.rend(); ++it) {
    r = r * m;
    for (int i = 0; i < m.rows(); ++i) r(i, i) = f.add(r(i, i), *it);
  }
  return r;
}

/// Minimal polynomial by Krylov spans from each standard basis vector.
inline poly::P min_poly(const Mat& a) {
  const Field f = a.field();
  const int n = a.rows();
  poly::P mu = poly::one();
  // reduced span with combination bookkeeping
  std::vector<std::vector<i64>> rows;     // reduced vectors (length n)
  std::vector<std::vector<i64>> combos;   // their expressions in Krylov terms (per seed)
  std::vector<int> pivots;
  for (int seed = 0; seed < n && poly::deg(mu) < n; ++seed) {
    std::vector<std::vector<i64>> kry_rows, kry_combos;
    std::vector<int> kry_piv;
    std::vector<i64> v(n, 0);
    v[seed] = 1;
    std::vector<i64> combo{1};
    while (true) {
      std::vector<i64> red = v, cmb = combo;
      for (size_t t = 0; t < kry_rows.size(); ++t) {
        i64 c = red[kry_piv[t]];
        if (c == 0) continue;
        for (int j = 0; j < n; ++j) red[j] = f.sub(red[j], f.mul(c, kry_rows[t][j]));
        if (cmb.size() < kry_combos[t].size()) cmb.resize(kry_combos[t].size(), 0);
        for (size_t j = 0; j < kry_combos[t].size(); ++j) cmb[j] = f.sub(cmb[j], f.mul(c, kry_combos[t][j]));
      }
      int piv = -1;
      for (int j = 0; j < n; ++j)
        if (red[j] != 0) {
          piv = j;
          break;
        }
      if (piv < 0) {
        poly::P local = cmb;
        poly::trim(local);
        local = poly::monic(f, local);
        poly::P g = poly::gcd(f, mu, local);
        mu = poly::mul(f, mu, poly::divmod(f, local, g).first);
        break;
      }
      i64 inv = f.inv(red[piv]);
      for (int j = 0; j < n; ++j) red[j] = f.mul(red[j], inv);
      for (auto& c : cmb) c = f.mul(c, inv);
      kry_rows.push_back(red);
      kry_combos.push_back(cmb);
      kry_piv.push_back(piv);
      // advance: v <- A v, combo shifts by one power
      std::vector<i64> nv(n, 0);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) nv[i] = f.add(nv[i], f.mul(a(i, j), v[j]));
      v = std::move(nv);
      combo.insert(combo.begin(), 0);
    }
  }
  return mu;
}

/// A square root of K inside the commutative algebra F[K], if one exists:
/// solves s(x)^2 = x modulo the minimal polynomial of K componentwise.
inline std::optional<Mat> sqrt_in_algebra(const Mat& k, std::mt19937_64& rng) {
  const Field f = k.field();
  poly::P mu = min_poly(k);
  auto factors = poly::factorize(f, mu, rng);
  poly::P s, m;
  bool first = true;
  for (const auto& fac : factors) {
    if (poly::deg(fac.f) == 1 && fac.f[0] == 0) return std::nullopt;  // x | mu: K singular
    auto si = poly::sqrt_of_x_mod_power(f, fac.f, fac.mult, rng);
    if (!si) return std::nullopt;
    poly::P fe = poly::one();
    for (int i = 0; i < fac.mult; ++i) fe = poly::mul(f, fe, fac.f);
    if (first) {
      s = *si;
      m = fe;
      first = false;
    } else {
      s = poly::crt_pair(f, s, m, *si, fe);
      m = poly::mul(f, m, fe);
    }
  }
  Mat root = mat_poly_eval(s, k);
  if (root * root != k) return std::nullopt;
  return root;
}

/// Basis of the unital algebra generated by commuting matrices, as a vector
/// space: closes the span under products. Caller guarantees commutativity.
inline std::vector<Mat> commutative_algebra_basis(const std::vector<Mat>& gens) {
  if (gens.empty()) return {};
  const Field f = gens[0].field();
  const int n = gens[0].rows();
  const int nn = n * n;
  std::vector<std::vector<i64>> rows;       // reduced coordinate rows
  std::vector<int> pivots;
  std::vector<Mat> basis;
  auto flatten = [&](const Mat& m) {
    std::vector<i64> v(static_cast<size_t>(nn));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) v[static_cast<size_t>(i * n + j)] = m(i, j);
    return v;
  };
  auto try_insert = [&](const Mat& m) {
    std::vector<i64> v = flatten(m);
    for (size_t t = 0; t < rows.size(); ++t) {
      i64 c = v[static_cast<size_t>(pivots[t])];
      if (c == 0) continue;
      for (int j = 0; j < nn; ++j) v[static_cast<size_t>(j)] = f.sub(v[static_cast<size_t>(j)], f.mul(c, rows[t][static_cast<size_t>(j)]));
    }
    int piv = -1;
    for (int j = 0; j < nn; ++j)
      if (v[static_cast<size_t>(j)] != 0) {
        piv = j;
        break;
      }
    if (piv < 0) return false;
    i64 inv = f.inv(v[static_cast<size_t>(piv)]);
    for (int j = 0; j < nn; ++j) v[static_cast<size_t>(j)] = f.mul(v[static_cast<size_t>(j)], inv);
    rows.push_back(std::move(v));
    pivots.push_back(piv);
    basis.push_back(m);
    return true;
  };
  try_insert(Mat::identity(f, n));
  for (const Mat& g : gens) try_insert(g);
  size_t frontier_start = 0;
  while (frontier_start < basis.size()) {
    size_t end = basis.size();
    for (size_t a = frontier_start; a < end; ++a)
      for (size_t b = 0; b <= a; ++b) try_insert(basis[a] * basis[b]);
    frontier_start = end;
  }
  return basis;
}

/// Characteristic 2 only: squaring is linear on a commutative algebra over
/// F_2, so v^2 = target is a linear system in the algebra coordinates.
inline std::optional<Mat> sqrt_char2_in_commutative_algebra(const std::vector<Mat>& basis, const Mat& target) {
  const Field f = target.field();
  if (f.p() != 2 || basis.empty()) return std::nullopt;
  const int n = target.rows();
  const int nn = n * n;
  const int dim = static_cast<int>(basis.size());
  // columns: coefficients c_i; rows: entries of sum c_i b_i^2 = target
  std::vector<std::vector<i64>> sys(static_cast<size_t>(nn), std::vector<i64>(static_cast<size_t>(dim + 1), 0));
  for (int i = 0; i < dim; ++i) {
    Mat sq = basis[static_cast<size_t>(i)] * basis[static_cast<size_t>(i)];
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) sys[static_cast<size_t>(a * n + b)][static_cast<size_t>(i)] = sq(a, b);
  }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) sys[static_cast<size_t>(a * n + b)][static_cast<size_t>(dim)] = target(a, b);
  // Gaussian elimination over F_2, augmented column last
  int rank = 0;
  std::vector<int> pivot_col;
  for (int col = 0; col < dim && rank < nn; ++col) {
    int piv = -1;
    for (int r = rank; r < nn; ++r)
      if (sys[static_cast<size_t>(r)][static_cast<size_t>(col)] != 0) {
        piv = r;
        break;
      }
    if (piv < 0) continue;
    std::swap(sys[static_cast<size_t>(rank)], sys[static_cast<size_t>(piv)]);
    for (int r = 0; r < nn; ++r) {
      if (r == rank || sys[static_cast<size_t>(r)][static_cast<size_t>(col)] == 0) continue;
      for (int j = col; j <= dim; ++j)
        sys[static_cast<size_t>(r)][static_cast<size_t>(j)] =
            f.sub(sys[static_cast<size_t>(r)][static_cast<size_t>(j)], sys[static_cast<size_t>(rank)][static_cast<size_t>(j)]);
    }
    pivot_col.push_back(col);
    ++rank;
  }
  for (int r = rank; r < nn; ++r)
    if (sys[static_cast<size_t>(r)][static_cast<size_t>(dim)] != 0) return std::nullopt;  // inconsistent
  std::vector<i64> coeffs(static_cast<size_t>(dim), 0);
  for (int r = 0; r < rank; ++r) coeffs[static_cast<size_t>(pivot_col[static_cast<size_t>(r)])] = sys[static_cast<size_t>(r)][static_cast<size_t>(dim)];
  Mat v(f, n, n);
  for (int i = 0; i < dim; ++i)
    if (coeffs[static_cast<size_t>(i)] != 0) v = v + basis[static_cast<size_t>(i)];
  if (v * v != target) return std::nullopt;
  return v;
}

/// Column basis of the kernel of m.
inline std::vector<Mat> kernel_basis(const Mat& m) {
  const Field f = m.field();
  const int rows = m.rows(), cols = m.cols();
  Mat red = m;
  std::vector<int> pivot_of_col(cols, -1);
  int rank = 0;
  for (int col = 0; col < cols && rank < rows; ++col) {
    int piv = -1;
    for (int r = rank; r < rows; ++r)
      if (red(r, col) != 0) {
        piv = r;
        break;
      }
    if (piv < 0) continue;
    for (int j = 0; j < cols; ++j) std::swap(red(rank, j), red(piv, j));
    i64 inv = f.inv(red(rank, col));
    for (int j = 0; j < cols; ++j) red(rank, j) = f.mul(red(rank, j), inv);
    for (int r = 0; r < rows; ++r) {
      if (r == rank || red(r, col) == 0) continue;
      i64 cc = red(r, col);
      for (int j = 0; j < cols; ++j) red(r, j) = f.sub(red(r, j), f.mul(cc, red(rank, j)));
    }
    pivot_of_col[col] = rank;
    ++rank;
  }
  std::vector<Mat> basis;
  for (int free_col = 0; free_col < cols; ++free_col) {
    if (pivot_of_col[free_col] >= 0) continue;
    Mat v(f, cols, 1);
    v(free_col, 0) = 1;
    for (int col = 0; col < cols; ++col) {
      int pr = pivot_of_col[col];
      if (pr >= 0) v(col, 0) = f.neg(red(pr, free_col));
    }
    basis.push_back(v);
  }
  return basis;
}

/// Basis of the centralizer { z : z k = k z } as matrices.
inline std::vector<Mat> centralizer_basis(const Mat& k) {
  const Field f = k.field();
  const int n = k.rows();
  const int nn = n * n;
  // system rows: equations (z k - k z)_{ij} = 0; columns: z_{ab}
  std::vector<std::vector<i64>> sys(static_cast<size_t>(nn), std::vector<i64>(static_cast<size_t>(nn), 0));
  auto var = [n](int a, int b) { return a * n + b; };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      auto& row = sys[static_cast<size_t>(var(i, j))];
      for (int a = 0; a < n; ++a) {
        row[static_cast<size_t>(var(i, a))] = f.add(row[static_cast<size_t>(var(i, a))], k(a, j));
        row[static_cast<size_t>(var(a, j))] = f.sub(row[static_cast<size_t>(var(a, j))], k(i, a));
      }
    }
  // nullspace by Gaussian elimination
  std::vector<int> pivot_of_col(nn, -1);
  int rank = 0;
  for (int col = 0; col < nn && rank < nn; ++col) {
    int piv = -1;
    for (int r = rank; r < nn; ++r)
      if (sys[r][col] != 0) {
        piv = r;
        break;
      }
    if (piv < 0) continue;
    std::swap(sys[rank], sys[piv]);
    i64 inv = f.inv(sys[rank][col]);
    for (int j = 0; j < nn; ++j) sys[rank][j] = f.mul(sys[rank][j], inv);
    for (int r = 0; r < nn; ++r) {
      if (r == rank || sys[r][col] == 0) continue;
      i64 c = sys[r][col];
      for (int j = 0; j < nn; ++j) sys[r][j] = f.sub(sys[r][j], f.mul(c, sys[rank][j]));
    }
    pivot_of_col[col] = rank;
    ++rank;
  }
  std::vector<Mat> basis;
  for (int free_col = 0; free_col < nn; ++free_col) {
    if (pivot_of_col[free_col] >= 0) continue;
    std::vector<i64> sol(static_cast<size_t>(nn), 0);
    sol[static_cast<size_t>(free_col)] = 1;
    for (int col = 0; col < nn; ++col) {
      int pr = pivot_of_col[col];
      if (pr < 0) continue;
      sol[static_cast<size_t>(col)] = f.neg(sys[pr][free_col]);
    }
    Mat z(f, n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) z(a, b) = sol[static_cast<size_t>(var(a, b))];
    basis.push_back(z);
  }
  return basis;
}

}  // namespace kly
