#pragma once

#include <algorithm>
#include <unordered_set>
#include <vector>

#include "kly/groups.hpp"

namespace kly {

inline i64 checked_pow(i64 b, int e, i64 cap) {
  i64 r = 1;
  for (int i = 0; i < e; ++i) {
    if (r > cap / b) return cap + 1;
    r *= b;
  }
  return r;
}

inline i64 order_gl(i64 q, int n) {
  i64 qn = 1;
  for (int i = 0; i < n; ++i) qn *= q;
  i64 r = 1, qi = 1;
  for (int i = 0; i < n; ++i) {
    r *= (qn - qi);
    qi *= q;
  }
  return r;
}

inline i64 order_sp(i64 q, int k) {
  i64 r = 1;
  for (int i = 0; i < k * k; ++i) r *= q;
  i64 q2i = 1;
  for (int i = 1; i <= k; ++i) {
    q2i *= q * q;
    r *= (q2i - 1);
  }
  return r;
}

inline i64 sat_mul(i64 a, i64 b, i64 cap) {
  if (a == 0 || b == 0) return 0;
  if (a > cap / b) return cap + 1;
  return a * b;
}

struct Budget {
  i64 ops = 100000000;  // elementary group operations per invocation

  void charge(i64 count, int n, const std::string& what) const {
    i64 dim = std::max(n, 1);
    i64 cost = sat_mul(sat_mul(sat_mul(count, dim, ops), dim, ops), dim, ops);
    if (cost > ops)
      throw BudgetExceeded("enumeration budget exceeded: " + what + " needs ~" + std::to_string(count) +
                           " elements of size " + std::to_string(n));
  }
};

/// All of GL_n(F_q), deterministic order: base-q odometer over the entries,
/// row major, singular matrices skipped.
inline std::vector<Mat> enumerate_gl(const Field& f, int n, const Budget& budget = {}) {
  const i64 q = f.p();
  i64 scan = checked_pow(q, n * n, budget.ops + 1);
  budget.charge(scan, n, "GL_" + std::to_string(n) + "(F_" + std::to_string(q) + ")");
  std::vector<Mat> out;
  out.reserve(static_cast<size_t>(order_gl(q, n)));
  std::vector<i64> digits(static_cast<size_t>(n) * n, 0);
  Mat m(f, n, n);
  while (true) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = digits[static_cast<size_t>(i) * n + j];
    if (m.det() != 0) out.push_back(m);
    int pos = n * n - 1;
    while (pos >= 0 && digits[pos] == q - 1) digits[pos--] = 0;
    if (pos < 0) break;
    ++digits[pos];
  }
  return out;
}

/// All upper unitriangular matrices in GL_r(F_q).
inline std::vector<Mat> enumerate_unipotent(const Field& f, int r, const Budget& budget = {}) {
  const i64 q = f.p();
  int free_entries = r * (r - 1) / 2;
  i64 cnt = checked_pow(q, free_entries, budget.ops + 1);
  budget.charge(cnt, r, "U_" + std::to_string(r));
  std::vector<Mat> out;
  std::vector<i64> digits(static_cast<size_t>(std::max(free_entries, 1)), 0);
  while (true) {
    Mat m = Mat::identity(f, r);
    int t = 0;
    for (int i = 0; i < r; ++i)
      for (int j = i + 1; j < r; ++j) m(i, j) = digits[t++];
    out.push_back(m);
    int pos = free_entries - 1;
    while (pos >= 0 && digits[pos] == q - 1) digits[pos--] = 0;
    if (pos < 0) break;
    ++digits[pos];
  }
  return out;
}

/// Symplectic transvections v -> v + c <u,v> u for u over the standard basis
/// and mixed two-element sums; generates Sp(J_{2k}).
inline std::vector<Mat> sp_transvection_generators(const Field& f, int two_k) {
  std::vector<Mat> gens;
  if (two_k == 0) return gens;
  Mat J = standard_symplectic_form(f, two_k);
  std::vector<Mat> dirs;
  for (int i = 0; i < two_k; ++i) {
    Mat e(f, two_k, 1);
    e(i, 0) = 1;
    dirs.push_back(e);
  }
  for (int i = 0; i < two_k; ++i)
    for (int j = i + 1; j < two_k; ++j) {
      Mat e(f, two_k, 1);
      e(i, 0) = 1;
      e(j, 0) = 1;
      dirs.push_back(e);
    }
  for (const Mat& u : dirs) {
    Mat row = u.transpose() * J;  // 1 x 2k
    Mat t = Mat::identity(f, two_k);
    for (int i = 0; i < two_k; ++i)
      for (int j = 0; j < two_k; ++j) t(i, j) = f.add(t(i, j), f.mul(u(i, 0), row(0, j)));
    if (t != Mat::identity(f, two_k)) gens.push_back(t);
  }
  return gens;
}

namespace detail {
struct MatKey {
  std::vector<i64> v;
  bool operator==(const MatKey& o) const { return v == o.v; }
};
struct MatKeyHash {
  size_t operator()(const MatKey& k) const {
    size_t h = 1469598103934665603ull;
    for (i64 x : k.v) {
      h ^= static_cast<size_t>(x) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
  }
};
inline MatKey key_of(const Mat& m) {
  MatKey k;
  k.v.reserve(static_cast<size_t>(m.rows()) * m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) k.v.push_back(m(i, j));
  return k;
}
}  // namespace detail

/// Sp(J_{2k})(F_q) by breadth-first closure over transvection generators,
/// returned in a canonical (lexicographic) order. Cardinality is checked
/// against the closed formula.
inline std::vector<Mat> enumerate_sp(const Field& f, int two_k, const Budget& budget = {}) {
  const i64 q = f.p();
  if (two_k == 0) return {Mat::identity(f, 0)};
  i64 expect = order_sp(q, two_k / 2);
  budget.charge(expect, two_k, "Sp_" + std::to_string(two_k) + "(F_" + std::to_string(q) + ")");
  std::vector<Mat> gens = sp_transvection_generators(f, two_k);
  std::unordered_set<detail::MatKey, detail::MatKeyHash> seen;
  std::vector<Mat> frontier{Mat::identity(f, two_k)}, all;
  seen.insert(detail::key_of(frontier[0]));
  all.push_back(frontier[0]);
  while (!frontier.empty()) {
    std::vector<Mat> next;
    for (const Mat& g : frontier)
      for (const Mat& t : gens) {
        Mat h = g * t;
        auto k = detail::key_of(h);
        if (seen.insert(std::move(k)).second) {
          next.push_back(h);
          all.push_back(std::move(h));
        }
      }
    frontier = std::move(next);
  }
  if (static_cast<i64>(all.size()) != expect)
    throw TheoryViolation("Sp closure size " + std::to_string(all.size()) + " != formula " + std::to_string(expect));
  std::sort(all.begin(), all.end(), [](const Mat& a, const Mat& b) {
    for (int i = 0; i < a.rows(); ++i)
      for (int j = 0; j < a.cols(); ++j)
        if (a(i, j) != b(i, j)) return a(i, j) < b(i, j);
    return false;
  });
  return all;
}

/// H_{r,2k}(F_q) as the product set U_r x M_{r x 2k} x Sp_{2k}, lexicographic
/// in the three indices.
inline std::vector<Mat> enumerate_h(const Field& f, const Shape& s, const Budget& budget = {}) {
  const i64 q = f.p();
  i64 xcnt = checked_pow(q, s.r * s.two_k(), budget.ops + 1);
  i64 ucnt = checked_pow(q, s.r * (s.r - 1) / 2, budget.ops + 1);
  i64 total = sat_mul(sat_mul(ucnt, xcnt, budget.ops), order_sp(q, s.k), budget.ops);
  budget.charge(total, s.n, "H_{" + std::to_string(s.r) + "," + std::to_string(s.two_k()) + "}(F_" + std::to_string(q) + ")");

  std::vector<Mat> us = enumerate_unipotent(f, s.r, budget);
  std::vector<Mat> sps = enumerate_sp(f, s.two_k(), budget);
  std::vector<Mat> out;
  out.reserve(static_cast<size_t>(total));
  int xe = s.r * s.two_k();
  std::vector<i64> digits(static_cast<size_t>(std::max(xe, 1)), 0);
  for (const Mat& u : us) {
    std::fill(digits.begin(), digits.end(), 0);
    while (true) {
      Mat x(f, s.r, s.two_k());
      int t = 0;
      for (int i = 0; i < s.r; ++i)
        for (int j = 0; j < s.two_k(); ++j) x(i, j) = digits[t++];
      for (const Mat& sp : sps) out.push_back(compose_H(s, u, x, sp));
      int pos = xe - 1;
      while (pos >= 0 && digits[pos] == q - 1) digits[pos--] = 0;
      if (pos < 0) break;
      ++digits[pos];
    }
  }
  return out;
}

}  // namespace kly
