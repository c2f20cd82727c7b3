#pragma once

#include <algorithm>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "kly/bruhat.hpp"
#include "kly/enumerate.hpp"
#include "kly/polyfact.hpp"
#include "kly/skewform.hpp"

namespace kly {

/// Proof object for the stabilizer-character property of g at a shape pair:
/// either (eps = +1) y in H with g^{-1} y g in Hbar' and a nontrivial value,
/// or (eps = -1, r = r') y with g^{-1} y {}^t g in Hbar' and trivial value.
struct Certificate {
  PairShape shape;
  Mat y;
  int eps = +1;
  CharVal value;
  std::vector<std::string> trace;
};

struct VerifyResult {
  bool pass = false;
  char clause = ' ';  // violated clause when failing: a, b, c or d
  std::string detail;

  static VerifyResult ok() { return {true, ' ', ""}; }
  static VerifyResult fail(char c, std::string d) { return {false, c, std::move(d)}; }
};

inline Mat t_eps(const Mat& g, int eps) { return eps == +1 ? g : g.transpose(); }

/// Independent check of a certificate; shares only matrix arithmetic with the
/// construction path.
inline VerifyResult verify_certificate(const Mat& g, const PairShape& ps, const Certificate& cert) {
  if (!g.square() || g.rows() != ps.n()) throw std::invalid_argument("verify_certificate: size mismatch");
  if (!g.invertible()) throw std::invalid_argument("verify_certificate: singular matrix");
  const Field f = g.field();
  if (cert.eps != +1 && cert.eps != -1) return VerifyResult::fail('d', "eps must be +-1");
  if (cert.y.rows() != ps.n() || !cert.y.square()) return VerifyResult::fail('a', "witness has wrong size");
  if (!in_model_group(ps.left, cert.y)) return VerifyResult::fail('a', "witness not in H_{r,2k}");
  Mat z = g.inverse() * cert.y * t_eps(g, cert.eps);
  if (!in_model_group_bar(ps.right, z)) return VerifyResult::fail('b', "conjugate not in Hbar_{r',2k'}");
  CharVal val = char_mul(f, psi_model(ps.left, cert.y), psi_model(ps.right, z.tau()));
  if (val.exponent != cert.value.exponent || val.sign != cert.value.sign)
    return VerifyResult::fail('c', "stored value disagrees with recomputed value");
  if (cert.eps == +1) {
    if (!val.nontrivial()) return VerifyResult::fail('d', "eps=+1 needs a nontrivial value");
  } else {
    if (!ps.diagonal()) return VerifyResult::fail('d', "eps=-1 needs r = r'");
    if (!val.trivial()) return VerifyResult::fail('d', "eps=-1 needs a trivial value");
  }
  return VerifyResult::ok();
}

namespace detail {
/// Sp enumerations are reused across many base-case calls during sweeps.
inline const std::vector<Mat>& cached_sp(const Field& f, int two_k, const Budget& budget) {
  static std::mutex mu;
  static std::map<std::pair<i64, int>, std::vector<Mat>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(f.p(), two_k);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, enumerate_sp(f, two_k, budget)).first;
  return it->second;
}

inline void must_verify(const Mat& g, const PairShape& ps, const Certificate& c, const std::string& where) {
  VerifyResult vr = verify_certificate(g, ps, c);
  if (!vr.pass) throw TheoryViolation(where + ": clause " + std::string(1, vr.clause) + " (" + vr.detail + ")");
}
inline std::uint64_t mat_seed(const Mat& m) {
  std::uint64_t h = 0x9e3779b97f4a7c15ull ^ static_cast<std::uint64_t>(m.p());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) h = (h ^ static_cast<std::uint64_t>(m(i, j))) * 1099511628211ull;
  return h;
}
}  // namespace detail

// ---- symplectic bordered embeddings ----

/// ( x y* z ; 0 s y ; 0 0 x~ ) in Sp(J_{2m}) for given x in GL_l,
/// s in Sp(J_{2(m-l)}) and y (2(m-l) x l). y* is uniquely determined and
/// linear in y; z is the canonical strict-upper solution.
inline Mat sp_embed_lift_upper(const Mat& x, const Mat& s, const Mat& y) {
  const Field f = x.empty() ? s.field() : x.field();
  const int l = x.rows();
  const int mid = s.rows();
  Mat w = antidiag_identity(f, l);
  Mat jp = standard_symplectic_form(f, mid);
  Mat ystar = x * w * y.transpose() * jp * s;
  Mat z = x * w * strict_upper(y.transpose() * jp * y);
  Mat xt = tilde_twist(x);
  Mat e = Mat::block_compose(
      f, {{x, ystar, z}, {Mat::zero(f, mid, l), s, y}, {Mat::zero(f, l, l), Mat::zero(f, l, mid), xt}});
  if (!in_sp_standard(e)) throw TheoryViolation("sp_embed_lift_upper: output left Sp");
  return e;
}

/// Mirror orientation ( x 0 0 ; y* s 0 ; z y x~ ) with y (l x 2(m-l)) given.
inline Mat sp_embed_lift_lower(const Mat& x, const Mat& s, const Mat& y) {
  const Field f = x.empty() ? s.field() : x.field();
  const int l = x.rows();
  const int mid = s.rows();
  Mat w = antidiag_identity(f, l);
  Mat jp = standard_symplectic_form(f, mid);
  Mat ystar = s * jp.inverse() * y.transpose() * w * x;
  Mat z = -(w * x.inverse().transpose() * strict_upper(ystar.transpose() * jp * ystar));
  Mat xt = tilde_twist(x);
  Mat e = Mat::block_compose(
      f, {{x, Mat::zero(f, l, mid), Mat::zero(f, l, l)}, {ystar, s, Mat::zero(f, mid, l)}, {z, y, xt}});
  if (!in_sp_standard(e)) throw TheoryViolation("sp_embed_lift_lower: output left Sp");
  return e;
}

// ---- transvection construction ----

struct KlyachkoOut {
  Mat full;  // ( u X ; 0 I ) in Sp(form)
  Mat u, x;
};

/// For an alternating form that is not totally isotropic on <e_1..e_r>, build
/// the transvection h_s = I + s v0 ({}^t v0 I) landing in Sp(form) with
/// unitriangular corner of prescribed character exponent.
inline KlyachkoOut klyachko_unipotent(const Mat& form, int r, i64 target_exp = 1) {
  const Field f = form.field();
  const int n = form.rows();
  if (!is_alternating(form)) throw std::invalid_argument("klyachko_unipotent: form not alternating");
  if (r < 1 || r > n) throw std::invalid_argument("klyachko_unipotent: bad r");
  if (totally_isotropic(form, r)) throw std::invalid_argument("klyachko_unipotent: form is totally isotropic on the span");
  int i = 1;  // maximal 1-indexed i < r with isotropy on <e_1..e_i>
  while (i + 1 <= r && totally_isotropic(form, i + 1)) ++i;
  Mat v0(f, n, 1);
  v0(i - 1, 0) = 1;
  if (form(i - 1, i) == 0) {
    int j = -1;
    for (int t = 1; t < i; ++t)
      if (form(t - 1, i) != 0) {
        j = t;
        break;
      }
    if (j < 0) throw TheoryViolation("klyachko_unipotent: no pairing vector below the isotropy break");
    v0(j - 1, 0) = 1;
  }
  Mat row = v0.transpose() * form;  // 1 x n
  i64 beta = row(0, i);
  if (beta == 0) throw TheoryViolation("klyachko_unipotent: chosen v0 does not pair with e_{i+1}");
  i64 s = f.mul(f.reduce(target_exp), f.inv(beta));
  Mat h = Mat::identity(f, n);
  for (int a = 0; a < n; ++a) {
    if (v0(a, 0) == 0) continue;
    for (int b = 0; b < n; ++b) h(a, b) = f.add(h(a, b), f.mul(s, f.mul(v0(a, 0), row(0, b))));
  }
  if (!in_symplectic(form, h)) throw TheoryViolation("klyachko_unipotent: transvection left Sp(form)");
  KlyachkoOut out{h, h.submatrix(0, 0, r, r), h.submatrix(0, r, r, n - r)};
  if (!in_upper_unitriangular(out.u)) throw TheoryViolation("klyachko_unipotent: corner is not unitriangular");
  if (h.submatrix(r, 0, n - r, n) != Mat::block_compose(f, {{Mat::zero(f, n - r, r), Mat::identity(f, n - r)}}))
    throw TheoryViolation("klyachko_unipotent: lower block rows moved");
  if (psi_generic(out.u).exponent != f.reduce(target_exp))
    throw TheoryViolation("klyachko_unipotent: character exponent missed the target");
  return out;
}

// ---- Whittaker base case on monomial matrices ----

inline bool is_monomial(const Mat& m, Perm* w = nullptr, std::vector<i64>* coeff = nullptr) {
  if (!m.square()) return false;
  const int n = m.rows();
  Perm perm(n, -1);
  std::vector<i64> a(n, 0);
  for (int j = 0; j < n; ++j) {
    int hit = -1;
    for (int i = 0; i < n; ++i) {
      if (m(i, j) == 0) continue;
      if (hit >= 0) return false;
      hit = i;
    }
    if (hit < 0) return false;
    perm[j] = hit;
    a[j] = m(hit, j);
  }
  std::vector<bool> seen(n, false);
  for (int i : perm) {
    if (seen[i]) return false;
    seen[i] = true;
  }
  if (w) *w = perm;
  if (coeff) *coeff = a;
  return true;
}

/// Witness for a monomial matrix at the full-unitriangular shape (i, i).
/// Scans descents of the permutation part; a blocked scan forces symmetry and
/// yields the transpose-exchange certificate.
inline Certificate monomial_whittaker_witness(const Mat& m) {
  const Field f = m.field();
  const int n = m.rows();
  Perm w;
  std::vector<i64> a;
  if (!is_monomial(m, &w, &a)) throw std::invalid_argument("monomial_whittaker_witness: matrix is not monomial");
  PairShape ps(n, n, n);
  Perm wi = perm_inverse(w);
  for (int p = 1; p < n; ++p) {        // 1-indexed row pair (p, p+1)
    int j = wi[p - 1] + 1;             // column carrying row p
    int jp = wi[p] + 1;                // column carrying row p+1
    if (j <= jp) continue;             // ascent
    if (j > jp + 1) {
      Certificate c{ps, elementary_unipotent(f, n, p, p + 1, 1), +1, CharVal{1, +1}, {"whittaker descent, wide"}};
      detail::must_verify(m, ps, c, "monomial witness");
      return c;
    }
    i64 aj = a[j - 1], ajp = a[jp - 1];
    if (aj != ajp) {
      i64 s = f.inv(f.sub(1, f.div(ajp, aj)));
      Certificate c{ps, elementary_unipotent(f, n, p, p + 1, s), +1, CharVal{1, +1}, {"whittaker descent, adjacent"}};
      detail::must_verify(m, ps, c, "monomial witness");
      return c;
    }
  }
  if (m != m.transpose()) throw TheoryViolation("monomial witness: blocked scan on an asymmetric monomial matrix");
  Certificate c{ps, Mat::identity(f, n), -1, CharVal{0, +1}, {"whittaker blocked, symmetric"}};
  detail::must_verify(m, ps, c, "monomial witness");
  return c;
}

// ---- symplectic base case (r = r' = 0) ----

namespace detail {

/// Find y with {}^t y J y = J and y^{-1} K1 y = K2, where K2 = c^{-1} K1 c and
/// K1 is J-self-adjoint. Every solution lies in the coset Z(K1) . c.
/// Strategy, in order: polynomial square roots in the commuting algebra along
/// randomized coset points; splitting along the primary components of K1
/// (mutually J-orthogonal for a self-adjoint operator); an exhaustive scan of
/// the coset when the centralizer is small enough to afford one.
inline std::optional<Mat> sp_twisted_conjugator(const Mat& J, const Mat& K1, const Mat& c, const Budget& budget,
                                                std::mt19937_64& rng, int attempts, int depth) {
  const Field f = J.field();
  const int n = J.rows();
  if (n == 0) return Mat::identity(f, 0);
  std::vector<Mat> zbasis = centralizer_basis(K1);
  std::uniform_int_distribution<i64> coeff(0, f.p() - 1);

  for (int attempt = 0; attempt < attempts; ++attempt) {
    Mat u = Mat::identity(f, n);
    if (attempt > 0) {
      Mat cand(f, n, n);
      for (const Mat& b : zbasis) cand = cand + b.scaled(coeff(rng));
      if (!cand.invertible()) continue;
      u = cand;
    }
    Mat t = u * c;
    Mat jt = t.transpose() * J * t;
    if (jt == J) return t;  // sampled coset point is already an isometry
    Mat L = jt.inverse() * J;
    std::optional<Mat> v;
    if (f.p() == 2) {
      // squaring is linear over F_2 on the commutative self-adjoint algebra
      // generated by L and K2 = t^{-1} K1 t
      Mat K2t = t.inverse() * K1 * t;
      if (L * K2t != K2t * L) throw TheoryViolation("conjugator: L does not commute with the transported operator");
      v = sqrt_char2_in_commutative_algebra(commutative_algebra_basis({L, K2t}), L);
    } else {
      v = sqrt_in_algebra(L, rng);
    }
    if (!v) continue;
    Mat y = t * (*v);
    if (y.transpose() * J * y != J) continue;
    return y;
  }

  if (depth < 4) {
    poly::P mu = min_poly(K1);
    auto factors = poly::factorize(f, mu, rng);
    if (factors.size() >= 2) {
      Mat K2 = c.inverse() * K1 * c;
      Mat big1(f, n, n), big2(f, n, n);
      int col = 0;
      bool ok = true;
      for (const auto& fac : factors) {
        poly::P fe = poly::one();
        for (int e = 0; e < fac.mult; ++e) fe = poly::mul(f, fe, fac.f);
        std::vector<Mat> v1 = kernel_basis(mat_poly_eval(fe, K1));
        std::vector<Mat> v2 = kernel_basis(mat_poly_eval(fe, K2));
        if (v1.size() != v2.size() || v1.empty() || v1.size() % 2 != 0) {
          ok = false;
          break;
        }
        int m2 = static_cast<int>(v1.size());
        Mat b1raw(f, n, m2), b2raw(f, n, m2);
        for (int j = 0; j < m2; ++j) {
          b1raw.paste(0, j, v1[static_cast<size_t>(j)]);
          b2raw.paste(0, j, v2[static_cast<size_t>(j)]);
        }
        Mat b1 = b1raw * symplectic_gram_schmidt(b1raw.transpose() * J * b1raw);
        Mat b2 = b2raw * symplectic_gram_schmidt(b2raw.transpose() * J * b2raw);
        Mat jm = standard_symplectic_form(f, m2);
        Mat k1_hat = jm.inverse() * b1.transpose() * J * K1 * b1;
        Mat c_hat = jm.inverse() * b1.transpose() * J * c * b2;
        if (b1 * c_hat != c * b2) throw TheoryViolation("conjugator split: transporter left the component");
        auto y_hat = sp_twisted_conjugator(jm, k1_hat, c_hat, budget, rng, attempts, depth + 1);
        if (!y_hat) {
          ok = false;
          break;
        }
        big1.paste(0, col, b1 * (*y_hat));
        big2.paste(0, col, b2);
        col += m2;
      }
      if (ok && col == n) {
        Mat y = big1 * big2.inverse();
        if (y.transpose() * J * y != J || y.inverse() * K1 * y != K2)
          throw TheoryViolation("conjugator split: reassembly failed");
        return y;
      }
    }
  }

  // complete coset scan: q^{dim Z(K1)} candidates u, looking for
  // {}^t u J' u = J' with J' := {}^t c^{-1} J c^{-1}. Candidates advance by
  // single-digit (odometer) updates and are vetted by vector-pair pairings
  // before the full product, so a candidate costs about n^2 amortized.
  i64 cnt = 1;
  for (size_t i = 0; i < zbasis.size() && cnt <= budget.ops; ++i) cnt = sat_mul(cnt, f.p(), budget.ops);
  i64 scan_cost = sat_mul(sat_mul(cnt, n, budget.ops), n, budget.ops);
  if (scan_cost <= budget.ops) {
    Mat ci = c.inverse();
    Mat jprime = ci.transpose() * J * ci;
    std::vector<Mat> probes;  // a few random vectors for the cheap filter
    for (int t = 0; t < 4; ++t) {
      Mat v(f, n, 1);
      for (int i = 0; i < n; ++i) v(i, 0) = coeff(rng);
      probes.push_back(v);
    }
    std::vector<i64> digits(zbasis.size(), 0);
    Mat u(f, n, n);  // running sum of digit-scaled basis elements
    while (true) {
      bool plausible = true;
      for (size_t t = 0; t + 1 < probes.size() && plausible; ++t) {
        Mat lhs = (u * probes[t]).transpose() * J * (u * probes[t + 1]);
        Mat rhs = probes[t].transpose() * jprime * probes[t + 1];
        plausible = (lhs == rhs);
      }
      if (plausible && u.transpose() * J * u == jprime) {
        Mat y = u * c;
        if (y.transpose() * J * y != J) throw TheoryViolation("coset scan: filter accepted a non-isometry");
        return y;
      }
      size_t pos = 0;
      while (pos < digits.size() && digits[pos] == f.p() - 1) {
        u = u - zbasis[pos].scaled(digits[pos]);
        digits[pos++] = 0;
      }
      if (pos == digits.size()) break;
      ++digits[pos];
      u = u + zbasis[pos];
    }
    return std::nullopt;  // the scan was complete: no solution on this branch
  }

  // random-walk sampling of the coset for centralizers too large to scan:
  // solutions form a coset of the symplectic centralizer, whose index in the
  // full centralizer is roughly q^{dim/2}, so moderate sample counts land a
  // hit well beyond the exhaustive range. One coordinate moves per step, so a
  // step costs O(n^2) with a vector prefilter ahead of the full test.
  if (depth == 0 && !zbasis.empty()) {
    Mat ci = c.inverse();
    Mat jprime = ci.transpose() * J * ci;
    Mat px(f, n, 1), py(f, n, 1);
    for (int i = 0; i < n; ++i) {
      px(i, 0) = coeff(rng);
      py(i, 0) = coeff(rng);
    }
    Mat rhs = px.transpose() * jprime * py;
    std::vector<i64> digits(zbasis.size());
    Mat u(f, n, n);
    for (size_t i = 0; i < zbasis.size(); ++i) {
      digits[i] = coeff(rng);
      if (digits[i] != 0) u = u + zbasis[i].scaled(digits[i]);
    }
    std::uniform_int_distribution<size_t> which(0, zbasis.size() - 1);
    i64 samples = std::min<i64>(1000000, budget.ops / std::max(1, 4 * n));
    for (i64 s = 0; s < samples; ++s) {
      size_t i = which(rng);
      i64 v = coeff(rng);
      i64 delta = f.sub(v, digits[i]);
      if (delta != 0) u = u + zbasis[i].scaled(delta);
      digits[i] = v;
      Mat lhs = (u * px).transpose() * J * (u * py);
      if (lhs != rhs) continue;
      if (u.transpose() * J * u == jprime) return u * c;
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// Tier 1: y = I. Tier 2: conjugator search in the coset Z(K) . gJ^{-1} for
/// K = J^{-1} {}^t g^{-1} J g^{-1} (square roots in the commuting algebra,
/// primary-component splitting, bounded coset scans). Tier 3: exhaustive scan
/// of Sp within budget.
inline Certificate symplectic_base_witness(const Mat& g, const Budget& budget = {}, int tier2_attempts = 64) {
  const Field f = g.field();
  const int n = g.rows();
  if (n % 2 != 0) throw std::invalid_argument("symplectic_base_witness: odd size");
  PairShape ps(n, 0, 0);
  Mat J = standard_symplectic_form(f, n);
  auto finish = [&](Mat y, const char* how) {
    Certificate c{ps, std::move(y), -1, CharVal{0, +1}, {std::string("symplectic base: ") + how}};
    detail::must_verify(g, ps, c, "symplectic base");
    return c;
  };
  if (n == 0) return finish(Mat::identity(f, 0), "empty");

  if (in_sp_standard(g.inverse() * g.transpose())) return finish(Mat::identity(f, n), "tier 1");

  if (tier2_attempts > 0) {
    Mat K1 = J.inverse() * g.tau() * J * g.inverse();
    Mat c_conj = g * J.inverse();
    std::mt19937_64 rng(detail::mat_seed(g));
    auto y = detail::sp_twisted_conjugator(J, K1, c_conj, budget, rng, tier2_attempts, 0);
    if (y) {
      if (!in_sp_standard(*y) || !in_sp_standard(g.inverse() * (*y) * g.transpose()))
        throw TheoryViolation("symplectic base: conjugator output failed the exchange test");
      return finish(*y, "tier 2");
    }
  }

  const std::vector<Mat>& sps = detail::cached_sp(f, n, budget);  // throws BudgetExceeded when out of reach
  Mat gi = g.inverse();
  Mat gt = g.transpose();
  for (const Mat& y : sps)
    if (in_sp_standard(gi * y * gt)) return finish(y, "tier 3");
  throw TheoryViolation("symplectic base: exhaustive scan found no exchange witness");
}

// ---- transports ----

/// Move a certificate along one recorded orbit step: parent = step . child.
inline Certificate transport(const Certificate& cert, const TwistedPair& step, const Mat& parent) {
  if (step.eps != +1) throw std::invalid_argument("transport: history steps must have eps = +1");
  Mat y_new = (cert.eps == +1) ? step.h1 * cert.y * step.h1.inverse() : step.h1 * cert.y * step.h2.inverse();
  Certificate out{cert.shape, y_new, cert.eps, cert.value, cert.trace};
  detail::must_verify(parent, cert.shape, out, "transport");
  return out;
}

/// Certificate for ({}^t g, swapped shape) -> certificate for (g, shape).
inline Certificate transpose_transport(const Certificate& cert, const Mat& g, const PairShape& ps) {
  Mat tg = g.transpose();
  Mat z = tg.inverse() * cert.y * t_eps(tg, cert.eps);
  Certificate out{ps, z.tau(), cert.eps, cert.value, cert.trace};
  out.trace.push_back("transpose transport");
  detail::must_verify(g, ps, out, "transpose_transport");
  return out;
}

// ---- closed cell machinery ----

struct GoodRepresentative {
  Mat gamma;
  Mat shaped;  // ( 0 I_r 0 ; I_r' 0 0 ; 0 0 gamma )
  ActionHistory hist;
};

/// In the totally isotropic configuration, move g0 = diag(I_r,g1) w diag(I_r',g2)
/// inside its orbit to the bordered form with a GL_d corner gamma.
inline GoodRepresentative good_representative(const Mat& g1, const Mat& g2, const PairShape& ps) {
  const Field f = g1.field();
  const int n = ps.n(), r = ps.r(), rp = ps.rp();
  const int two_k = ps.left.two_k(), two_kp = ps.right.two_k();
  const int d = n - r - rp;
  Mat W = closed_cell_weyl(f, n, r, rp);
  Mat g0 = Mat::block_diag(Mat::identity(f, r), g1) * W * Mat::block_diag(Mat::identity(f, rp), g2);

  // parabolic factorizations supplied by the two isotropic skew forms
  Mat x1 = g1.inverse() * standard_symplectic_form(f, two_k) * g1.tau();
  Mat q1 = skew_parabolic_reduce(x1, rp);
  Mat s1 = (g1.tau() * q1).tau();
  Mat lower1 = q1.transpose();
  if (s1 * lower1 != g1 || !in_sp_standard(s1)) throw TheoryViolation("good_representative: g1 factorization failed");

  Mat x2 = g2.inverse().transpose() * standard_symplectic_form(f, two_kp) * g2.inverse();
  Mat q2 = skew_parabolic_reduce(x2, r);
  Mat s2 = g2.inverse() * q2;
  if (q2 * s2.inverse() != g2 || !in_sp_standard(s2)) throw TheoryViolation("good_representative: g2 factorization failed");

  Mat m1 = Mat::block_diag(Mat::identity(f, r), lower1) * W * Mat::block_diag(Mat::identity(f, rp), q2);
  TwistedPair step1(ps, Mat::block_diag(Mat::identity(f, r), s1),
                    Mat::block_diag(Mat::identity(f, rp), s2.inverse().transpose()), +1);
  if (step1.act(m1) != g0) throw TheoryViolation("good_representative: step 1 does not replay");

  // clear the alpha corners through the Levi embeddings diag(a, I, a~) in Sp
  Mat alpha1 = lower1.submatrix(0, 0, rp, rp);
  Mat alpha2 = q2.submatrix(0, 0, r, r);
  Mat h_sp = Mat::block_diag(Mat::block_diag(alpha1.inverse(), Mat::identity(f, two_k - 2 * rp)),
                             tilde_twist(alpha1).inverse());
  Mat h = Mat::block_diag(Mat::identity(f, r), h_sp);
  Mat hp_sp = Mat::block_diag(Mat::block_diag(alpha2.inverse(), Mat::identity(f, two_kp - 2 * r)),
                              tilde_twist(alpha2).inverse());
  Mat hp = Mat::block_diag(Mat::identity(f, rp), hp_sp);
  Mat m2 = h * m1 * hp;
  TwistedPair step2(ps, h.inverse(), hp.inverse().transpose(), +1);
  if (step2.act(m2) != m1) throw TheoryViolation("good_representative: step 2 does not replay");

  // beta cleanup on m2 = ( 0 I_r b2 ; I_r' 0 0 ; b1 0 gamma )
  if (m2.submatrix(0, rp, r, r) != Mat::identity(f, r) || m2.submatrix(r, 0, rp, rp) != Mat::identity(f, rp))
    throw TheoryViolation("good_representative: alpha cleanup missed the identity corners");
  Mat b2 = m2.submatrix(0, rp + r, r, d);
  Mat b1 = m2.submatrix(r + rp, 0, d, rp);
  Mat gamma = m2.submatrix(r + rp, rp + r, d, d);
  if (!gamma.invertible()) throw TheoryViolation("good_representative: corner block is singular");

  Mat L = Mat::identity(f, n);
  L.paste(0, r, b2 * gamma.inverse() * b1);
  L.paste(0, r + rp, -(b2 * gamma.inverse()));
  Mat R = Mat::identity(f, n);
  R.paste(r + rp, 0, -(gamma.inverse() * b1));
  Mat shaped = L * m2 * R;
  Mat expect = Mat::block_diag(closed_cell_weyl(f, r + rp, r, rp), gamma);
  if (shaped != expect) throw TheoryViolation("good_representative: bordered form not reached");
  TwistedPair step3(ps, L.inverse(), R.inverse().transpose(), +1);
  if (step3.act(shaped) != m2) throw TheoryViolation("good_representative: step 3 does not replay");

  return GoodRepresentative{gamma, shaped, ActionHistory{step1, step2, step3}};
}

/// Frame change feeding the recursion: x = sigma_a^{-1} {}^t gamma sigma_b.
inline Mat gamma_recursion_input(const Mat& gamma, const PairShape& ps) {
  const Field f = gamma.field();
  const int d = gamma.rows();
  Mat sa = corner_rotation(f, d - ps.r(), ps.r());
  Mat sb = corner_rotation(f, d - ps.rp(), ps.rp());
  return sa.inverse() * gamma.transpose() * sb;
}

/// Rebuild a witness for the bordered matrix ( 0 I_r 0 ; I_r' 0 0 ; 0 0 gamma )
/// from a witness for x at the reduced size d = n - (r + r'). The middle
/// blocks travel through the tau-twisted conjugation by gamma; both bordered
/// embeddings are then filled in by the closed-form lifts.
inline Certificate gamma_lift(const Certificate& sub, const Mat& gamma, const PairShape& ps, const Mat& shaped) {
  const Field f = gamma.field();
  const int n = ps.n(), r = ps.r(), rp = ps.rp();
  const int d = gamma.rows();
  const int c = d - r, cp = d - rp;
  Mat x = gamma_recursion_input(gamma, ps);
  Mat sa = corner_rotation(f, c, r);
  Mat sb = corner_rotation(f, cp, rp);

  Mat y_s = sub.y;
  Mat z_s = x.inverse() * y_s * t_eps(x, sub.eps);
  Mat u = y_s.submatrix(0, 0, r, r);
  Mat v = z_s.submatrix(0, 0, rp, rp);

  Mat B = sb * z_s * sb.inverse();
  Mat A = sa * y_s * sa.inverse();

  Mat Btau = B.tau();
  Mat s_h = Btau.submatrix(0, 0, cp, cp);
  Mat y_h = Btau.submatrix(cp, 0, rp, cp);
  if (Btau.submatrix(0, cp, cp, rp) != Mat::zero(f, cp, rp) || Btau.submatrix(cp, cp, rp, rp) != tilde_twist(v))
    throw TheoryViolation("gamma_lift: conjugate-side block structure is off");
  Mat h_lift = sp_embed_lift_lower(v, s_h, y_h);

  Mat gamma_star = (sub.eps == +1) ? gamma : gamma.transpose();
  Mat h22 = h_lift.submatrix(rp, rp, d, d);
  Mat T = gamma.inverse() * h22 * gamma_star;
  if (T != A.tau()) throw TheoryViolation("gamma_lift: transported middle block is off");
  Mat s_c = T.submatrix(0, 0, c, c);
  Mat y_c = T.submatrix(0, c, c, r);
  if (T.submatrix(c, 0, r, c) != Mat::zero(f, r, c) || T.submatrix(c, c, r, r) != tilde_twist(u))
    throw TheoryViolation("gamma_lift: witness-side block structure is off");

  Mat w_r = antidiag_identity(f, r);
  Mat j_c = standard_symplectic_form(f, c);
  Mat ystar_c = u * w_r * y_c.transpose() * j_c * s_c;
  Mat z_c = u * w_r * strict_upper(y_c.transpose() * j_c * y_c);
  Mat zeta2 = Mat::block_compose(f, {{ystar_c, z_c}}) * gamma_star.inverse();

  Mat Y(f, n, n);
  Y.paste(0, 0, u);
  Y.paste(0, r + rp, zeta2);
  Y.paste(r, r, h_lift);
  Certificate out{ps, Y, sub.eps, sub.value, sub.trace};
  out.trace.push_back("gamma lift at d=" + std::to_string(d));
  detail::must_verify(shaped, ps, out, "gamma_lift");
  return out;
}

// ---- the main construction ----

inline Certificate find_witness(const Mat& g, const PairShape& ps, const Budget& budget = {});

namespace detail {

inline bool is_prefix_set(const std::vector<int>& s) {
  for (size_t t = 0; t < s.size(); ++t)
    if (s[t] != static_cast<int>(t)) return false;
  return true;
}

/// Representative in M w M' with nonempty I_w.
inline Certificate witness_open_cell(const Mat& g0, const Perm& w, const PairShape& ps, const Budget& budget) {
  const Field f = g0.field();
  const int n = ps.n();
  std::vector<int> iw = i_w_set(w, ps);
  Perm wi = perm_inverse(w);
  std::vector<int> iw_pre;
  for (int a : iw) iw_pre.push_back(wi[a]);
  std::sort(iw_pre.begin(), iw_pre.end());
  const bool left_prefix = is_prefix_set(iw);
  const bool right_prefix = is_prefix_set(iw_pre);

  if (left_prefix && right_prefix) {
    const int i = static_cast<int>(iw.size());
    Mat mono = g0.submatrix(0, 0, i, i);
    if (g0.submatrix(0, i, i, n - i) != Mat::zero(f, i, n - i) ||
        g0.submatrix(i, 0, n - i, i) != Mat::zero(f, n - i, i))
      throw TheoryViolation("open cell: representative is not block diagonal at the prefix split");
    Certificate c1 = monomial_whittaker_witness(mono);
    if (i == n) {
      c1.trace.push_back("pure whittaker block");
      return c1;
    }
    Mat rest = g0.submatrix(i, i, n - i, n - i);
    if (c1.eps == +1) {
      Certificate out{ps, Mat::block_diag(c1.y, Mat::identity(f, n - i)), +1, c1.value, c1.trace};
      out.trace.push_back("embedded whittaker block, i=" + std::to_string(i));
      must_verify(g0, ps, out, "open cell embed (whittaker)");
      return out;
    }
    PairShape sub_ps(n - i, ps.r() - i, ps.rp() - i);
    Certificate c2 = find_witness(rest, sub_ps, budget);
    if (c2.eps == +1) {
      Certificate out{ps, Mat::block_diag(Mat::identity(f, i), c2.y), +1, c2.value, c2.trace};
      out.trace.push_back("embedded reduced block, i=" + std::to_string(i));
      must_verify(g0, ps, out, "open cell embed (reduced)");
      return out;
    }
    Certificate out{ps, Mat::block_diag(c1.y, c2.y), -1, CharVal{0, +1}, c2.trace};
    out.trace.push_back("combined eps=-1 blocks, i=" + std::to_string(i));
    must_verify(g0, ps, out, "open cell combine");
    return out;
  }

  if (left_prefix) {
    Certificate sub = find_witness(g0.transpose(), ps.swapped(), budget);
    return transpose_transport(sub, g0, ps);
  }

  // direct construction at a non-prefix I_w (0-indexed l, q; u_{q,q+1} in
  // 1-indexed terms is elementary_unipotent(..., q, q+1, .))
  int l = -1;
  for (int t = 0; t < ps.r(); ++t)
    if (!std::binary_search(iw.begin(), iw.end(), t)) {
      l = t;
      break;
    }
  int q = -1;
  for (int t = l + 1; t < ps.r(); ++t)
    if (std::binary_search(iw.begin(), iw.end(), t)) {
      q = t;
      break;
    }
  if (l < 0 || q < 0) throw TheoryViolation("open cell: defect positions not found");
  Certificate out{ps, elementary_unipotent(f, n, q, q + 1, 1), +1, CharVal{1, +1},
                  {"open cell defect at q=" + std::to_string(q + 1)}};
  must_verify(g0, ps, out, "open cell direct");
  return out;
}

/// Closed cell: representative known as diag(I_r, g1) . w . diag(I_r', g2).
inline Certificate witness_closed_cell(const Mat& g0, const Mat& g1, const Mat& g2, const PairShape& ps,
                                       const Budget& budget) {
  const Field f = g0.field();
  const int r = ps.r(), rp = ps.rp();
  const int two_k = ps.left.two_k(), two_kp = ps.right.two_k();
  Mat I1 = g1.transpose() * standard_symplectic_form(f, two_k) * g1;
  Mat I2 = g2.tau() * standard_symplectic_form(f, two_kp) * g2.inverse();

  if (r > 0 && !totally_isotropic(I2, r)) {
    KlyachkoOut kly = klyachko_unipotent(I2, r, 1);
    Mat zeta = Mat::block_compose(f, {{Mat::zero(f, r, rp), kly.x}}) * g1.inverse();
    Mat y = Mat::block_compose(f, {{kly.u, zeta}, {Mat::zero(f, two_k, r), Mat::identity(f, two_k)}});
    Certificate out{ps, y, +1, CharVal{1, +1}, {"closed cell, transvection on the right form"}};
    must_verify(g0, ps, out, "closed cell (a)");
    return out;
  }
  if (rp > 0 && !totally_isotropic(I1.inverse(), rp)) {
    KlyachkoOut kly = klyachko_unipotent(I1.inverse(), rp, f.neg(1));
    Mat h = g1 * kly.full.transpose() * g1.inverse();
    Mat y = Mat::block_diag(Mat::identity(f, r), h);
    Certificate out{ps, y, +1, CharVal{1, +1}, {"closed cell, transvection on the left form"}};
    must_verify(g0, ps, out, "closed cell (b)");
    return out;
  }

  GoodRepresentative rep = good_representative(g1, g2, ps);
  Mat x = gamma_recursion_input(rep.gamma, ps);
  PairShape sub_ps(x.rows(), r, rp);
  Certificate sub = find_witness(x, sub_ps, budget);
  Certificate cert = gamma_lift(sub, rep.gamma, ps, rep.shaped);
  Mat cur = rep.shaped;
  for (auto it = rep.hist.rbegin(); it != rep.hist.rend(); ++it) {
    Mat parent = it->act(cur);
    cert = transport(cert, *it, parent);
    cur = parent;
  }
  if (cur != g0) throw TheoryViolation("closed cell: replay did not return to the representative");
  cert.trace.push_back("closed cell, isotropic recursion");
  return cert;
}

}  // namespace detail

/// Construct a verified witness certificate for g at the given shape pair.
/// Recursion on n mirrors the cell structure: open cells split off a monomial
/// block or produce a one-line defect witness; the closed cell either applies
/// the transvection lemma or descends through the bordered corner.
inline Certificate find_witness(const Mat& g, const PairShape& ps, const Budget& budget) {
  if (!g.square() || g.rows() != ps.n()) throw std::invalid_argument("find_witness: size mismatch");
  if (!g.invertible()) throw std::invalid_argument("find_witness: matrix is singular");
  const Field f = g.field();
  const int n = ps.n(), r = ps.r(), rp = ps.rp();

  if (r == 0 && rp == 0) return symplectic_base_witness(g, budget);

  BruhatCell cell = bruhat_cell(g, ps);
  LeviStrip strip = strip_to_levi(g, cell, ps);
  std::vector<int> iw = i_w_set(cell.w, ps);

  Certificate cert = [&]() {
    if (!iw.empty()) return detail::witness_open_cell(strip.rep, cell.w, ps, budget);

    // closed cell: absorb the torus parts into the symplectic-side blocks
    Mat W = closed_cell_weyl(f, n, r, rp);
    if (perm_matrix(f, cell.w) != W) throw TheoryViolation("find_witness: empty I_w off the closed cell");
    Mat G1 = strip.m.submatrix(r, r, 2 * ps.left.k, 2 * ps.left.k);
    Mat G2 = strip.mprime.submatrix(rp, rp, 2 * ps.right.k, 2 * ps.right.k);
    Perm wi = perm_inverse(cell.w);
    std::vector<i64> dd(static_cast<size_t>(n), 1);
    for (int i = 0; i < r; ++i) dd[static_cast<size_t>(wi[i])] = strip.m(i, i);
    std::vector<i64> avec(static_cast<size_t>(rp));
    for (int j = 0; j < rp; ++j) avec[static_cast<size_t>(j)] = f.mul(dd[static_cast<size_t>(j)], strip.mprime(j, j));
    for (int j = rp; j < n; ++j)
      if (dd[static_cast<size_t>(j)] != 1)
        for (int t = 0; t < G2.cols(); ++t)
          G2(j - rp, t) = f.mul(G2(j - rp, t), dd[static_cast<size_t>(j)]);
    for (int j = 0; j < rp; ++j)
      if (avec[static_cast<size_t>(j)] != 1)
        for (int t = 0; t < G1.rows(); ++t) G1(t, j) = f.mul(G1(t, j), avec[static_cast<size_t>(j)]);
    Mat rebuilt = Mat::block_diag(Mat::identity(f, r), G1) * W * Mat::block_diag(Mat::identity(f, rp), G2);
    if (rebuilt != strip.rep) throw TheoryViolation("find_witness: torus absorption does not recompose");
    return detail::witness_closed_cell(strip.rep, G1, G2, ps, budget);
  }();

  for (auto it = strip.hist.rbegin(); it != strip.hist.rend(); ++it) cert = transport(cert, *it, g);
  cert.trace.push_back("cell processed at n=" + std::to_string(n));
  detail::must_verify(g, ps, cert, "find_witness");
  return cert;
}

}  // namespace kly
