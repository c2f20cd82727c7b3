// Acceptance suite: one criterion per test, one PASS/FAIL line per criterion.

#include <gtest/gtest.h>

#include <chrono>
#include <random>

#include "kly/io.hpp"
#include "kly/oracle.hpp"
#include "kly/witness.hpp"
#include "test_util.hpp"

using namespace kly;

namespace {

const std::vector<std::pair<int, i64>> kConfigs{{2, 2}, {2, 3}, {2, 5}, {3, 2}, {3, 3}, {4, 2}};

void report(int criterion, bool pass, const std::string& what) {
  std::cout << "[CRITERION " << criterion << "] " << (pass ? "PASS" : "FAIL") << " - " << what << std::endl;
}

int hw_workers() {
  unsigned hc = std::thread::hardware_concurrency();
  return static_cast<int>(std::min<unsigned>(hc ? hc : 1, 8));
}

}  // namespace

TEST(Acceptance, Criterion1ExhaustivePropositionCheck) {
  bool pass = true;
  std::string detail;
  for (auto [n, q] : kConfigs) {
    SweepReport rep = sweep_verify(n, q, parity_legal_pairs(n), Budget{}, hw_workers());
    if (rep.total_failures() != 0) {
      pass = false;
      detail += " n=" + std::to_string(n) + ",q=" + std::to_string(q) + ":" + std::to_string(rep.total_failures()) +
                " failures;";
      for (const auto& p : rep.pairs)
        for (const auto& note : p.failure_notes) detail += " " + note + ";";
    }
  }
  report(1, pass, "exhaustive oracle + witness sweep over all parity-legal pairs, 6 configurations" + detail);
  EXPECT_TRUE(pass) << detail;
}

TEST(Acceptance, Criterion2DisjointnessCounts) {
  bool pass = true;
  std::string detail;
  for (auto [n, q] : kConfigs) {
    for (auto [r, rp] : parity_legal_pairs(n)) {
      if (r == rp) continue;
      i64 cnt = mackey_count(n, q, PairShape(n, r, rp));
      if (cnt != 0) {
        pass = false;
        detail += " (n=" + std::to_string(n) + ",q=" + std::to_string(q) + ",r=" + std::to_string(r) +
                  ",r'=" + std::to_string(rp) + ")=" + std::to_string(cnt);
      }
    }
  }
  report(2, pass, "intertwining number vanishes for every off-diagonal pair" + detail);
  EXPECT_TRUE(pass) << detail;
}

TEST(Acceptance, Criterion3MultiplicityOneSum) {
  const std::map<std::pair<int, i64>, i64> expected_classes{{{2, 2}, 3}, {{2, 3}, 8}, {{3, 2}, 6}, {{4, 2}, 14}};
  bool pass = true;
  std::string detail;
  for (auto [n, q] : kConfigs) {
    MackeyTable t = klyachko_sum_check(n, q);
    if (!t.sum_matches || !t.disjointness) {
      pass = false;
      detail += " (n=" + std::to_string(n) + ",q=" + std::to_string(q) + ") sum/disjointness failed";
    }
    auto it = expected_classes.find({n, q});
    if (it != expected_classes.end() && t.classes != it->second) {
      pass = false;
      detail += " (n=" + std::to_string(n) + ",q=" + std::to_string(q) + ") classes=" + std::to_string(t.classes) +
                " expected " + std::to_string(it->second);
    }
  }
  report(3, pass, "diagonal intertwining sum equals the class count (3, 8, 6, 14 pinned)" + detail);
  EXPECT_TRUE(pass) << detail;
}

TEST(Acceptance, Criterion4ConstructiveLemmaSuites) {
  std::mt19937_64 rng(20250810);
  bool pass = true;
  std::string detail;
  for (i64 p : {3, 5, 101}) {
    Field f(p);
    int kly_done = 0, spr_done = 0, gs_done = 0, lift_done = 0;
    while (kly_done < 1000) {
      int two_m = 2 * (1 + static_cast<int>(rng() % 3));
      int r = 1 + static_cast<int>(rng() % two_m);
      Mat form = testutil::random_alternating(f, two_m, rng);
      if (totally_isotropic(form, r)) continue;
      KlyachkoOut k = klyachko_unipotent(form, r, 1);
      if (!in_symplectic(form, k.full) || psi_generic(k.u).exponent != 1) {
        pass = false;
        detail += " klyachko failed at p=" + std::to_string(p);
        break;
      }
      ++kly_done;
    }
    while (spr_done < 1000) {
      int m = 1 + static_cast<int>(rng() % 3);
      int two_m = 2 * m;
      int l = static_cast<int>(rng() % (m + 1));
      Mat j = standard_symplectic_form(f, two_m);
      Mat a = testutil::random_invertible(f, l, rng);
      Mat b = testutil::random_invertible(f, two_m - l, rng);
      Mat top = testutil::random_matrix(f, l, two_m - l, rng);
      Mat c = Mat::block_compose(f, {{a, top}, {Mat::zero(f, two_m - l, l), b}});
      Mat x = c.transpose() * j * c;
      Mat q = skew_parabolic_reduce(x, l);
      bool ok = (q.transpose() * x * q == j);
      for (int i = l; i < two_m && ok; ++i)
        for (int jj = 0; jj < l && ok; ++jj) ok = (q(i, jj) == 0);
      if (!ok) {
        pass = false;
        detail += " skew_parabolic_reduce failed at p=" + std::to_string(p);
        break;
      }
      ++spr_done;
    }
    while (gs_done < 1000) {
      int two_m = 2 * (1 + static_cast<int>(rng() % 3));
      Mat a = testutil::random_alternating(f, two_m, rng);
      Mat y = symplectic_gram_schmidt(a);
      if (y.transpose() * a * y != standard_symplectic_form(f, two_m)) {
        pass = false;
        detail += " gram_schmidt failed at p=" + std::to_string(p);
        break;
      }
      ++gs_done;
    }
    while (lift_done < 1000) {
      int m = 2 + static_cast<int>(rng() % 2);
      int l = 1 + static_cast<int>(rng() % m);
      int mid = 2 * (m - l);
      Mat x = testutil::random_invertible(f, l, rng);
      Mat s = testutil::random_sp(f, mid, rng);
      Mat y1 = testutil::random_matrix(f, mid, l, rng);
      Mat y2 = testutil::random_matrix(f, mid, l, rng);
      Mat e1 = sp_embed_lift_upper(x, s, y1);
      Mat e2 = sp_embed_lift_upper(x, s, y2);
      Mat e12 = sp_embed_lift_upper(x, s, y1 + y2);
      bool ok = in_sp_standard(e1) &&
                e12.submatrix(0, l, l, mid) == e1.submatrix(0, l, l, mid) + e2.submatrix(0, l, l, mid) &&
                in_sp_standard(sp_embed_lift_lower(x, s, testutil::random_matrix(f, l, mid, rng)));
      if (!ok) {
        pass = false;
        detail += " sp_embed_lift failed at p=" + std::to_string(p);
        break;
      }
      ++lift_done;
    }
  }
  report(4, pass, "transvection, parabolic reduction, hyperbolic basis and bordered lifts, 1000+ instances per field" + detail);
  EXPECT_TRUE(pass) << detail;
}

TEST(Acceptance, Criterion5ScalingSmokeTest) {
  std::mt19937_64 rng(6101);
  Field f(101);
  bool pass = true;
  std::string detail;
  double worst_ms = 0;
  for (int t = 0; t < 100 && pass; ++t) {
    Mat g = testutil::random_invertible(f, 6, rng);
    for (auto [r, rp] : parity_legal_pairs(6)) {
      PairShape ps(6, r, rp);
      auto start = std::chrono::steady_clock::now();
      bool ok;
      try {
        Certificate c = find_witness(g, ps);
        ok = verify_certificate(g, ps, c).pass;
      } catch (const std::exception& e) {
        ok = false;
        detail += std::string(" threw: ") + e.what();
      }
      double ms =
          std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - start).count() /
          1000.0;
      worst_ms = std::max(worst_ms, ms);
      if (!ok || ms >= 1000.0) {
        pass = false;
        detail += " (r=" + std::to_string(r) + ",r'=" + std::to_string(rp) + ") ok=" + std::to_string(ok) +
                  " ms=" + std::to_string(ms);
        break;
      }
    }
  }
  report(5, pass,
         "100 random g in GL_6(F_101), all parity-legal pairs, worst case " + std::to_string(worst_ms) + " ms" + detail);
  EXPECT_TRUE(pass) << detail;
}

TEST(Acceptance, Criterion6BruhatPartition) {
  std::mt19937_64 rng(31337);
  bool pass = true;
  std::string detail;
  for (auto [n, q] : kConfigs) {
    Field f(q);
    for (auto [r, rp] : parity_legal_pairs(n)) {
      PairShape ps(n, r, rp);
      auto reps = reduced_reps(ps);
      for (int t = 0; t < 1000; ++t) {
        Mat g = testutil::random_invertible(f, n, rng);
        BruhatCell cell = bruhat_cell(g, ps);
        int claims = 0;
        for (const Perm& w : reps) claims += (w == cell.w) ? 1 : 0;
        bool ok = (claims == 1) && (cell.p * perm_matrix(f, cell.w) * cell.pbar == g);
        if (!ok) {
          pass = false;
          detail += " failure at n=" + std::to_string(n) + ",q=" + std::to_string(q) + ",r=" + std::to_string(r) +
                    ",r'=" + std::to_string(rp);
          break;
        }
      }
    }
  }
  report(6, pass, "unique reduced representative and exact factorization, 1000 samples per configuration" + detail);
  EXPECT_TRUE(pass) << detail;
}

TEST(Acceptance, Criterion7CertificateTamperSuite) {
  Field f3(3);
  bool pass = true;
  std::string detail;

  Mat g(f3, {{0, 1}, {2, 0}});
  PairShape ps(2, 2, 2);
  Certificate good = find_witness(g, ps);

  Certificate bad_a = good;
  bad_a.y(1, 0) = 1;
  VerifyResult va = verify_certificate(g, ps, bad_a);
  if (va.pass || va.clause != 'a') {
    pass = false;
    detail += " clause a not triggered";
  }

  Certificate bad_b = good;  // a valid H element that no longer stabilizes
  bad_b.y = elementary_unipotent(f3, 2, 1, 2, f3.add(good.y(0, 1), 1));
  VerifyResult vb = verify_certificate(g, ps, bad_b);
  if (vb.pass || (vb.clause != 'b' && vb.clause != 'c')) {
    pass = false;
    detail += " clause b not triggered";
  } else {
    // pin a genuine clause-b failure: upper unipotent at the symplectic shape
    Certificate up{PairShape(2, 2, 2), elementary_unipotent(f3, 2, 1, 2, 1), +1, CharVal{1, +1}, {}};
    VerifyResult vb2 = verify_certificate(Mat::identity(f3, 2), PairShape(2, 2, 2), up);
    if (vb2.pass || vb2.clause != 'b') {
      pass = false;
      detail += " clause b not triggered";
    }
  }

  Certificate bad_c = good;
  bad_c.value.exponent = f3.add(bad_c.value.exponent, 1);
  VerifyResult vc = verify_certificate(g, ps, bad_c);
  if (vc.pass || vc.clause != 'c') {
    pass = false;
    detail += " clause c not triggered";
  }

  Mat sym(f3, {{0, 1}, {1, 0}});
  Certificate cd = find_witness(sym, ps);
  Certificate bad_d = cd;
  bad_d.eps = +1;
  VerifyResult vd = verify_certificate(sym, ps, bad_d);
  if (vd.pass || vd.clause != 'd') {
    pass = false;
    detail += " clause d not triggered";
  }

  report(7, pass, "each verification clause independently triggered and named" + detail);
  EXPECT_TRUE(pass) << detail;
}
