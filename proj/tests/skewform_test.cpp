#include <gtest/gtest.h>

#include <random>

#include "kly/skewform.hpp"
#include "test_util.hpp"

using namespace kly;

TEST(GramSchmidt, KnownForms) {
  Field f3(3);
  Mat j4 = standard_symplectic_form(f3, 4);
  Mat y = symplectic_gram_schmidt(j4);
  EXPECT_EQ(y.transpose() * j4 * y, j4);

  // J'_4: sigma^{-1} is one admissible answer; ours must satisfy the same identity
  Mat jp = split_symplectic_form(f3, 4);
  Mat y2 = symplectic_gram_schmidt(jp);
  EXPECT_EQ(y2.transpose() * jp * y2, j4);

  Field f5(5);
  Mat small(f5, {{0, 2}, {-2, 0}});
  Mat y3 = symplectic_gram_schmidt(small);
  EXPECT_EQ(y3.transpose() * small * y3, standard_symplectic_form(f5, 2));
  // diag(3,1) is an admissible answer since 3*2 = 1 mod 5
  Mat cand(f5, {{3, 0}, {0, 1}});
  EXPECT_EQ(cand.transpose() * small * cand, standard_symplectic_form(f5, 2));
}

TEST(GramSchmidt, RoundTripOnRandomForms) {
  std::mt19937_64 rng(21);
  for (i64 p : {2, 3, 5, 101}) {
    Field f(p);
    for (int two_m : {2, 4, 6}) {
      for (int t = 0; t < 30; ++t) {
        Mat a = testutil::random_alternating(f, two_m, rng);
        Mat y = symplectic_gram_schmidt(a);
        EXPECT_EQ(y.transpose() * a * y, standard_symplectic_form(f, two_m));
      }
    }
  }
}

TEST(GramSchmidt, RejectsBadInput) {
  Field f3(3);
  EXPECT_THROW(symplectic_gram_schmidt(Mat::identity(f3, 2)), std::invalid_argument);
  EXPECT_THROW(symplectic_gram_schmidt(Mat::zero(f3, 2, 2)), std::invalid_argument);
  EXPECT_THROW(symplectic_gram_schmidt(Mat::zero(f3, 3, 3)), std::invalid_argument);
}

TEST(SkewParabolicReduce, Identity) {
  Field f3(3);
  Mat j6 = standard_symplectic_form(f3, 6);
  for (int l = 0; l <= 3; ++l) {
    Mat q = skew_parabolic_reduce(j6, l);
    EXPECT_EQ(q.transpose() * j6 * q, j6);
  }
}

TEST(SkewParabolicReduce, ScaledSmallForm) {
  Field f5(5);
  Mat x = standard_symplectic_form(f5, 2).scaled(2);
  Mat q = skew_parabolic_reduce(x, 1);
  EXPECT_EQ(q.transpose() * x * q, standard_symplectic_form(f5, 2));
  EXPECT_EQ(q(1, 0), 0);  // parabolic: zero lower-left block
}

TEST(SkewParabolicReduce, PreconditionError) {
  Field f3(3);
  Mat j2 = standard_symplectic_form(f3, 2);
  // top-left 1x1 of an alternating form is always zero, so force l=2 on a
  // form with a nonzero (1,2) entry
  EXPECT_THROW(skew_parabolic_reduce(j2, 2), std::invalid_argument);
}

TEST(SkewParabolicReduce, RandomIsotropicForms) {
  // generate {}^t c J c with c in the parabolic so the isotropy holds
  std::mt19937_64 rng(31);
  for (i64 p : {2, 3, 5, 101}) {
    Field f(p);
    for (int m : {2, 3}) {
      int two_m = 2 * m;
      Mat j = standard_symplectic_form(f, two_m);
      for (int l = 0; l <= m; ++l) {
        for (int t = 0; t < 25; ++t) {
          // random parabolic element: block upper-triangular, invertible
          Mat c(f, two_m, two_m);
          std::uniform_int_distribution<i64> d(0, p - 1);
          while (true) {
            Mat a = testutil::random_invertible(f, l, rng);
            Mat b = testutil::random_invertible(f, two_m - l, rng);
            Mat top = testutil::random_matrix(f, l, two_m - l, rng);
            c = Mat::block_compose(f, {{a, top}, {Mat::zero(f, two_m - l, l), b}});
            if (c.invertible()) break;
          }
          Mat x = c.transpose() * j * c;
          ASSERT_TRUE(totally_isotropic(x, l));
          Mat q = skew_parabolic_reduce(x, l);
          EXPECT_EQ(q.transpose() * x * q, j);
          for (int i = l; i < two_m; ++i)
            for (int jj = 0; jj < l; ++jj) EXPECT_EQ(q(i, jj), 0);
        }
      }
    }
  }
}

TEST(SkewParabolicReduce, Beta2SolutionAllCharacteristics) {
  // the strict-upper trick must solve {}^t b2 w - w b2 = -d exactly
  std::mt19937_64 rng(41);
  for (i64 p : {2, 3, 101}) {
    Field f(p);
    for (int l : {1, 2, 3}) {
      Mat w = antidiag_identity(f, l);
      for (int t = 0; t < 50; ++t) {
        Mat d(f, l, l);
        std::uniform_int_distribution<i64> dist(0, p - 1);
        for (int i = 0; i < l; ++i)
          for (int j = i + 1; j < l; ++j) {
            d(i, j) = dist(rng);
            d(j, i) = f.neg(d(i, j));
          }
        ASSERT_TRUE(is_alternating(d));
        Mat b2 = w * strict_upper(d);
        EXPECT_EQ(b2.transpose() * w - w * b2, -d);
      }
    }
  }
}
