#include <gtest/gtest.h>

#include <random>

#include "kly/enumerate.hpp"
#include "test_util.hpp"

using namespace kly;

TEST(Membership, Unipotent) {
  Field f3(3);
  EXPECT_TRUE(in_upper_unitriangular(elementary_unipotent(f3, 2, 1, 2, 1)));
  EXPECT_FALSE(in_upper_unitriangular(Mat(f3, {{1, 0}, {1, 1}})));
  EXPECT_TRUE(in_lower_unitriangular(Mat(f3, {{1, 0}, {1, 1}})));
}

TEST(Membership, SpOfJ2EqualsSL2) {
  Field f3(3);
  std::vector<Mat> gl = enumerate_gl(f3, 2);
  int count = 0;
  for (const Mat& g : gl) {
    bool sp = in_sp_standard(g);
    EXPECT_EQ(sp, g.det() == 1);
    count += sp ? 1 : 0;
  }
  EXPECT_EQ(count, 24);
}

TEST(Membership, ModelGroup) {
  Field f3(3);
  Shape s(3, 1);  // H_{1,2}
  Mat h(f3, {{1, 2, 1}, {0, 1, 0}, {0, 0, 1}});
  EXPECT_TRUE(in_model_group(s, h));
  Mat bad(f3, {{1, 0, 0}, {1, 1, 0}, {0, 0, 1}});
  EXPECT_FALSE(in_model_group(s, bad));
  EXPECT_TRUE(in_model_group_bar(s, h.transpose()));
}

TEST(Characters, PsiGeneric) {
  Field f5(5);
  EXPECT_EQ(psi_generic(Mat::identity(f5, 3)).exponent, 0);
  Mat u = Mat::identity(f5, 3);
  u(0, 1) = 2;
  u(1, 2) = 4;
  EXPECT_EQ(psi_generic(u).exponent, 1);  // 2 + 4 = 6 = 1 mod 5
  EXPECT_EQ(psi_generic(Mat::identity(f5, 1)).exponent, 0);
}

TEST(Characters, PsiModelIgnoresXAndSp) {
  Field f3(3);
  Shape s(3, 1);
  std::mt19937_64 rng(5);
  for (int t = 0; t < 50; ++t) {
    Mat x = testutil::random_matrix(f3, 1, 2, rng);
    Mat sp = testutil::random_sp(f3, 2, rng);
    Mat h = compose_H(s, Mat::identity(f3, 1), x, sp);
    EXPECT_EQ(psi_model(s, h).exponent, 0);
  }
  // embedded generic part shows through
  Shape s22(4, 2);
  Mat u = elementary_unipotent(f3, 2, 1, 2, 1);
  Mat h = compose_H(s22, u, Mat::zero(f3, 2, 2), Mat::identity(f3, 2));
  EXPECT_EQ(psi_model(s22, h).exponent, 1);
  EXPECT_EQ(psi_model(s22, Mat::identity(f3, 4)).exponent, 0);
}

TEST(Characters, PsiModelIsHomomorphism) {
  std::mt19937_64 rng(6);
  for (i64 p : {2, 3, 5}) {
    Field f(p);
    Shape s(4, 2);
    for (int t = 0; t < 60; ++t) {
      Mat a = testutil::random_model_element(f, s, rng);
      Mat b = testutil::random_model_element(f, s, rng);
      CharVal lhs = psi_model(s, a * b);
      CharVal rhs = char_mul(f, psi_model(s, a), psi_model(s, b));
      EXPECT_EQ(lhs.exponent, rhs.exponent);
    }
  }
}

TEST(Characters, ThetaAndThetaTilde) {
  Field f3(3);
  PairShape ps(2, 2, 2);
  Mat id = Mat::identity(f3, 2);
  TwistedPair e = TwistedPair::id(ps, f3);
  EXPECT_TRUE(theta_tilde(e).trivial());
  TwistedPair flip(ps, id, id, -1);
  CharVal v = theta_tilde(flip);
  EXPECT_EQ(v.exponent, 0);
  EXPECT_EQ(v.sign, -1);
  EXPECT_TRUE(v.nontrivial());
}

TEST(Characters, ThetaInvariantUnderXiOnDiagonalShapes) {
  std::mt19937_64 rng(8);
  Field f3(3);
  PairShape ps(4, 2, 2);
  for (int t = 0; t < 100; ++t) {
    Mat h1 = testutil::random_model_element(f3, ps.left, rng);
    Mat h2 = testutil::random_model_element(f3, ps.right, rng);
    CharVal a = theta_pair(ps, h1, h2);
    CharVal b = theta_pair(ps, h2, h1);  // theta o xi
    EXPECT_EQ(a.exponent, b.exponent);
  }
}

TEST(TwistedPair, GroupLawAndAction) {
  std::mt19937_64 rng(9);
  Field f3(3);
  PairShape ps(4, 2, 2);
  for (int t = 0; t < 40; ++t) {
    Mat a1 = testutil::random_model_element(f3, ps.left, rng);
    Mat a2 = testutil::random_model_element(f3, ps.right, rng);
    Mat b1 = testutil::random_model_element(f3, ps.left, rng);
    Mat b2 = testutil::random_model_element(f3, ps.right, rng);
    Mat g = testutil::random_invertible(f3, 4, rng);
    for (int ea : {1, -1})
      for (int eb : {1, -1}) {
        TwistedPair A(ps, a1, a2, ea), B(ps, b1, b2, eb);
        // action axiom (AB).g = A.(B.g)
        EXPECT_EQ(A.mul(B).act(g), A.act(B.act(g)));
        // inverses
        TwistedPair P = A.mul(A.inv());
        EXPECT_EQ(P.h1, Mat::identity(f3, 4));
        EXPECT_EQ(P.h2, Mat::identity(f3, 4));
        EXPECT_EQ(P.eps, +1);
      }
    // transpose identity {}^t(h.g) = xi(h) . {}^t g
    TwistedPair A(ps, a1, a2, +1);
    EXPECT_EQ(A.act(g).transpose(), A.xi().act(g.transpose()));
    // xi is an involution
    EXPECT_EQ(A.xi().xi().h1, A.h1);
    EXPECT_EQ(A.xi().xi().h2, A.h2);
    // identity acts trivially
    EXPECT_EQ(TwistedPair::id(ps, f3).act(g), g);
    // (h,-1)(h',-1) lands at eps=+1 with the twisted product
    TwistedPair M(ps, a1, a2, -1), N(ps, b1, b2, -1);
    TwistedPair MN = M.mul(N);
    EXPECT_EQ(MN.eps, +1);
    EXPECT_EQ(MN.h1, a1 * b2);
    EXPECT_EQ(MN.h2, a2 * b1);
  }
}

TEST(TwistedPair, EpsMinusRequiresDiagonalShape) {
  Field f3(3);
  PairShape ps(4, 2, 0);
  Mat h1 = Mat::identity(f3, 4), h2 = Mat::identity(f3, 4);
  EXPECT_THROW(TwistedPair(ps, h1, h2, -1), std::invalid_argument);
}

TEST(DecomposeH, RoundTrip) {
  std::mt19937_64 rng(10);
  Field f3(3);
  Shape s(4, 2);
  EXPECT_EQ(decompose_H(s, Mat::identity(f3, 4)).u, Mat::identity(f3, 2));
  for (int t = 0; t < 50; ++t) {
    Mat h = testutil::random_model_element(f3, s, rng);
    ModelBlocks b = decompose_H(s, h);
    EXPECT_EQ(compose_H(s, b.u, b.x, b.sp), h);
  }
  Mat sp = testutil::random_sp(f3, 2, rng);
  Mat emb = Mat::block_diag(Mat::identity(f3, 2), sp);
  ModelBlocks b = decompose_H(s, emb);
  EXPECT_EQ(b.u, Mat::identity(f3, 2));
  EXPECT_EQ(b.x, Mat::zero(f3, 2, 2));
  EXPECT_EQ(b.sp, sp);
}

TEST(Enumerate, Cardinalities) {
  Field f2(2), f3(3);
  EXPECT_EQ(static_cast<i64>(enumerate_gl(f2, 2).size()), 6);
  EXPECT_EQ(order_gl(2, 2), 6);
  EXPECT_EQ(static_cast<i64>(enumerate_sp(f3, 2).size()), 24);
  EXPECT_EQ(order_sp(3, 1), 24);
  EXPECT_EQ(static_cast<i64>(enumerate_h(f3, Shape(3, 1)).size()), 216);
  EXPECT_EQ(static_cast<i64>(enumerate_gl(f3, 3).size()), order_gl(3, 3));
  EXPECT_EQ(static_cast<i64>(enumerate_sp(f2, 4).size()), order_sp(2, 2));
  EXPECT_EQ(static_cast<i64>(enumerate_unipotent(f3, 3).size()), 27);
}

TEST(Enumerate, BudgetGuard) {
  Field f3(3);
  Budget tiny{1000};
  EXPECT_THROW(enumerate_gl(f3, 4, tiny), BudgetExceeded);
}

TEST(Enumerate, DeterministicOrder) {
  Field f3(3);
  auto a = enumerate_sp(f3, 2);
  auto b = enumerate_sp(f3, 2);
  EXPECT_TRUE(a == b);
  auto ga = enumerate_gl(f3, 2);
  auto gb = enumerate_gl(f3, 2);
  EXPECT_TRUE(ga == gb);
}

TEST(Characters, ThetaTildeIsHomomorphismOnDiagonalShapes) {
  std::mt19937_64 rng(11);
  for (i64 p : {2, 3, 5}) {
    Field f(p);
    PairShape ps(4, 2, 2);
    for (int t = 0; t < 60; ++t) {
      Mat a1 = testutil::random_model_element(f, ps.left, rng);
      Mat a2 = testutil::random_model_element(f, ps.right, rng);
      Mat b1 = testutil::random_model_element(f, ps.left, rng);
      Mat b2 = testutil::random_model_element(f, ps.right, rng);
      for (int ea : {1, -1})
        for (int eb : {1, -1}) {
          TwistedPair A(ps, a1, a2, ea), B(ps, b1, b2, eb);
          CharVal lhs = theta_tilde(A.mul(B));
          CharVal rhs = char_mul(f, theta_tilde(A), theta_tilde(B));
          EXPECT_EQ(lhs.exponent, rhs.exponent);
          EXPECT_EQ(lhs.sign, rhs.sign);
        }
    }
  }
}
