#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "kly/io.hpp"
#include "kly/witness.hpp"
#include "test_util.hpp"

using namespace kly;

TEST(MatrixFormat, RoundTrip) {
  std::mt19937_64 rng(12);
  for (i64 p : {2, 5, 101}) {
    Field f(p);
    for (int n : {1, 3, 5}) {
      Mat m = testutil::random_matrix(f, n, n, rng);
      std::stringstream ss;
      write_matrix(ss, m);
      Mat back = read_matrix(ss);
      EXPECT_EQ(back, m);
    }
  }
}

TEST(MatrixFormat, Errors) {
  std::istringstream bad_header("m=2 q=3\n1 0\n0 1\n");
  EXPECT_THROW(read_matrix(bad_header), ParseError);
  std::istringstream missing_row("n=2 p=3\n1 0\n");
  EXPECT_THROW(read_matrix(missing_row), ParseError);
  std::istringstream short_row("n=2 p=3\n1\n0 1\n");
  EXPECT_THROW(read_matrix(short_row), ParseError);
}

TEST(CertificateDocument, RoundTrip) {
  std::mt19937_64 rng(13);
  Field f3(3);
  Mat g = testutil::random_invertible(f3, 4, rng);
  PairShape ps(4, 2, 2);
  Certificate cert = find_witness(g, ps);
  CertificateDocument doc = CertificateDocument::from(g, ps, cert);
  std::stringstream ss;
  write_certificate(ss, doc);
  CertificateDocument back = read_certificate(ss);
  EXPECT_EQ(back.p, doc.p);
  EXPECT_EQ(back.g, doc.g);
  EXPECT_EQ(back.y, doc.y);
  EXPECT_EQ(back.epsilon, doc.epsilon);
  EXPECT_EQ(back.value_exponent, doc.value_exponent);
  EXPECT_EQ(back.trace, doc.trace);
  // the parsed document verifies on its own, with no other inputs
  EXPECT_TRUE(verify_certificate(back.g, back.shape(), back.certificate()).pass);
}

TEST(CertificateDocument, ParseErrors) {
  std::istringstream wrong_version("kly-cert/9\n");
  EXPECT_THROW(read_certificate(wrong_version), ParseError);
  std::istringstream truncated("kly-cert/1\np=3\nn=2\nr=2\n");
  EXPECT_THROW(read_certificate(truncated), ParseError);
  std::istringstream bad_eps("kly-cert/1\np=3\nn=1\nr=1\nrprime=1\nepsilon=2\nvalue=0\n");
  EXPECT_THROW(read_certificate(bad_eps), ParseError);
}

TEST(Reports, SweepAndMackeyRender) {
  SweepReport rep = sweep_verify(2, 2, parity_legal_pairs(2));
  std::stringstream ss;
  write_sweep_table(ss, rep);
  EXPECT_NE(ss.str().find("0 failures / 6 elements"), std::string::npos);

  MackeyTable t = klyachko_sum_check(2, 2);
  std::stringstream ms;
  write_mackey_table(ms, t);
  EXPECT_NE(ms.str().find("diagonal sum = 3, classes = 3"), std::string::npos);
  EXPECT_NE(ms.str().find("PASS"), std::string::npos);
}

TEST(ParserRobustness, OversizedHeadersRejected) {
  std::istringstream huge_n("n=999999999 p=3\n");
  EXPECT_THROW(read_matrix(huge_n), ParseError);
  std::istringstream huge_p("n=2 p=4611686018427387847\n1 0\n0 1\n");
  EXPECT_THROW(read_matrix(huge_p), ParseError);
}

TEST(ParserRobustness, MutationFuzzNeverCrashes) {
  Field f3(3);
  Mat g = Mat::identity(f3, 3);
  PairShape ps(3, 1, 1);
  Certificate cert = find_witness(g, ps);
  std::ostringstream os;
  write_certificate(os, CertificateDocument::from(g, ps, cert));
  const std::string base = os.str();
  std::mt19937_64 rng(2024);
  int parsed_ok = 0;
  for (int t = 0; t < 2000; ++t) {
    std::string doc = base;
    int edits = 1 + static_cast<int>(rng() % 4);
    for (int e = 0; e < edits; ++e) {
      size_t pos = rng() % doc.size();
      doc[pos] = static_cast<char>("0123456789 \n=-abcxyz"[rng() % 21]);
    }
    std::istringstream is(doc);
    try {
      CertificateDocument d = read_certificate(is);
      verify_certificate(d.g, d.shape(), d.certificate());
      ++parsed_ok;
    } catch (const std::exception&) {
      // rejection is fine; crashing is not
    }
  }
  EXPECT_GE(parsed_ok, 0);
}
