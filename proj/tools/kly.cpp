// Command line surface for the witness engine and the finite-field oracle.
//
// Exit codes: 0 success/PASS, 1 verification FAIL, 2 invalid input,
// 3 unsupported field for the requested construction, 4 internal invariant
// failure, 5 enumeration budget exceeded.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "kly/io.hpp"
#include "kly/witness.hpp"

using namespace kly;
using nlohmann::json;

namespace {

constexpr int kExitFail = 1;
constexpr int kExitBadInput = 2;
constexpr int kExitUnsupportedField = 3;
constexpr int kExitTheory = 4;
constexpr int kExitBudget = 5;

Mat read_matrix_arg(const std::string& src, i64 expected_p) {
  Mat m;
  if (src == "-") {
    m = read_matrix(std::cin);
  } else {
    std::ifstream in(src);
    if (!in) throw ParseError("cannot open matrix file '" + src + "'");
    m = read_matrix(in);
  }
  if (expected_p > 0 && m.p() != expected_p)
    throw ParseError("matrix header modulus " + std::to_string(m.p()) + " disagrees with --p " +
                     std::to_string(expected_p));
  return m;
}

void write_out(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
  out << content;
}

struct Footer {
  bool enabled;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  ~Footer() {
    if (!enabled) return;
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
    std::cout << "# elapsed ms=" << ms.count() << "\n";
  }
};

std::vector<std::pair<int, int>> parse_pairs(const std::string& spec, int n) {
  if (spec == "all") return parity_legal_pairs(n);
  std::vector<std::pair<int, int>> out;
  std::istringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    int r, rp;
    if (std::sscanf(tok.c_str(), "%d:%d", &r, &rp) != 2)
      throw ParseError("bad pair token '" + tok + "', expected r:rprime");
    out.push_back({r, rp});
  }
  if (out.empty()) throw ParseError("no pairs given");
  return out;
}

json sweep_to_json(const SweepReport& rep) {
  json j;
  j["n"] = rep.n;
  j["q"] = rep.q;
  j["elements"] = rep.total_elements;
  j["failures"] = rep.total_failures();
  j["pairs"] = json::array();
  for (const auto& p : rep.pairs) {
    json jp;
    jp["r"] = p.r;
    jp["rprime"] = p.rp;
    jp["elements"] = p.elements;
    jp["failures"] = p.failures;
    jp["notes"] = p.failure_notes;
    j["pairs"].push_back(jp);
  }
  return j;
}

json mackey_to_json(const MackeyTable& t) {
  json j;
  j["n"] = t.n;
  j["q"] = t.q;
  j["classes"] = t.classes;
  j["disjointness"] = t.disjointness;
  j["sum_matches"] = t.sum_matches;
  j["entries"] = json::array();
  for (auto& [r, rp, cnt] : t.entries) j["entries"].push_back({{"r", r}, {"rprime", rp}, {"count", cnt}});
  return j;
}

int cmd_witness(const std::string& matrix_src, i64 p_check, int r, int rp, const std::string& out, bool no_footer,
                i64 budget_ops) {
  Footer footer{!no_footer};
  Mat g = read_matrix_arg(matrix_src, p_check);
  PairShape ps(g.rows(), r, rp);
  Budget budget{budget_ops};
  Certificate cert;
  try {
    cert = find_witness(g, ps, budget);
  } catch (const BudgetExceeded& e) {
    std::cerr << "unsupported field for this construction: " << e.what() << "\n";
    return kExitUnsupportedField;
  }
  VerifyResult vr = verify_certificate(g, ps, cert);
  if (!vr.pass) throw TheoryViolation("constructed certificate failed clause " + std::string(1, vr.clause));
  std::ostringstream os;
  write_certificate(os, CertificateDocument::from(g, ps, cert));
  if (out.empty())
    std::cout << os.str();
  else
    write_out(out, os.str());
  return 0;
}

int cmd_verify(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open certificate file '" + path + "'");
  CertificateDocument doc = read_certificate(in);
  PairShape ps = doc.shape();
  VerifyResult vr = verify_certificate(doc.g, ps, doc.certificate());
  if (vr.pass) {
    std::cout << "PASS\n";
    return 0;
  }
  std::cout << "FAIL clause " << vr.clause << ": " << vr.detail << "\n";
  return kExitFail;
}

int cmd_sweep(int n, i64 q, const std::string& pairs_spec, const std::string& out, bool no_footer, i64 budget_ops,
              int workers) {
  Footer footer{!no_footer};
  auto pairs = parse_pairs(pairs_spec, n);
  SweepReport rep = sweep_verify(n, q, pairs, Budget{budget_ops}, workers);
  write_sweep_table(std::cout, rep);
  if (!out.empty()) write_out(out, sweep_to_json(rep).dump(2) + "\n");
  return rep.total_failures() == 0 ? 0 : kExitFail;
}

int cmd_mackey(int n, i64 q, const std::string& out, bool no_footer, i64 budget_ops) {
  Footer footer{!no_footer};
  MackeyTable t = klyachko_sum_check(n, q, Budget{budget_ops});
  write_mackey_table(std::cout, t);
  if (!out.empty()) write_out(out, mackey_to_json(t).dump(2) + "\n");
  return t.pass() ? 0 : kExitFail;
}

int cmd_bruhat(const std::string& matrix_src, i64 p_check, int r, int rp, bool no_footer) {
  Footer footer{!no_footer};
  Mat g = read_matrix_arg(matrix_src, p_check);
  PairShape ps(g.rows(), r, rp);
  BruhatCell cell = bruhat_cell(g, ps);
  std::cout << "w=";
  for (size_t j = 0; j < cell.w.size(); ++j) std::cout << (j ? " " : "") << cell.w[j] + 1;
  std::cout << "\np=\n";
  write_matrix(std::cout, cell.p);
  std::cout << "pbar=\n";
  write_matrix(std::cout, cell.pbar);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"witness construction and exhaustive verification for mixed symplectic-Whittaker shapes"};
  app.require_subcommand(1);

  std::string matrix_src = "-", out, pairs_spec = "all", cert_path;
  int r = 0, rp = 0, n = 2, workers = 1;
  i64 q = 2, p_check = 0, budget_ops = 100000000;
  bool no_footer = false;

  auto* w = app.add_subcommand("witness", "construct a certificate for g");
  w->add_option("--matrix", matrix_src, "matrix file or - for stdin");
  w->add_option("--r", r)->required();
  w->add_option("--rprime", rp)->required();
  w->add_option("--p", p_check, "optional field check against the matrix header");
  w->add_option("--out", out);
  w->add_option("--budget", budget_ops);
  w->add_flag("--no-footer", no_footer);

  auto* v = app.add_subcommand("verify", "verify a certificate document");
  v->add_option("--cert", cert_path, "certificate file")->required();

  auto* s = app.add_subcommand("sweep", "exhaustive oracle + witness sweep over GL_n(F_q)");
  s->add_option("--n", n)->required();
  s->add_option("--q", q)->required();
  s->add_option("--pairs", pairs_spec, "all or comma list r:rprime");
  s->add_option("--budget", budget_ops);
  s->add_option("--workers", workers);
  s->add_option("--out", out, "also write a JSON report");
  s->add_flag("--no-footer", no_footer);

  auto* m = app.add_subcommand("mackey", "intertwining table, class count and the sum check");
  m->add_option("--n", n)->required();
  m->add_option("--q", q)->required();
  m->add_option("--budget", budget_ops);
  m->add_option("--out", out, "also write a JSON report");
  m->add_flag("--no-footer", no_footer);

  auto* b = app.add_subcommand("bruhat", "cell data w, p, pbar for g");
  b->add_option("--matrix", matrix_src, "matrix file or - for stdin");
  b->add_option("--r", r)->required();
  b->add_option("--rprime", rp)->required();
  b->add_option("--p", p_check, "optional field check against the matrix header");
  b->add_flag("--no-footer", no_footer);

  CLI11_PARSE(app, argc, argv);

  try {
    if (w->parsed()) return cmd_witness(matrix_src, p_check, r, rp, out, no_footer, budget_ops);
    if (v->parsed()) return cmd_verify(cert_path);
    if (s->parsed()) return cmd_sweep(n, q, pairs_spec, out, no_footer, budget_ops, workers);
    if (m->parsed()) return cmd_mackey(n, q, out, no_footer, budget_ops);
    if (b->parsed()) return cmd_bruhat(matrix_src, p_check, r, rp, no_footer);
  } catch (const ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitBadInput;
  } catch (const TheoryViolation& e) {
    std::cerr << e.what() << "\n";
    return kExitTheory;
  } catch (const BudgetExceeded& e) {
    std::cerr << e.what() << "\n";
    return kExitBudget;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitTheory;
  }
  return kExitBadInput;
}
