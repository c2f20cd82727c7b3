#pragma once

#include <iostream>
#include <sstream>
#include <string>

#include "kly/oracle.hpp"

namespace kly {

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error("parse error: " + what) {}
};

inline constexpr int kMaxParsedSize = 4096;  // sanity cap on untrusted input

// ---- shared matrix text format ----
// header "n=<size> p=<prime>", then one row per line, decimal residues.

inline void write_matrix(std::ostream& os, const Mat& m) {
  os << "n=" << m.rows() << " p=" << m.p() << "\n";
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) os << (j ? " " : "") << m(i, j);
    os << "\n";
  }
}

inline std::string matrix_to_string(const Mat& m) {
  std::ostringstream os;
  write_matrix(os, m);
  return os.str();
}

inline Mat read_matrix(std::istream& is) {
  std::string header;
  do {
    if (!std::getline(is, header)) throw ParseError("missing matrix header");
  } while (header.empty());
  int n = -1;
  long long p = -1;
  if (std::sscanf(header.c_str(), "n=%d p=%lld", &n, &p) != 2)
    throw ParseError("bad matrix header '" + header + "'");
  if (n < 0 || n > kMaxParsedSize || p < 2 || p > Field::kMaxModulus)
    throw ParseError("bad matrix dimensions in header");
  Field f(p);
  Mat m(f, n, n);
  for (int i = 0; i < n; ++i) {
    std::string line;
    if (!std::getline(is, line)) throw ParseError("matrix row " + std::to_string(i + 1) + " missing");
    std::istringstream ls(line);
    for (int j = 0; j < n; ++j) {
      long long v;
      if (!(ls >> v)) throw ParseError("matrix entry (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ") missing");
      m(i, j) = f.reduce(v);
    }
  }
  return m;
}

// ---- certificate documents ----

inline constexpr const char* kCertVersion = "kly-cert/1";

struct CertificateDocument {
  i64 p = 0;
  int n = 0, r = 0, rprime = 0;
  Mat g, y;
  int epsilon = +1;
  i64 value_exponent = 0;
  std::vector<std::string> trace;

  PairShape shape() const { return PairShape(n, r, rprime); }
  Certificate certificate() const { return Certificate{shape(), y, epsilon, CharVal{value_exponent, +1}, trace}; }

  static CertificateDocument from(const Mat& g, const PairShape& ps, const Certificate& cert) {
    CertificateDocument d;
    d.p = g.p();
    d.n = ps.n();
    d.r = ps.r();
    d.rprime = ps.rp();
    d.g = g;
    d.y = cert.y;
    d.epsilon = cert.eps;
    d.value_exponent = cert.value.exponent;
    d.trace = cert.trace;
    return d;
  }
};

inline void write_certificate(std::ostream& os, const CertificateDocument& d) {
  os << kCertVersion << "\n";
  os << "p=" << d.p << "\n";
  os << "n=" << d.n << "\n";
  os << "r=" << d.r << "\n";
  os << "rprime=" << d.rprime << "\n";
  os << "epsilon=" << (d.epsilon > 0 ? "+1" : "-1") << "\n";
  os << "value=" << d.value_exponent << "\n";
  os << "g=\n";
  for (int i = 0; i < d.n; ++i) {
    for (int j = 0; j < d.n; ++j) os << (j ? " " : "") << d.g(i, j);
    os << "\n";
  }
  os << "y=\n";
  for (int i = 0; i < d.n; ++i) {
    for (int j = 0; j < d.n; ++j) os << (j ? " " : "") << d.y(i, j);
    os << "\n";
  }
  os << "trace:\n";
  for (const auto& t : d.trace) os << "- " << t << "\n";
  os << "end\n";
}

inline CertificateDocument read_certificate(std::istream& is) {
  auto expect_line = [&is](const char* what) {
    std::string line;
    if (!std::getline(is, line)) throw ParseError(std::string("unexpected end of certificate before ") + what);
    return line;
  };
  std::string version = expect_line("version");
  if (version != kCertVersion) throw ParseError("unsupported certificate version '" + version + "'");
  auto key_value = [&expect_line](const char* key) {
    std::string line = expect_line(key);
    std::string prefix = std::string(key) + "=";
    if (line.rfind(prefix, 0) != 0) throw ParseError("expected '" + prefix + "...', got '" + line + "'");
    return line.substr(prefix.size());
  };
  CertificateDocument d;
  try {
    d.p = std::stoll(key_value("p"));
    d.n = std::stoi(key_value("n"));
    d.r = std::stoi(key_value("r"));
    d.rprime = std::stoi(key_value("rprime"));
  } catch (const std::logic_error&) {
    throw ParseError("malformed numeric field");
  }
  std::string eps = key_value("epsilon");
  if (eps == "+1" || eps == "1")
    d.epsilon = +1;
  else if (eps == "-1")
    d.epsilon = -1;
  else
    throw ParseError("epsilon must be +1 or -1");
  try {
    d.value_exponent = std::stoll(key_value("value"));
  } catch (const std::logic_error&) {
    throw ParseError("malformed value exponent");
  }
  if (d.n < 0 || d.n > kMaxParsedSize || d.p < 2 || d.p > Field::kMaxModulus)
    throw ParseError("bad certificate dimensions");
  Field f(d.p);
  auto read_block = [&](const char* name) {
    std::string head = expect_line(name);
    if (head != std::string(name) + "=") throw ParseError(std::string("expected '") + name + "='");
    Mat m(f, d.n, d.n);
    for (int i = 0; i < d.n; ++i) {
      std::istringstream ls(expect_line("matrix row"));
      for (int j = 0; j < d.n; ++j) {
        long long v;
        if (!(ls >> v)) throw ParseError("matrix entry missing in certificate");
        m(i, j) = f.reduce(v);
      }
    }
    return m;
  };
  d.g = read_block("g");
  d.y = read_block("y");
  std::string th = expect_line("trace header");
  if (th != "trace:") throw ParseError("expected 'trace:'");
  while (true) {
    std::string line = expect_line("trace line or end");
    if (line == "end") break;
    if (line.rfind("- ", 0) != 0) throw ParseError("trace lines must start with '- '");
    d.trace.push_back(line.substr(2));
  }
  return d;
}

// ---- report rendering ----

inline void write_sweep_table(std::ostream& os, const SweepReport& rep) {
  os << "sweep n=" << rep.n << " q=" << rep.q << " |GL|=" << rep.total_elements << "\n";
  os << "  r  r'   elements  failures\n";
  for (const auto& p : rep.pairs) {
    os << "  " << p.r << "  " << p.rp << "   " << p.elements << "  " << p.failures << "\n";
    for (const auto& nt : p.failure_notes) os << "    ! " << nt << "\n";
  }
  os << (rep.total_failures() == 0 ? "0 failures" : std::to_string(rep.total_failures()) + " FAILURES") << " / "
     << rep.total_elements << " elements\n";
}

inline void write_mackey_table(std::ostream& os, const MackeyTable& t) {
  os << "mackey n=" << t.n << " q=" << t.q << "\n";
  os << "  r  r'  intertwining\n";
  i64 diag = 0;
  for (auto& [r, rp, cnt] : t.entries) {
    os << "  " << r << "  " << rp << "  " << cnt << "\n";
    if (r == rp) diag += cnt;
  }
  os << "diagonal sum = " << diag << ", classes = " << t.classes << "\n";
  os << "disjointness " << (t.disjointness ? "PASS" : "FAIL") << ", multiplicity-one sum "
     << (t.sum_matches ? "PASS" : "FAIL") << "\n";
}

}  // namespace kly
