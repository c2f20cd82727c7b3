#pragma once

#include <map>
#include <thread>
#include <unordered_map>

#include "kly/witness.hpp"

namespace kly {

/// Exhaustive scan over y in H: does the plus-part of the stabilizer carry a
/// nontrivial character value?
inline bool stabilizer_has_nontrivial_theta(const Mat& g, const PairShape& ps, const std::vector<Mat>& h_elems) {
  const Field f = g.field();
  Mat gi = g.inverse();
  for (const Mat& y : h_elems) {
    Mat z = gi * y * g;
    if (!in_model_group_bar(ps.right, z)) continue;
    CharVal v = char_mul(f, psi_model(ps.left, y), psi_model(ps.right, z.tau()));
    if (v.exponent != 0) return true;
  }
  return false;
}

/// Exhaustive check of the stabilizer-character property: a nontrivial value
/// on the plus part, or (r = r') a trivial value on the transpose-exchange part.
inline bool oracle_property(const Mat& g, const PairShape& ps, const std::vector<Mat>& h_elems) {
  const Field f = g.field();
  Mat gi = g.inverse();
  Mat gt = g.transpose();
  for (const Mat& y : h_elems) {
    Mat z = gi * y * g;
    if (in_model_group_bar(ps.right, z)) {
      CharVal v = char_mul(f, psi_model(ps.left, y), psi_model(ps.right, z.tau()));
      if (v.exponent != 0) return true;
    }
    if (ps.diagonal()) {
      Mat z2 = gi * y * gt;
      if (in_model_group_bar(ps.right, z2)) {
        CharVal v = char_mul(f, psi_model(ps.left, y), psi_model(ps.right, z2.tau()));
        if (v.exponent == 0) return true;
      }
    }
  }
  return false;
}

struct PairSweep {
  int r = 0, rp = 0;
  i64 elements = 0;
  i64 failures = 0;
  std::vector<std::string> failure_notes;
};

struct SweepReport {
  int n = 0;
  i64 q = 0;
  i64 total_elements = 0;
  std::vector<PairSweep> pairs;

  i64 total_failures() const {
    i64 s = 0;
    for (const auto& p : pairs) s += p.failures;
    return s;
  }
};

inline std::vector<std::pair<int, int>> parity_legal_pairs(int n) {
  std::vector<std::pair<int, int>> out;
  for (int r = n % 2; r <= n; r += 2)
    for (int rp = n % 2; rp <= n; rp += 2) out.push_back({r, rp});
  return out;
}

/// For every g in GL_n(F_q) and every listed pair: the exhaustive oracle must
/// find the property, the constructive witness must verify, and the two must
/// agree. Shardable across workers; the merged report is order-deterministic.
inline SweepReport sweep_verify(int n, i64 q, const std::vector<std::pair<int, int>>& pairs,
                                const Budget& budget = {}, int workers = 1) {
  Field f(q);
  std::vector<Mat> gl = enumerate_gl(f, n, budget);
  SweepReport report;
  report.n = n;
  report.q = q;
  report.total_elements = static_cast<i64>(gl.size());

  for (auto [r, rp] : pairs) {
    PairShape ps(n, r, rp);
    std::vector<Mat> h_elems = enumerate_h(f, ps.left, budget);
    PairSweep pc;
    pc.r = r;
    pc.rp = rp;
    pc.elements = static_cast<i64>(gl.size());

    int nworkers = std::max(1, workers);
    std::vector<std::vector<std::pair<size_t, std::string>>> worker_fails(static_cast<size_t>(nworkers));
    auto run = [&](int wid) {
      for (size_t idx = static_cast<size_t>(wid); idx < gl.size(); idx += static_cast<size_t>(nworkers)) {
        const Mat& g = gl[idx];
        bool oracle_ok = oracle_property(g, ps, h_elems);
        bool witness_ok = false;
        std::string note;
        try {
          Certificate cert = find_witness(g, ps, budget);
          witness_ok = verify_certificate(g, ps, cert).pass;
          if (!witness_ok) note = "witness failed verification";
        } catch (const std::exception& e) {
          note = std::string("witness construction threw: ") + e.what();
        }
        if (!oracle_ok || !witness_ok) {
          if (!oracle_ok) note = "oracle found no nontrivial character element; " + note;
          worker_fails[static_cast<size_t>(wid)].push_back({idx, note});
        }
      }
    };
    if (nworkers == 1) {
      run(0);
    } else {
      std::vector<std::thread> threads;
      for (int widx = 0; widx < nworkers; ++widx) threads.emplace_back(run, widx);
      for (auto& t : threads) t.join();
    }
    std::vector<std::pair<size_t, std::string>> fails;
    for (auto& wf : worker_fails) fails.insert(fails.end(), wf.begin(), wf.end());
    std::sort(fails.begin(), fails.end());
    pc.failures = static_cast<i64>(fails.size());
    for (auto& [idx, notev] : fails)
      pc.failure_notes.push_back("g#" + std::to_string(idx) + ": " + notev);
    report.pairs.push_back(std::move(pc));
  }
  return report;
}

// ---- orbits and intertwining counts ----

struct Orbit {
  size_t representative = 0;  // index into the canonical GL enumeration
  i64 size = 0;
  bool contributing = false;  // theta trivial on the whole plus-stabilizer
};

struct OrbitReport {
  int n = 0;
  i64 q = 0;
  int r = 0, rp = 0;
  i64 group_order = 0;
  std::vector<Orbit> orbits;

  i64 contributing_count() const {
    i64 s = 0;
    for (const auto& o : orbits) s += o.contributing ? 1 : 0;
    return s;
  }
};

namespace detail {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(size_t n) : parent(n) {
    for (size_t i = 0; i < n; ++i) parent[i] = static_cast<int>(i);
  }
  int find(int a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

inline std::vector<Mat> model_group_generators(const Field& f, const Shape& s) {
  std::vector<Mat> gens;
  const int n = s.n;
  for (int i = 1; i < s.r; ++i) gens.push_back(elementary_unipotent(f, n, i, i + 1, 1));
  for (int i = 1; i <= s.r; ++i)
    for (int j = 1; j <= s.two_k(); ++j) gens.push_back(elementary_unipotent(f, n, i, s.r + j, 1));
  for (const Mat& t : sp_transvection_generators(f, s.two_k()))
    gens.push_back(Mat::block_diag(Mat::identity(f, s.r), t));
  return gens;
}

}  // namespace detail

/// Decompose GL_n(F_q) into orbits of the pair group acting by g -> h1 g {}^t h2,
/// with the stabilizer-character classification per orbit.
inline OrbitReport orbit_decompose(int n, i64 q, const PairShape& ps, const Budget& budget = {}) {
  Field f(q);
  std::vector<Mat> gl = enumerate_gl(f, n, budget);
  std::unordered_map<detail::MatKey, int, detail::MatKeyHash> index;
  index.reserve(gl.size() * 2);
  for (size_t i = 0; i < gl.size(); ++i) index[detail::key_of(gl[i])] = static_cast<int>(i);

  std::vector<Mat> left_gens = detail::model_group_generators(f, ps.left);
  std::vector<Mat> right_mults;  // {}^t h2 for generators h2 of H_{r',2k'}
  for (const Mat& hgen : detail::model_group_generators(f, ps.right)) right_mults.push_back(hgen.transpose());

  detail::UnionFind uf(gl.size());
  for (size_t i = 0; i < gl.size(); ++i) {
    for (const Mat& lg : left_gens) {
      auto it = index.find(detail::key_of(lg * gl[i]));
      if (it == index.end()) throw TheoryViolation("orbit_decompose: left move left the group");
      uf.unite(static_cast<int>(i), it->second);
    }
    for (const Mat& rm : right_mults) {
      auto it = index.find(detail::key_of(gl[i] * rm));
      if (it == index.end()) throw TheoryViolation("orbit_decompose: right move left the group");
      uf.unite(static_cast<int>(i), it->second);
    }
  }

  std::map<int, i64> sizes;
  for (size_t i = 0; i < gl.size(); ++i) sizes[uf.find(static_cast<int>(i))]++;

  std::vector<Mat> h_elems = enumerate_h(f, ps.left, budget);
  OrbitReport report;
  report.n = n;
  report.q = q;
  report.r = ps.r();
  report.rp = ps.rp();
  report.group_order = static_cast<i64>(gl.size());
  for (auto& [rep, size] : sizes) {
    Orbit o;
    o.representative = static_cast<size_t>(rep);
    o.size = size;
    o.contributing = !stabilizer_has_nontrivial_theta(gl[static_cast<size_t>(rep)], ps, h_elems);
    report.orbits.push_back(o);
  }
  i64 total = 0;
  for (const auto& o : report.orbits) total += o.size;
  if (total != report.group_order) throw TheoryViolation("orbit_decompose: orbit sizes do not sum to the group order");
  return report;
}

/// Intertwining number of the two induced characters: the count of orbits on
/// which theta restricts trivially to the stabilizer.
inline i64 mackey_count(int n, i64 q, const PairShape& ps, const Budget& budget = {}) {
  return orbit_decompose(n, q, ps, budget).contributing_count();
}

/// Conjugacy classes of GL_n(F_q) by direct enumeration.
inline i64 class_count(int n, i64 q, const Budget& budget = {}) {
  Field f(q);
  std::vector<Mat> gl = enumerate_gl(f, n, budget);
  std::unordered_map<detail::MatKey, int, detail::MatKeyHash> index;
  index.reserve(gl.size() * 2);
  for (size_t i = 0; i < gl.size(); ++i) index[detail::key_of(gl[i])] = static_cast<int>(i);

  std::vector<Mat> gens;
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j)
      if (i != j) gens.push_back(elementary_unipotent(f, n, i, j, 1));
  if (q > 2) {
    i64 root = 2;  // smallest generator of the cyclic unit group
    for (; root < q; ++root) {
      i64 x = root % q;
      bool generates = true;
      for (i64 e = 1; e < q - 2; ++e) {
        x = f.mul(x, root);
        if (x == 1) {
          generates = false;
          break;
        }
      }
      if (generates) break;
    }
    Mat t = Mat::identity(f, n);
    t(0, 0) = root;
    gens.push_back(t);
  }

  detail::UnionFind uf(gl.size());
  for (size_t i = 0; i < gl.size(); ++i)
    for (const Mat& s : gens) {
      auto it = index.find(detail::key_of(s * gl[i] * s.inverse()));
      if (it == index.end()) throw TheoryViolation("class_count: conjugation left the group");
      uf.unite(static_cast<int>(i), it->second);
    }
  std::map<int, bool> reps;
  for (size_t i = 0; i < gl.size(); ++i) reps[uf.find(static_cast<int>(i))] = true;
  return static_cast<i64>(reps.size());
}

struct MackeyTable {
  int n = 0;
  i64 q = 0;
  std::vector<std::tuple<int, int, i64>> entries;  // (r, r', count)
  i64 classes = 0;
  bool disjointness = false;   // off-diagonal counts all vanish
  bool sum_matches = false;    // diagonal counts sum to the class number

  bool pass() const { return disjointness && sum_matches; }
};

/// Full intertwining table plus the two consequences it must satisfy:
/// off-diagonal vanishing and the diagonal sum matching the class count.
inline MackeyTable klyachko_sum_check(int n, i64 q, const Budget& budget = {}) {
  MackeyTable t;
  t.n = n;
  t.q = q;
  i64 diag = 0;
  bool off_ok = true;
  for (auto [r, rp] : parity_legal_pairs(n)) {
    i64 cnt = mackey_count(n, q, PairShape(n, r, rp), budget);
    t.entries.push_back({r, rp, cnt});
    if (r == rp)
      diag += cnt;
    else if (cnt != 0)
      off_ok = false;
  }
  t.classes = class_count(n, q, budget);
  t.disjointness = off_ok;
  t.sum_matches = (diag == t.classes);
  return t;
}

}  // namespace kly
