#pragma once

#include <string>

#include "kly/matrix.hpp"

namespace kly {

/// Decomposition n = r + 2k attached to one mixed model.
struct Shape {
  int n = 0, r = 0, k = 0;

  Shape() = default;
  Shape(int n_, int r_) : n(n_), r(r_) {
    if (r < 0 || r > n || (n - r) % 2 != 0)
      throw std::invalid_argument("Shape: need 0 <= r <= n with n - r even");
    k = (n - r) / 2;
  }
  int two_k() const { return 2 * k; }
};

/// A pair of decompositions n = r + 2k = r' + 2k' of the same n.
struct PairShape {
  Shape left, right;

  PairShape() = default;
  PairShape(int n, int r, int rp) : left(n, r), right(n, rp) {}
  int n() const { return left.n; }
  int r() const { return left.r; }
  int rp() const { return right.r; }
  PairShape swapped() const { return PairShape(n(), rp(), r()); }
  bool diagonal() const { return r() == rp(); }
};

// ---- memberships ----

inline bool in_upper_unitriangular(const Mat& g) {
  if (!g.square()) return false;
  for (int i = 0; i < g.rows(); ++i) {
    if (g(i, i) != 1) return false;
    for (int j = 0; j < i; ++j)
      if (g(i, j) != 0) return false;
  }
  return true;
}

inline bool in_lower_unitriangular(const Mat& g) {
  if (!g.square()) return false;
  for (int i = 0; i < g.rows(); ++i) {
    if (g(i, i) != 1) return false;
    for (int j = i + 1; j < g.cols(); ++j)
      if (g(i, j) != 0) return false;
  }
  return true;
}

/// Sp(form) = { g : {}^t g . form . g = form }.
inline bool in_symplectic(const Mat& form, const Mat& g) {
  if (g.rows() != form.rows() || !g.square()) throw std::invalid_argument("in_symplectic: size mismatch");
  return g.transpose() * form * g == form;
}

inline bool in_sp_standard(const Mat& g) { return in_symplectic(standard_symplectic_form(g.field(), g.rows()), g); }

/// H_{r,2k} = ( u X ; 0 h ), u upper unitriangular, h in Sp(J_{2k}).
inline bool in_model_group(const Shape& s, const Mat& g) {
  if (g.rows() != s.n || !g.square()) throw std::invalid_argument("in_model_group: size mismatch");
  if (!in_upper_unitriangular(g.submatrix(0, 0, s.r, s.r))) return false;
  if (g.submatrix(s.r, 0, s.two_k(), s.r) != Mat::zero(g.field(), s.two_k(), s.r)) return false;
  return in_sp_standard(g.submatrix(s.r, s.r, s.two_k(), s.two_k()));
}

/// Hbar_{r,2k}: the image of H_{r,2k} under transpose.
inline bool in_model_group_bar(const Shape& s, const Mat& g) {
  if (g.rows() != s.n || !g.square()) throw std::invalid_argument("in_model_group_bar: size mismatch");
  if (!in_lower_unitriangular(g.submatrix(0, 0, s.r, s.r))) return false;
  if (g.submatrix(0, s.r, s.r, s.two_k()) != Mat::zero(g.field(), s.r, s.two_k())) return false;
  return in_sp_standard(g.submatrix(s.r, s.r, s.two_k(), s.two_k()));
}

// ---- characters ----

/// psi_r(u) = psi(u_{1,2} + ... + u_{r-1,r}) on upper unitriangular u.
inline CharVal psi_generic(const Mat& u) {
  if (!in_upper_unitriangular(u)) throw std::invalid_argument("psi_generic: not upper unitriangular");
  const Field f = u.field();
  i64 e = 0;
  for (int i = 0; i + 1 < u.rows(); ++i) e = f.add(e, u(i, i + 1));
  return CharVal{e, +1};
}

/// psi_{r,2k} on H_{r,2k}: the generic character of the unitriangular corner.
inline CharVal psi_model(const Shape& s, const Mat& h) {
  if (!in_model_group(s, h)) throw std::invalid_argument("psi_model: matrix is not in H_{r,2k}");
  return psi_generic(h.submatrix(0, 0, s.r, s.r));
}

/// theta(h1, h2^tau) = psi_{r,2k}(h1) psi_{r',2k'}(h2); inputs are the H-side
/// representatives (h1 in H, h2 in H').
inline CharVal theta_pair(const PairShape& ps, const Mat& h1, const Mat& h2) {
  CharVal a = psi_model(ps.left, h1);
  CharVal b = psi_model(ps.right, h2);
  return char_mul(h1.field(), a, b);
}

/// Element (h, eps) of the twisted pair group. Stored as (h1, h2) with the
/// actual pair being (h1, h2^tau); eps = -1 only allowed when r = r'.
struct TwistedPair {
  PairShape shape;
  Mat h1, h2;
  int eps = +1;

  TwistedPair(const PairShape& ps, Mat h1_, Mat h2_, int eps_ = +1)
      : shape(ps), h1(std::move(h1_)), h2(std::move(h2_)), eps(eps_) {
    if (eps != +1 && eps != -1) throw std::invalid_argument("TwistedPair: eps must be +-1");
    if (eps == -1 && !ps.diagonal()) throw std::invalid_argument("TwistedPair: eps = -1 requires r = r'");
    if (!in_model_group(ps.left, h1)) throw std::invalid_argument("TwistedPair: h1 not in H_{r,2k}");
    if (!in_model_group(ps.right, h2)) throw std::invalid_argument("TwistedPair: h2 not in H_{r',2k'}");
  }

  static TwistedPair id(const PairShape& ps, const Field& f) {
    return TwistedPair(ps, Mat::identity(f, ps.n()), Mat::identity(f, ps.n()), +1);
  }

  /// (h, eps) . g = h1 . T_eps(g) . {}^t h2.
  Mat act(const Mat& g) const {
    Mat t = (eps == +1) ? g : g.transpose();
    return h1 * t * h2.transpose();
  }

  TwistedPair mul(const TwistedPair& o) const {
    if (eps == +1) return TwistedPair(shape, h1 * o.h1, h2 * o.h2, o.eps);
    return TwistedPair(shape, h1 * o.h2, h2 * o.h1, -o.eps);
  }

  TwistedPair inv() const {
    if (eps == +1) return TwistedPair(shape, h1.inverse(), h2.inverse(), +1);
    return TwistedPair(shape, h2.inverse(), h1.inverse(), -1);
  }

  /// xi swaps the two components; lands in the group of the swapped shape.
  TwistedPair xi() const { return TwistedPair(shape.swapped(), h2, h1, eps); }
};

inline CharVal theta_tilde(const TwistedPair& t) {
  CharVal v = theta_pair(t.shape, t.h1, t.h2);
  v.sign *= t.eps;
  return v;
}

/// Block data of an element of H_{r,2k}.
struct ModelBlocks {
  Mat u, x, sp;
};

inline ModelBlocks decompose_H(const Shape& s, const Mat& h) {
  if (!in_model_group(s, h)) throw std::invalid_argument("decompose_H: matrix is not in H_{r,2k}");
  return ModelBlocks{h.submatrix(0, 0, s.r, s.r), h.submatrix(0, s.r, s.r, s.two_k()),
                     h.submatrix(s.r, s.r, s.two_k(), s.two_k())};
}

inline Mat compose_H(const Shape& s, const Mat& u, const Mat& x, const Mat& sp) {
  const Field f = u.empty() ? sp.field() : u.field();
  Mat h = Mat::block_compose(f, {{u, x}, {Mat::zero(f, s.two_k(), s.r), sp}});
  if (!in_model_group(s, h)) throw std::invalid_argument("compose_H: blocks do not form an H element");
  return h;
}

}  // namespace kly
