#pragma once

#include <initializer_list>
#include <optional>
#include <utility>
#include <vector>

#include "kly/field.hpp"

namespace kly {

/// Dense exact matrix over F_p. Size-0 blocks are first class: a 0x0 matrix
/// acts as the identity in block composition.
class Mat {
 public:
  Mat() : p_(2), rows_(0), cols_(0) {}
  Mat(const Field& f, int rows, int cols)
      : p_(f.p()), rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols, 0) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("Mat: negative dimension");
  }
  Mat(const Field& f, std::initializer_list<std::initializer_list<i64>> rows) : p_(f.p()) {
    rows_ = static_cast<int>(rows.size());
    cols_ = rows_ == 0 ? 0 : static_cast<int>(rows.begin()->size());
    a_.reserve(static_cast<size_t>(rows_) * cols_);
    for (const auto& r : rows) {
      if (static_cast<int>(r.size()) != cols_) throw std::invalid_argument("Mat: ragged rows");
      for (i64 v : r) a_.push_back(f.reduce(v));
    }
  }

  static Mat identity(const Field& f, int n) {
    Mat m(f, n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }
  static Mat zero(const Field& f, int r, int c) { return Mat(f, r, c); }

  Field field() const { return Field(p_); }
  i64 p() const { return p_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  i64& operator()(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
  i64 operator()(int i, int j) const { return a_[static_cast<size_t>(i) * cols_ + j]; }

  bool operator==(const Mat& o) const { return p_ == o.p_ && rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_; }
  bool operator!=(const Mat& o) const { return !(*this == o); }

  Mat operator*(const Mat& o) const {
    check_field(o);
    if (cols_ != o.rows_) throw std::invalid_argument("Mat: dimension mismatch in product");
    Mat r(field(), rows_, o.cols_);
    for (int i = 0; i < rows_; ++i)
      for (int k = 0; k < cols_; ++k) {
        i64 v = (*this)(i, k);
        if (v == 0) continue;
        for (int j = 0; j < o.cols_; ++j) r(i, j) = (r(i, j) + v * o(k, j)) % p_;
      }
    return r;
  }
  Mat operator+(const Mat& o) const {
    check_same_shape(o);
    Mat r = *this;
    for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = (r.a_[i] + o.a_[i]) % p_;
    return r;
  }
  Mat operator-(const Mat& o) const {
    check_same_shape(o);
    Mat r = *this;
    const Field f = field();
    for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = f.sub(r.a_[i], o.a_[i]);
    return r;
  }
  Mat operator-() const {
    Mat r = *this;
    const Field f = field();
    for (auto& v : r.a_) v = f.neg(v);
    return r;
  }
  Mat scaled(i64 c) const {
    Mat r = *this;
    c = field().reduce(c);
    for (auto& v : r.a_) v = (v * c) % p_;
    return r;
  }

  Mat transpose() const {
    Mat r(field(), cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
    return r;
  }

  Mat submatrix(int i0, int j0, int nr, int nc) const {
    if (i0 < 0 || j0 < 0 || nr < 0 || nc < 0 || i0 + nr > rows_ || j0 + nc > cols_)
      throw std::invalid_argument("Mat: submatrix out of range");
    Mat r(field(), nr, nc);
    for (int i = 0; i < nr; ++i)
      for (int j = 0; j < nc; ++j) r(i, j) = (*this)(i0 + i, j0 + j);
    return r;
  }

  void paste(int i0, int j0, const Mat& b) {
    for (int i = 0; i < b.rows(); ++i)
      for (int j = 0; j < b.cols(); ++j) (*this)(i0 + i, j0 + j) = b(i, j);
  }

  int rank() const {
    Mat m = *this;
    const Field f = field();
    int rk = 0;
    for (int col = 0; col < cols_ && rk < rows_; ++col) {
      int piv = -1;
      for (int i = rk; i < rows_; ++i)
        if (m(i, col) != 0) {
          piv = i;
          break;
        }
      if (piv < 0) continue;
      for (int j = 0; j < cols_; ++j) std::swap(m(rk, j), m(piv, j));
      i64 inv = f.inv(m(rk, col));
      for (int j = 0; j < cols_; ++j) m(rk, j) = (m(rk, j) * inv) % p_;
      for (int i = 0; i < rows_; ++i) {
        if (i == rk || m(i, col) == 0) continue;
        i64 c = m(i, col);
        for (int j = 0; j < cols_; ++j) m(i, j) = f.sub(m(i, j), (c * m(rk, j)) % p_);
      }
      ++rk;
    }
    return rk;
  }

  i64 det() const {
    if (!square()) throw std::invalid_argument("Mat: det of non-square matrix");
    Mat m = *this;
    const Field f = field();
    i64 d = 1;
    for (int col = 0; col < cols_; ++col) {
      int piv = -1;
      for (int i = col; i < rows_; ++i)
        if (m(i, col) != 0) {
          piv = i;
          break;
        }
      if (piv < 0) return 0;
      if (piv != col) {
        for (int j = 0; j < cols_; ++j) std::swap(m(col, j), m(piv, j));
        d = f.neg(d);
      }
      d = f.mul(d, m(col, col));
      i64 inv = f.inv(m(col, col));
      for (int i = col + 1; i < rows_; ++i) {
        if (m(i, col) == 0) continue;
        i64 c = f.mul(m(i, col), inv);
        for (int j = col; j < cols_; ++j) m(i, j) = f.sub(m(i, j), f.mul(c, m(col, j)));
      }
    }
    return d;
  }

  bool invertible() const { return square() && det() != 0; }

  Mat inverse() const {
    if (!square()) throw std::invalid_argument("Mat: inverse of non-square matrix");
    const Field f = field();
    Mat m = *this;
    Mat r = identity(f, rows_);
    for (int col = 0; col < cols_; ++col) {
      int piv = -1;
      for (int i = col; i < rows_; ++i)
        if (m(i, col) != 0) {
          piv = i;
          break;
        }
      if (piv < 0) throw std::domain_error("Mat: singular matrix has no inverse");
      if (piv != col)
        for (int j = 0; j < cols_; ++j) {
          std::swap(m(col, j), m(piv, j));
          std::swap(r(col, j), r(piv, j));
        }
      i64 inv = f.inv(m(col, col));
      for (int j = 0; j < cols_; ++j) {
        m(col, j) = f.mul(m(col, j), inv);
        r(col, j) = f.mul(r(col, j), inv);
      }
      for (int i = 0; i < rows_; ++i) {
        if (i == col || m(i, col) == 0) continue;
        i64 c = m(i, col);
        for (int j = 0; j < cols_; ++j) {
          m(i, j) = f.sub(m(i, j), f.mul(c, m(col, j)));
          r(i, j) = f.sub(r(i, j), f.mul(c, r(col, j)));
        }
      }
    }
    return r;
  }

  /// {}^t M^{-1}; the twist used throughout for the transpose-inverse involution.
  Mat tau() const { return inverse().transpose(); }

  /// Assemble from a grid of blocks. Blocks in one row must agree on height,
  /// in one column on width; size-0 blocks participate trivially.
  static Mat block_compose(const Field& f, const std::vector<std::vector<Mat>>& grid) {
    std::vector<int> rh, cw;
    for (const auto& row : grid) rh.push_back(row.empty() ? 0 : row[0].rows());
    if (!grid.empty())
      for (const auto& b : grid[0]) cw.push_back(b.cols());
    int R = 0, C = 0;
    for (int h : rh) R += h;
    for (int w : cw) C += w;
    Mat r(f, R, C);
    int i0 = 0;
    for (size_t bi = 0; bi < grid.size(); ++bi) {
      int j0 = 0;
      for (size_t bj = 0; bj < grid[bi].size(); ++bj) {
        const Mat& b = grid[bi][bj];
        if (b.rows() != rh[bi] || b.cols() != cw[bj]) throw std::invalid_argument("block_compose: inconsistent block sizes");
        r.paste(i0, j0, b);
        j0 += cw[bj];
      }
      i0 += rh[bi];
    }
    return r;
  }

  /// diag(a, b) as a block matrix.
  static Mat block_diag(const Mat& a, const Mat& b) {
    Field f = a.empty() ? b.field() : a.field();
    Mat z1(f, a.rows(), b.cols());
    Mat z2(f, b.rows(), a.cols());
    return block_compose(f, {{a, z1}, {z2, b}});
  }

 private:
  void check_field(const Mat& o) const {
    if (p_ != o.p_) throw std::invalid_argument("Mat: mixed fields");
  }
  void check_same_shape(const Mat& o) const {
    check_field(o);
    if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("Mat: shape mismatch");
  }

  i64 p_;
  int rows_, cols_;
  std::vector<i64> a_;
};

// ---- named constant matrices ----

/// w_k: antidiagonal identity, entry (i, n+1-i) = 1.
inline Mat antidiag_identity(const Field& f, int k) {
  Mat m(f, k, k);
  for (int i = 0; i < k; ++i) m(i, k - 1 - i) = 1;
  return m;
}

/// J_{2k} = ( 0 w_k ; -w_k 0 ): the standard invertible alternating form.
inline Mat standard_symplectic_form(const Field& f, int two_k) {
  if (two_k % 2 != 0) throw std::invalid_argument("standard_symplectic_form: odd size");
  int k = two_k / 2;
  Mat w = antidiag_identity(f, k);
  return Mat::block_compose(f, {{Mat::zero(f, k, k), w}, {-w, Mat::zero(f, k, k)}});
}

/// J'_{2k} = ( 0 I ; -I 0 ).
inline Mat split_symplectic_form(const Field& f, int two_k) {
  if (two_k % 2 != 0) throw std::invalid_argument("split_symplectic_form: odd size");
  int k = two_k / 2;
  Mat id = Mat::identity(f, k);
  return Mat::block_compose(f, {{Mat::zero(f, k, k), id}, {-id, Mat::zero(f, k, k)}});
}

/// sigma = diag(w_k, I_k): {}^t sigma J_{2k} sigma = J'_{2k}.
inline Mat sigma_conjugator(const Field& f, int two_k) {
  int k = two_k / 2;
  return Mat::block_diag(antidiag_identity(f, k), Mat::identity(f, k));
}

inline Mat elementary_E(const Field& f, int n, int i, int j) {
  Mat m(f, n, n);
  m(i - 1, j - 1) = 1;  // 1-indexed, matching the usual notation u_{i,j}
  return m;
}

/// u_{i,j}(s) = I_n + s E_{i,j} (1-indexed).
inline Mat elementary_unipotent(const Field& f, int n, int i, int j, i64 s) {
  Mat m = Mat::identity(f, n);
  m(i - 1, j - 1) = f.reduce(s);
  return m;
}

/// The closed-cell Weyl representative ( 0 I_r 0 ; I_r' 0 0 ; 0 0 I_{n-r-r'} ).
inline Mat closed_cell_weyl(const Field& f, int n, int r, int rp) {
  if (r + rp > n) throw std::invalid_argument("closed_cell_weyl: r + r' exceeds n");
  int d = n - r - rp;
  Mat m(f, n, n);
  for (int i = 0; i < r; ++i) m(i, rp + i) = 1;
  for (int i = 0; i < rp; ++i) m(r + i, i) = 1;
  for (int i = 0; i < d; ++i) m(r + rp + i, r + rp + i) = 1;
  return m;
}

/// Corner rotation ( 0 I_{e} ; w_l 0 ) of size e + l; orthogonal involution-free
/// change of frame used around the closed cell.
inline Mat corner_rotation(const Field& f, int e, int l) {
  Mat m(f, e + l, e + l);
  for (int i = 0; i < e; ++i) m(i, l + i) = 1;
  Mat w = antidiag_identity(f, l);
  m.paste(e, 0, w);
  return m;
}

inline bool is_alternating(const Mat& m) {
  if (!m.square()) return false;
  const Field f = m.field();
  for (int i = 0; i < m.rows(); ++i) {
    if (m(i, i) != 0) return false;
    for (int j = i + 1; j < m.cols(); ++j)
      if (m(i, j) != f.neg(m(j, i))) return false;
  }
  return true;
}

/// True iff the form vanishes identically on <e_1,...,e_l>, i.e. the top-left
/// l x l block is zero.
inline bool totally_isotropic(const Mat& form, int l) {
  if (l < 0 || l > form.rows()) throw std::invalid_argument("totally_isotropic: bad span size");
  for (int i = 0; i < l; ++i)
    for (int j = 0; j < l; ++j)
      if (form(i, j) != 0) return false;
  return true;
}

/// Strictly upper triangular part; for alternating d, d = su(d) - {}^t su(d).
inline Mat strict_upper(const Mat& m) {
  Mat r(m.field(), m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = i + 1; j < m.cols(); ++j) r(i, j) = m(i, j);
  return r;
}

/// x~ = w_l x^tau w_l for x in GL_l.
inline Mat tilde_twist(const Mat& x) {
  Mat w = antidiag_identity(x.field(), x.rows());
  return w * x.tau() * w;
}

}  // namespace kly
