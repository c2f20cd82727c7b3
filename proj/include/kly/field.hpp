#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace kly {

using i64 = std::int64_t;

/// Thrown when a guaranteed algebraic identity fails at runtime.
/// Surfacing these loudly is preferred to silently returning garbage.
struct TheoryViolation : std::logic_error {
  explicit TheoryViolation(const std::string& what) : std::logic_error("theory violation: " + what) {}
};

struct BudgetExceeded : std::runtime_error {
  explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

inline bool is_prime(i64 p) {
  if (p < 2) return false;
  for (i64 d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

/// Prime field F_p. Carries only the modulus; elements are canonical
/// residues in [0, p). Moduli are capped so products of residues never
/// overflow 64-bit arithmetic.
class Field {
 public:
  static constexpr i64 kMaxModulus = i64{1} << 31;

  explicit Field(i64 p) : p_(p) {
    if (p > kMaxModulus) throw std::invalid_argument("Field: modulus too large for exact 64-bit arithmetic");
    if (!is_prime(p)) throw std::invalid_argument("Field: modulus " + std::to_string(p) + " is not prime");
  }

  i64 p() const { return p_; }
  bool operator==(const Field& o) const { return p_ == o.p_; }
  bool operator!=(const Field& o) const { return p_ != o.p_; }

  i64 reduce(i64 x) const {
    i64 r = x % p_;
    return r < 0 ? r + p_ : r;
  }
  i64 add(i64 a, i64 b) const { return (a + b) % p_; }
  i64 sub(i64 a, i64 b) const { return reduce(a - b); }
  i64 mul(i64 a, i64 b) const { return (a * b) % p_; }
  i64 neg(i64 a) const { return a == 0 ? 0 : p_ - a; }
  i64 inv(i64 a) const {
    a = reduce(a);
    if (a == 0) throw std::domain_error("Field: inverse of zero");
    // extended Euclid; exact in every characteristic
    i64 t = 0, new_t = 1, r = p_, new_r = a;
    while (new_r != 0) {
      i64 q = r / new_r;
      i64 tmp = t - q * new_t;
      t = new_t;
      new_t = tmp;
      tmp = r - q * new_r;
      r = new_r;
      new_r = tmp;
    }
    if (r != 1) throw std::domain_error("Field: non-invertible element");
    return reduce(t);
  }
  i64 div(i64 a, i64 b) const { return mul(reduce(a), inv(b)); }
  i64 pow(i64 a, i64 e) const {
    a = reduce(a);
    i64 r = 1;
    while (e > 0) {
      if (e & 1) r = mul(r, a);
      a = mul(a, a);
      e >>= 1;
    }
    return r;
  }

 private:
  i64 p_;
};

/// Element of a prime field; value is always the canonical residue.
class FieldElement {
 public:
  FieldElement(const Field& f, i64 v) : f_(f), v_(f.reduce(v)) {}

  i64 value() const { return v_; }
  const Field& field() const { return f_; }

  FieldElement operator+(const FieldElement& o) const { return bin(o, f_.add(v_, o.v_)); }
  FieldElement operator-(const FieldElement& o) const { return bin(o, f_.sub(v_, o.v_)); }
  FieldElement operator*(const FieldElement& o) const { return bin(o, f_.mul(v_, o.v_)); }
  FieldElement operator-() const { return FieldElement(f_, f_.neg(v_)); }
  FieldElement inv() const { return FieldElement(f_, f_.inv(v_)); }
  bool operator==(const FieldElement& o) const { return f_ == o.f_ && v_ == o.v_; }
  bool operator!=(const FieldElement& o) const { return !(*this == o); }

 private:
  FieldElement bin(const FieldElement& o, i64 v) const {
    if (f_ != o.f_) throw std::invalid_argument("FieldElement: mixed fields");
    return FieldElement(f_, v);
  }
  Field f_;
  i64 v_;
};

/// Value of an additive character, kept symbolic: ψ(x) ~ (exponent x, sign +1).
/// The sign slot carries the {±1} extension used by the twisted character.
struct CharVal {
  i64 exponent = 0;  // residue mod p
  int sign = +1;     // +1 or -1

  bool trivial() const { return exponent == 0 && sign == +1; }
  bool nontrivial() const { return !trivial(); }
};

inline CharVal char_mul(const Field& f, const CharVal& a, const CharVal& b) {
  return CharVal{f.add(a.exponent, b.exponent), a.sign * b.sign};
}

inline CharVal char_inv(const Field& f, const CharVal& a) { return CharVal{f.neg(a.exponent), a.sign}; }

/// ψ(x): the fixed nontrivial additive character of F_p, encoded by exponent.
inline CharVal additive_character(const Field& f, i64 x) { return CharVal{f.reduce(x), +1}; }

inline CharVal additive_character(const FieldElement& x) { return additive_character(x.field(), x.value()); }

}  // namespace kly
