#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "perdec/poly.hpp"

namespace perdec {

// Rational function in z over Q, kept reduced with a monic denominator.
class RatFun {
 public:
  RatFun() : num_(), den_(1) {}
  RatFun(const Q& c) : num_(c), den_(1) {}  // NOLINT: implicit constant
  RatFun(int c) : RatFun(Q(c)) {}           // NOLINT
  RatFun(const Poly& p) : num_(p), den_(1) {}  // NOLINT
  RatFun(Poly num, Poly den) : num_(std::move(num)), den_(std::move(den)) { normalize(); }

  // z^(-k) for k >= 0, z^|k| for k < 0.
  static RatFun zinv(int k) {
    if (k >= 0) return RatFun(Poly(1), Poly::z(k));
    return RatFun(Poly::z(-k));
  }

  const Poly& num() const { return num_; }
  const Poly& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_constant() const { return den_.deg() == 0 && (num_.is_zero() || num_.deg() == 0); }

  // deg den - deg num; undefined for zero.
  int relative_degree() const { return den_.deg() - num_.deg(); }
  bool is_proper() const { return is_zero() || relative_degree() >= 0; }
  bool is_strictly_proper() const { return is_zero() || relative_degree() > 0; }

  Q value_at_infinity() const {
    if (is_zero() || relative_degree() > 0) return Q(0);
    if (relative_degree() < 0) throw Error(ErrorKind::NotMember, "value at infinity of improper function");
    return num_.lead() / den_.lead();
  }

  // Coefficients h_0..h_{count-1} of the expansion in z^-1 of a proper function.
  std::vector<Q> series(int count) const {
    std::vector<Q> h(count, Q(0));
    if (is_zero()) return h;
    if (!is_proper()) throw Error(ErrorKind::NotMember, "series of improper function");
    // num = den * sum h_i z^-i; match from the top power down.
    int dd = den_.deg();
    for (int i = 0; i < count; ++i) {
      Q acc = num_.coeff(dd - i);
      for (int j = 1; j <= std::min(i, dd); ++j) acc -= den_.coeff(dd - j) * h[i - j];
      h[i] = acc;  // den is monic
    }
    return h;
  }

  Q eval(const Q& x) const {
    Q d = den_.eval(x);
    if (d == 0) throw Error(ErrorKind::DivisionByZero, "evaluation at a pole");
    return num_.eval(x) / d;
  }

  // f(z^k)
  RatFun inflate(int k) const { return RatFun(num_.inflate(k), den_.inflate(k)); }

  friend RatFun operator+(const RatFun& a, const RatFun& b) {
    if (a.den_ == b.den_) return RatFun(a.num_ + b.num_, a.den_);
    return RatFun(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }
  friend RatFun operator-(const RatFun& a) {
    RatFun r = a;
    r.num_ = -r.num_;
    return r;
  }
  friend RatFun operator-(const RatFun& a, const RatFun& b) { return a + (-b); }
  friend RatFun operator*(const RatFun& a, const RatFun& b) {
    if (a.is_zero() || b.is_zero()) return RatFun();
    return RatFun(a.num_ * b.num_, a.den_ * b.den_);
  }
  friend RatFun operator/(const RatFun& a, const RatFun& b) {
    if (b.is_zero()) throw Error(ErrorKind::DivisionByZero, "rational function division by zero");
    return RatFun(a.num_ * b.den_, a.den_ * b.num_);
  }
  friend bool operator==(const RatFun& a, const RatFun& b) { return a.num_ == b.num_ && a.den_ == b.den_; }
  friend bool operator!=(const RatFun& a, const RatFun& b) { return !(a == b); }
  RatFun& operator+=(const RatFun& o) { return *this = *this + o; }
  RatFun& operator-=(const RatFun& o) { return *this = *this - o; }
  RatFun& operator*=(const RatFun& o) { return *this = *this * o; }

  // Rendered in powers of z^-1 when the denominator is a power of z,
  // otherwise as a quotient of polynomials in z.
  std::string to_string() const {
    if (is_zero()) return "0";
    int k = den_.deg();
    if (den_ == Poly::z(k) && num_.deg() <= k) {
      std::ostringstream os;
      bool first = true;
      for (int i = num_.deg(); i >= 0; --i) {
        const Q& c = num_.coeff(i);
        if (c == 0) continue;
        int e = k - i;
        Q a = perdec::abs(c);
        if (first) {
          if (c < 0) os << "-";
        } else {
          os << (c < 0 ? " - " : " + ");
        }
        first = false;
        if (e == 0 || a != 1) os << a.get_str();
        if (e > 0) os << "z^-" << e;
      }
      return os.str();
    }
    if (den_.deg() == 0) return num_.to_string();
    std::string n = num_.to_string(), d = den_.to_string();
    bool nb = num_.coeffs().size() > 1 && n.find_first_of("+-", 1) != std::string::npos;
    return (nb ? "(" + n + ")" : n) + "/(" + d + ")";
  }

 private:
  void normalize() {
    if (den_.is_zero()) throw Error(ErrorKind::DivisionByZero, "zero denominator");
    if (num_.is_zero()) {
      den_ = Poly(1);
      return;
    }
    Poly g = gcd(num_, den_);
    if (g.deg() > 0) {
      num_ = num_ / g;
      den_ = den_ / g;
    }
    Q l = den_.lead();
    if (l != 1) {
      num_ = num_ * Poly(Q(1) / l);
      den_ = den_.monic();
    }
  }
  Poly num_;
  Poly den_;
};

}  // namespace perdec
