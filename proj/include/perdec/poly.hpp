#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "perdec/rational.hpp"

namespace perdec {

// Dense univariate polynomial over Q, coefficients stored in ascending powers.
// The zero polynomial has no coefficients and degree() == nullopt (-infinity).
class Poly {
 public:
  Poly() = default;
  Poly(const Q& c) { if (c != 0) c_.push_back(c); }  // NOLINT: implicit constant
  Poly(int c) : Poly(Q(c)) {}                          // NOLINT
  explicit Poly(std::vector<Q> coeffs) : c_(std::move(coeffs)) { trim(); }

  static Poly monomial(const Q& c, int k) {
    std::vector<Q> v(k + 1, Q(0));
    v[k] = c;
    return Poly(std::move(v));
  }
  static Poly z(int k = 1) { return monomial(1, k); }

  bool is_zero() const { return c_.empty(); }
  std::optional<int> degree() const {
    if (c_.empty()) return std::nullopt;
    return static_cast<int>(c_.size()) - 1;
  }
  // Degree of a nonzero polynomial.
  int deg() const {
    if (c_.empty()) throw Error(ErrorKind::InvalidSystem, "degree of zero polynomial");
    return static_cast<int>(c_.size()) - 1;
  }
  Q coeff(int i) const { return (i >= 0 && i < static_cast<int>(c_.size())) ? c_[i] : Q(0); }
  const std::vector<Q>& coeffs() const { return c_; }
  Q lead() const { return c_.empty() ? Q(0) : c_.back(); }

  // Multiplicity of the root at zero.
  int low_order() const {
    int k = 0;
    while (k < static_cast<int>(c_.size()) && c_[k] == 0) ++k;
    return k;
  }

  Q eval(const Q& x) const {
    Q r = 0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = r * x + *it;
    return r;
  }

  Poly monic() const {
    if (c_.empty()) return *this;
    Poly r = *this;
    Q l = lead();
    for (auto& x : r.c_) x /= l;
    return r;
  }

  // z^deg p(1/z)
  Poly reversed() const {
    std::vector<Q> v(c_.rbegin(), c_.rend());
    return Poly(std::move(v));
  }

  Poly derivative() const {
    std::vector<Q> v;
    for (std::size_t i = 1; i < c_.size(); ++i) v.push_back(c_[i] * static_cast<long>(i));
    return Poly(std::move(v));
  }

  Poly shift(int k) const {  // multiply by z^k, k >= 0
    if (c_.empty()) return *this;
    std::vector<Q> v(k, Q(0));
    v.insert(v.end(), c_.begin(), c_.end());
    return Poly(std::move(v));
  }

  // Divide by z^k; the low coefficients must vanish.
  Poly unshift(int k) const {
    if (c_.empty()) return *this;
    return Poly(std::vector<Q>(c_.begin() + k, c_.end()));
  }

  // p(z^k)
  Poly inflate(int k) const {
    if (c_.empty() || k == 1) return *this;
    std::vector<Q> v((c_.size() - 1) * k + 1, Q(0));
    for (std::size_t i = 0; i < c_.size(); ++i) v[i * k] = c_[i];
    return Poly(std::move(v));
  }

  friend Poly operator+(const Poly& a, const Poly& b) {
    std::vector<Q> v(std::max(a.c_.size(), b.c_.size()), Q(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i) v[i] += a.c_[i];
    for (std::size_t i = 0; i < b.c_.size(); ++i) v[i] += b.c_[i];
    return Poly(std::move(v));
  }
  friend Poly operator-(const Poly& a) {
    Poly r = a;
    for (auto& x : r.c_) x = -x;
    return r;
  }
  friend Poly operator-(const Poly& a, const Poly& b) { return a + (-b); }
  friend Poly operator*(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return Poly();
    std::vector<Q> v(a.c_.size() + b.c_.size() - 1, Q(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) v[i + j] += a.c_[i] * b.c_[j];
    return Poly(std::move(v));
  }
  friend bool operator==(const Poly& a, const Poly& b) { return a.c_ == b.c_; }
  friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

  Poly& operator+=(const Poly& o) { return *this = *this + o; }
  Poly& operator-=(const Poly& o) { return *this = *this - o; }
  Poly& operator*=(const Poly& o) { return *this = *this * o; }

  // Euclidean division a = q*b + r with deg r < deg b.
  friend std::pair<Poly, Poly> divmod(const Poly& a, const Poly& b) {
    if (b.is_zero()) throw Error(ErrorKind::DivisionByZero, "polynomial division by zero");
    if (a.is_zero() || a.deg() < b.deg()) return {Poly(), a};
    std::vector<Q> r = a.c_;
    int db = b.deg();
    std::vector<Q> q(a.deg() - db + 1, Q(0));
    Q lb = b.lead();
    for (int i = a.deg(); i >= db; --i) {
      if (r[i] == 0) continue;
      Q f = r[i] / lb;
      q[i - db] = f;
      for (int j = 0; j <= db; ++j) r[i - db + j] -= f * b.c_[j];
    }
    r.resize(db);
    return {Poly(std::move(q)), Poly(std::move(r))};
  }
  friend Poly operator/(const Poly& a, const Poly& b) { return divmod(a, b).first; }
  friend Poly operator%(const Poly& a, const Poly& b) { return divmod(a, b).second; }

  std::string to_string(const char* var = "z") const {
    if (c_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (int i = deg(); i >= 0; --i) {
      const Q& c = c_[i];
      if (c == 0) continue;
      Q a = perdec::abs(c);
      if (first) {
        if (c < 0) os << "-";
      } else {
        os << (c < 0 ? " - " : " + ");
      }
      first = false;
      if (i == 0 || a != 1) os << a.get_str();
      if (i > 0) {
        os << var;
        if (i > 1) os << "^" << i;
      }
    }
    return os.str();
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }
  std::vector<Q> c_;
};

// Monic gcd; gcd(0, 0) == 0.
inline Poly gcd(Poly a, Poly b) {
  while (!b.is_zero()) {
    Poly r = a % b;
    a = std::move(b);
    b = std::move(r);
  }
  return a.monic();
}

inline Poly lcm(const Poly& a, const Poly& b) {
  if (a.is_zero() || b.is_zero()) return Poly();
  return ((a * b) / gcd(a, b)).monic();
}

inline Poly pow(const Poly& p, int k) {
  Poly r(1);
  for (int i = 0; i < k; ++i) r *= p;
  return r;
}

}  // namespace perdec
