#pragma once

// The Euclidean domain S of proper rational functions with all poles in
// the open unit disk.  Elements are plain RatFun values; the functions
// below check membership where it matters.

#include <utility>

#include "perdec/matrix.hpp"
#include "perdec/roots.hpp"

namespace perdec {

inline bool is_member_S(const RatFun& f) {
  if (!f.is_proper()) return false;
  return schur_stable(f.den());
}

inline void require_S(const RatFun& f, const char* what) {
  if (!is_member_S(f)) throw Error(ErrorKind::NotMember, std::string(what) + " = " + f.to_string() + " is not in S");
}

// Monic factor of the numerator with all zeros in |z| >= 1.
inline Poly unstable_part(const Poly& p) { return split_stability(p).unstable; }

inline int s_order(const RatFun& r) {
  if (r.is_zero()) throw Error(ErrorKind::ZeroElement, "order of zero");
  return r.relative_degree() + unstable_part(r.num()).deg();
}

inline bool s_is_unit(const RatFun& r) { return !r.is_zero() && is_member_S(r) && s_order(r) == 0; }

struct NormalForm {
  RatFun n;  // e / z^k
  RatFun u;  // unit
};

inline NormalForm s_normal_form(const RatFun& r) {
  if (r.is_zero()) throw Error(ErrorKind::ZeroElement, "normal form of zero");
  Poly e = unstable_part(r.num());
  int k = r.relative_degree() + e.deg();
  RatFun n(e, Poly::z(k));
  return {n, r / n};
}

struct DivResult {
  RatFun q;
  RatFun r;
};

// x = q*y + r with r a residue of the form sum_{i<k} rho_i z^-i, k = ord y.
inline DivResult s_divide(const RatFun& x, const RatFun& y) {
  if (y.is_zero()) throw Error(ErrorKind::DivisionByZero, "s_divide by zero");
  if (x.is_zero()) return {RatFun(), RatFun()};
  Poly e = unstable_part(y.num());
  int k = y.relative_degree() + e.deg();
  if (k == 0) return {x / y, RatFun()};
  int de = e.deg();
  const Poly& a = x.num();
  const Poly& b = x.den();
  std::vector<Q> rho(k, Q(0));
  auto h = x.series(k);
  for (int i = 0; i < k - de; ++i) rho[i] = h[i];
  if (de > 0) {
    // e | a z^(k-1) - c b with c = sum rho_i z^(k-1-i).
    Poly rhs = a.shift(k - 1);
    for (int i = 0; i < k - de; ++i) rhs -= Poly::monomial(rho[i], k - 1 - i) * b;
    rhs = rhs % e;
    QMatrix m(de, de), v(de, 1);
    for (int j = 0; j < de; ++j) {
      int i = k - de + j;
      Poly col = (Poly::z(k - 1 - i) * b) % e;
      for (int t = 0; t < de; ++t) m(t, j) = col.coeff(t);
    }
    for (int t = 0; t < de; ++t) v(t, 0) = rhs.coeff(t);
    auto sol = solve(m, v);
    if (!sol) throw Error(ErrorKind::NotMember, "no residue found; operands outside S?");
    for (int j = 0; j < de; ++j) rho[k - de + j] = (*sol)(j, 0);
  }
  std::vector<Q> c(k, Q(0));
  for (int i = 0; i < k; ++i) c[k - 1 - i] = rho[i];
  RatFun r(Poly(std::move(c)), Poly::z(k - 1));
  RatFun q = (x - r) / y;
  return {q, r};
}

inline RatFun s_gcd(RatFun x, RatFun y) {
  if (x.is_zero() && y.is_zero()) throw Error(ErrorKind::ZeroElement, "gcd of two zeros");
  while (!y.is_zero()) {
    RatFun r = s_divide(x, y).r;
    x = std::move(y);
    y = std::move(r);
  }
  return s_normal_form(x).n;
}

}  // namespace perdec
