#pragma once

// Exact root location relative to the unit circle.
//
// Nothing here computes roots numerically.  Strict Schur stability is
// decided by the Schur-Cohn recursion, rational roots by Sturm isolation and
// exact confirmation, and self-reciprocal factors through x = z + 1/z and
// Sturm counting.

#include <algorithm>
#include <vector>

#include "perdec/poly.hpp"

namespace perdec {

// True iff every root of p lies in |z| < 1.  Nonzero constants qualify.
inline bool schur_stable(Poly p) {
  if (p.is_zero()) throw Error(ErrorKind::InvalidSystem, "stability test of zero polynomial");
  while (p.deg() >= 1) {
    Q a0 = p.coeff(0), an = p.lead();
    if (abs(a0) >= abs(an)) return false;
    Poly t = Poly(an) * p - Poly(a0) * p.reversed();
    // The constant term cancels exactly; divide by z.
    p = t.unshift(1);
  }
  return true;
}

// Yun's square-free decomposition of a monic polynomial: p = prod f[i]^(i+1).
inline std::vector<Poly> square_free_decomposition(const Poly& p) {
  std::vector<Poly> out;
  if (p.is_zero() || p.deg() == 0) return out;
  Poly dp = p.derivative();
  Poly a = gcd(p, dp);
  Poly b = p / a;
  Poly c = dp / a;
  Poly d = c - b.derivative();
  while (b.deg() > 0) {
    Poly g = gcd(b, d);
    out.push_back(g);
    b = b / g;
    c = d / g;
    d = c - b.derivative();
  }
  return out;
}

namespace detail {

inline std::vector<mpz_class> divisors(mpz_class n) {
  if (n < 0) n = -n;
  std::vector<mpz_class> small, large;
  for (mpz_class d = 1; d * d <= n; ++d) {
    if (n % d == 0) {
      small.push_back(d);
      if (d * d != n) large.push_back(n / d);
    }
  }
  small.insert(small.end(), large.rbegin(), large.rend());
  return small;
}

// Integer coefficients with the same roots.
inline std::vector<mpz_class> integer_coeffs(const Poly& p) {
  mpz_class l = 1;
  for (const auto& c : p.coeffs()) l = lcm(l, mpz_class(c.get_den()));
  std::vector<mpz_class> out;
  for (const auto& c : p.coeffs()) out.push_back(mpz_class(c * l));
  return out;
}

inline int sign_changes(const std::vector<Poly>& seq, const Q& x) {
  int changes = 0, last = 0;
  for (const auto& s : seq) {
    Q v = s.eval(x);
    int sg = v > 0 ? 1 : (v < 0 ? -1 : 0);
    if (sg == 0) continue;
    if (last != 0 && sg != last) ++changes;
    last = sg;
  }
  return changes;
}

}  // namespace detail

// Number of distinct real roots of h in (a, b], using a Sturm sequence.
inline int sturm_count(const Poly& h, const Q& a, const Q& b) {
  std::vector<Poly> seq{h, h.derivative()};
  while (!seq.back().is_zero()) {
    Poly r = -(seq[seq.size() - 2] % seq.back());
    if (r.is_zero()) break;
    seq.push_back(r);
  }
  return detail::sign_changes(seq, a) - detail::sign_changes(seq, b);
}

namespace detail {

// Simplest fraction (smallest denominator) in the closed interval [lo, hi].
inline Q simplest_between(const Q& lo, const Q& hi) {
  if (hi < 0) return -simplest_between(-hi, -lo);
  if (lo <= 0) return Q(0);
  mpz_class fl;
  mpz_fdiv_q(fl.get_mpz_t(), lo.get_num_mpz_t(), lo.get_den_mpz_t());
  if (Q(fl) == lo) return lo;
  if (Q(fl + 1) <= hi) return Q(fl + 1);
  Q rest = simplest_between(1 / (hi - Q(fl)), 1 / (lo - Q(fl)));
  Q out = Q(fl) + 1 / rest;
  out.canonicalize();
  return out;
}

}  // namespace detail

// Distinct rational roots of a nonzero polynomial.  Real roots are isolated
// by Sturm bisection until an interval can hold at most one fraction whose
// denominator divides the leading coefficient; that fraction is the simplest
// one in the interval and is confirmed by exact evaluation.  No integer
// factorization is involved, so large coefficients stay cheap.
inline std::vector<Q> rational_roots(const Poly& p) {
  std::vector<Q> roots;
  if (p.is_zero() || p.deg() == 0) return roots;
  Poly r = p;
  if (r.low_order() > 0) {
    roots.push_back(Q(0));
    r = r.unshift(r.low_order());
  }
  if (r.deg() == 0) return roots;
  Poly g = gcd(r, r.derivative());
  if (g.deg() > 0) r = r / g;
  auto ic = detail::integer_coeffs(r);
  mpz_class L = abs(ic.back());
  Q width = Q(1) / (2 * Q(L) * Q(L));
  Q bound = 1;
  for (int i = 0; i < r.deg(); ++i) bound = std::max(bound, Q(abs(r.coeff(i) / r.lead()) + 1));

  std::vector<Q> found;
  std::vector<std::pair<Q, Q>> work{{-bound, bound}};
  while (!work.empty()) {
    auto [lo, hi] = work.back();
    work.pop_back();
    int count = sturm_count(r, lo, hi);
    if (count == 0) continue;
    if (count == 1 && hi - lo < width && (lo >= 0 || hi <= 0)) {
      Q cand = detail::simplest_between(lo, hi);
      if (mpz_class(L % cand.get_den()) == 0 && r.eval(cand) == 0) found.push_back(cand);
      continue;
    }
    Q mid = (lo + hi) / 2;
    work.push_back({lo, mid});
    work.push_back({mid, hi});
  }
  std::sort(found.begin(), found.end());
  found.erase(std::unique(found.begin(), found.end()), found.end());
  roots.insert(roots.end(), found.begin(), found.end());
  return roots;
}

struct StabilitySplit {
  Q lead;         // leading coefficient
  Poly stable;    // monic, roots in |z| < 1 (z itself included)
  Poly unstable;  // monic, roots in |z| >= 1
};

namespace detail {

// Searches for a monic quadratic factor with rational coefficients.  By
// Gauss's lemma it suffices to scan integer factors y^2 + b y + c of the
// monic integer polynomial q(y) = a^(n-1) p(y/a).  Gives up when the search
// space is too large.
inline std::optional<Poly> find_quadratic_factor(const Poly& p) {
  int n = p.deg();
  if (n < 4) return std::nullopt;
  auto ic = integer_coeffs(p);
  mpz_class a = ic.back();
  std::vector<Q> qc(n + 1);
  mpz_class apow = 1;
  for (int i = n; i >= 0; --i) {  // coefficient i gets a^(n-1-i)
    if (i == n) { qc[i] = 1; continue; }
    qc[i] = Q(ic[i] * apow);
    apow *= a;
  }
  Poly q(qc);
  mpz_class bound = 1;
  for (int i = 0; i < n; ++i) {
    mpz_class v = abs(mpz_class(qc[i]));
    if (v + 1 > bound) bound = v + 1;
  }
  if (bound > 4000) return std::nullopt;
  auto divs = divisors(abs(mpz_class(qc[0])));
  if (divs.size() * 4 * bound > 4000000) return std::nullopt;
  long bl = bound.get_si();
  for (const auto& d : divs) {
    if (d > bound * bound) break;
    for (int s : {1, -1}) {
      Q c(d * s);
      for (long b = -2 * bl; b <= 2 * bl; ++b) {
        Poly cand(std::vector<Q>{c, Q(b), Q(1)});
        if ((q % cand).is_zero()) {
          Q aq(a);
          return Poly(std::vector<Q>{c / (aq * aq), Q(b) / aq, Q(1)});
        }
      }
    }
  }
  return std::nullopt;
}

// r is square-free, monic, has no rational roots.  Appends factors.
inline void classify_factor(const Poly& r, Poly& stable, Poly& unstable, int depth = 0) {
  if (r.deg() == 0) return;
  if (schur_stable(r)) {
    stable *= r;
    return;
  }
  if (schur_stable(r.reversed())) {
    unstable *= r;
    return;
  }
  Poly g = gcd(r, r.reversed());
  if (g.deg() > 0 && g.deg() < r.deg() && depth < 64) {
    classify_factor(g, stable, unstable, depth + 1);
    classify_factor(r / g, stable, unstable, depth + 1);
    return;
  }
  if (g.deg() == r.deg() && r.deg() % 2 == 0 && r.reversed().monic() == r) {
    // Palindromic of degree 2k: r(z) = z^k h(z + 1/z).
    int k = r.deg() / 2;
    std::vector<Poly> cheb{Poly(2), Poly::z()};
    for (int j = 2; j <= k; ++j) cheb.push_back(Poly::z() * cheb[j - 1] - cheb[j - 2]);
    Poly h(r.coeff(k));
    for (int j = 1; j <= k; ++j) h += Poly(r.coeff(k + j)) * cheb[j];
    if (sturm_count(h, Q(-2), Q(2)) == h.deg()) {
      unstable *= r;  // every root on the unit circle
      return;
    }
  }
  if (auto quad = find_quadratic_factor(r); quad && quad->deg() < r.deg() && depth < 64) {
    classify_factor(*quad, stable, unstable, depth + 1);
    classify_factor(r / *quad, stable, unstable, depth + 1);
    return;
  }
  throw Error(ErrorKind::UnsupportedFactor,
              "cannot separate roots of " + r.to_string() + " relative to the unit circle");
}

}  // namespace detail

// p = lead * stable * unstable.
inline StabilitySplit split_stability(const Poly& p) {
  if (p.is_zero()) throw Error(ErrorKind::InvalidSystem, "stability split of zero polynomial");
  StabilitySplit out{p.lead(), Poly(1), Poly(1)};
  Poly m = p.monic();
  int k = m.low_order();
  out.stable = Poly::z(k);
  m = m.unshift(k);
  auto parts = square_free_decomposition(m);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    int mult = static_cast<int>(i) + 1;
    Poly f = parts[i];
    Poly st(1), un(1);
    for (const Q& root : rational_roots(f)) {
      Poly lin = Poly(std::vector<Q>{-root, Q(1)});
      f = f / lin;
      (abs(root) < 1 ? st : un) *= lin;
    }
    detail::classify_factor(f.monic(), st, un);
    out.stable *= pow(st, mult);
    out.unstable *= pow(un, mult);
  }
  return out;
}

}  // namespace perdec
