#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "perdec/matrix.hpp"
#include "perdec/roots.hpp"

namespace perdec {

inline int mod(long t, int T) {
  long r = t % T;
  return static_cast<int>(r < 0 ? r + T : r);
}

// x(t+1) = A(t)x(t) + B(t)u(t), y(t) = C(t)x(t) + D(t)u(t), period T.
struct PeriodicSystem {
  int T = 1;
  std::vector<int> dims;  // n(t), t = 0..T-1
  int m = 0;
  int p = 0;
  std::vector<QMatrix> A, B, C, D;

  int n(long t) const { return dims[mod(t, T)]; }
  const QMatrix& a(long t) const { return A[mod(t, T)]; }
  const QMatrix& b(long t) const { return B[mod(t, T)]; }
  const QMatrix& c(long t) const { return C[mod(t, T)]; }
  const QMatrix& d(long t) const { return D[mod(t, T)]; }
  int total_states() const {
    int s = 0;
    for (int x : dims) s += x;
    return s;
  }

  void validate() const {
    auto fail = [](const std::string& w) { throw Error(ErrorKind::InvalidSystem, w); };
    if (T < 1) fail("period must be positive");
    if (static_cast<int>(dims.size()) != T) fail("dims must have T entries");
    if (m < 1 || p < 1) fail("m and p must be positive");
    for (int x : dims)
      if (x < 0) fail("negative state dimension");
    if (static_cast<int>(A.size()) != T || static_cast<int>(B.size()) != T || static_cast<int>(C.size()) != T ||
        static_cast<int>(D.size()) != T)
      fail("A, B, C, D must each have T matrices");
    for (int t = 0; t < T; ++t) {
      auto shape = [&](const QMatrix& M, int r, int c, const char* nm) {
        if (M.rows() != r || M.cols() != c)
          fail(std::string(nm) + "[" + std::to_string(t) + "] must be " + std::to_string(r) + "x" +
               std::to_string(c) + ", got " + std::to_string(M.rows()) + "x" + std::to_string(M.cols()));
      };
      shape(A[t], n(t + 1), n(t), "A");
      shape(B[t], n(t + 1), m, "B");
      shape(C[t], p, n(t), "C");
      shape(D[t], p, m, "D");
    }
  }
};

// u(t) = F(t)x(t) + G(t)v(t)
struct FeedbackLaw {
  std::vector<QMatrix> F;
  std::vector<QMatrix> G;

  bool is_regular() const {
    for (const auto& g : G)
      if (g.rows() != g.cols() || rank(g) != g.rows()) return false;
    return true;
  }
};

// Phi(t, tau) = A(t-1)...A(tau)
inline QMatrix transition(const PeriodicSystem& s, long t, long tau) {
  if (t < tau) throw Error(ErrorKind::InvalidSystem, "transition requires t >= tau");
  QMatrix r = QMatrix::identity(s.n(tau));
  for (long k = tau; k < t; ++k) r = s.a(k) * r;
  return r;
}

struct Monodromy {
  QMatrix psi;
  int core_spectrum_size;
};

inline Monodromy monodromy(const PeriodicSystem& s, long tau) {
  return {transition(s, tau + s.T, tau), *std::min_element(s.dims.begin(), s.dims.end())};
}

inline bool is_stable(const PeriodicSystem& s) {
  QMatrix psi = monodromy(s, 0).psi;
  if (psi.rows() == 0) return true;
  return schur_stable(charpoly(psi));
}

inline bool is_nilpotent(const QMatrix& m) {
  return m.rows() == 0 || power(m, m.rows()).is_zero();
}

// Characteristic polynomial of the monodromy with the root at zero removed;
// its roots are the nonzero eigenvalues with multiplicity.
inline Poly nonzero_spectrum(const PeriodicSystem& s, long tau) {
  QMatrix psi = monodromy(s, tau).psi;
  Poly c = charpoly(psi);
  return c.unshift(c.low_order());
}

// markov[i][t] = M_i(t)
using MarkovSequence = std::vector<std::vector<QMatrix>>;

inline MarkovSequence markov(const PeriodicSystem& s, int horizon) {
  MarkovSequence out(horizon + 1, std::vector<QMatrix>(s.T));
  for (int t = 0; t < s.T; ++t) {
    out[0][t] = s.d(t);
    // Phi(t, t-i+1) built incrementally: Phi(t, t) = I, Phi(t, t-i) = Phi(t, t-i+1) A(t-i).
    QMatrix phi = QMatrix::identity(s.n(t));
    for (int i = 1; i <= horizon; ++i) {
      out[i][t] = s.c(t) * phi * s.b(t - i);
      phi = phi * s.a(t - i);
    }
  }
  return out;
}

inline bool output_reachable(const PeriodicSystem& s) {
  for (int t = 0; t < s.T; ++t) {
    int nt = s.n(t);
    QMatrix R(nt, 0);
    for (int k = 1; k <= s.T; ++k) R = hstack(R, transition(s, t, t - k + 1) * s.b(t - k));
    QMatrix psi = monodromy(s, t).psi;
    QMatrix Rn(nt, 0), cur = R;
    for (int k = 0; k < nt; ++k) {
      Rn = hstack(Rn, cur);
      cur = psi * cur;
    }
    QMatrix M = hstack(s.d(t), nt > 0 ? s.c(t) * Rn : QMatrix(s.p, 0));
    if (rank(M) != s.p) return false;
  }
  return true;
}

inline PeriodicSystem apply_feedback(const PeriodicSystem& s, const FeedbackLaw& law) {
  if (static_cast<int>(law.F.size()) != s.T || static_cast<int>(law.G.size()) != s.T)
    throw Error(ErrorKind::InvalidSystem, "feedback law must have T gains");
  PeriodicSystem c = s;
  int q = law.G[0].cols();
  c.m = q;
  for (int t = 0; t < s.T; ++t) {
    const QMatrix &F = law.F[t], &G = law.G[t];
    if (F.rows() != s.m || F.cols() != s.n(t) || G.rows() != s.m || G.cols() != q)
      throw Error(ErrorKind::InvalidSystem, "feedback gain shape mismatch at t = " + std::to_string(t));
    c.A[t] = s.A[t] + s.B[t] * F;
    c.B[t] = s.B[t] * G;
    c.C[t] = s.C[t] + s.D[t] * F;
    c.D[t] = s.D[t] * G;
  }
  return c;
}

// Applying `inner` to the system obtained from `outer`: u = F_o x + G_o (F_i x + G_i v).
inline FeedbackLaw compose(const FeedbackLaw& outer, const FeedbackLaw& inner) {
  FeedbackLaw r;
  for (std::size_t t = 0; t < outer.F.size(); ++t) {
    r.F.push_back(outer.F[t] + outer.G[t] * inner.F[t]);
    r.G.push_back(outer.G[t] * inner.G[t]);
  }
  return r;
}

struct Trajectory {
  std::vector<QMatrix> x;  // x(t0) .. x(t0+steps)
  std::vector<QMatrix> y;  // y(t0) .. y(t0+steps-1)
};

inline Trajectory simulate(const PeriodicSystem& s, const QMatrix& x0, const std::vector<QMatrix>& u, long t0,
                           int steps) {
  if (x0.rows() != s.n(t0) || x0.cols() != 1) throw Error(ErrorKind::InvalidSystem, "x0 dimension mismatch");
  if (static_cast<int>(u.size()) < steps) throw Error(ErrorKind::InvalidSystem, "input sequence too short");
  Trajectory tr;
  tr.x.push_back(x0);
  for (int k = 0; k < steps; ++k) {
    long t = t0 + k;
    if (u[k].rows() != s.m || u[k].cols() != 1) throw Error(ErrorKind::InvalidSystem, "input dimension mismatch");
    tr.y.push_back(s.c(t) * tr.x.back() + s.d(t) * u[k]);
    tr.x.push_back(s.a(t) * tr.x.back() + s.b(t) * u[k]);
  }
  return tr;
}

struct Offending {
  int i, t, row, col;
};

struct DecouplingReport {
  bool diagonal = true;
  std::optional<Offending> offending;
  bool stable = false;
  bool output_reachable = false;
  int horizon = 0;
};

inline int default_horizon(const PeriodicSystem& s) { return 2 * s.total_states() + s.T; }

inline DecouplingReport verify_decoupled(const PeriodicSystem& s, std::optional<int> horizon = std::nullopt) {
  DecouplingReport r;
  r.horizon = horizon.value_or(default_horizon(s));
  auto mk = markov(s, r.horizon);
  for (int i = 0; i <= r.horizon && r.diagonal; ++i)
    for (int t = 0; t < s.T && r.diagonal; ++t)
      for (int a = 0; a < s.p && r.diagonal; ++a)
        for (int b = 0; b < mk[i][t].cols() && r.diagonal; ++b)
          if (a != b && mk[i][t](a, b) != 0) {
            r.diagonal = false;
            r.offending = Offending{i, t, a, b};
          }
  if (s.m != s.p) r.diagonal = false;
  r.stable = is_stable(s);
  r.output_reachable = output_reachable(s);
  return r;
}

}  // namespace perdec
