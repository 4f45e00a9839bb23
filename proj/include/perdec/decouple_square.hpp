#pragma once

// Decoupling of square periodic systems (m = p) by regular periodic state
// feedback, and realization of a unimodular compensator as state feedback.

#include <optional>
#include <string>
#include <vector>

#include "perdec/cyclic.hpp"

namespace perdec {

// True iff every p x p block of the pT x pT matrix is diagonal.
inline bool square_solvable(const RatMat& delta, int p, int T) {
  if (delta.rows() != p * T || delta.cols() != p * T)
    throw Error(ErrorKind::DimensionMismatch, "cyclic Hermite form must be pT x pT");
  for (int i = 0; i < delta.rows(); ++i)
    for (int j = 0; j < delta.cols(); ++j)
      if (i % p != j % p && !delta(i, j).is_zero()) return false;
  return true;
}

// theorem1: the target is U and U^{-1} - U^{-1}(inf) = K S is solved.
// nonsquare: the target is V and V - V(inf) = K S is solved, with V Z = L.
enum class Convention { Theorem1, Nonsquare };

struct RealizationResult {
  QMatrix Kbar, Fbar, Gbar;
  FeedbackLaw law;
  bool flipped_sign = false;  // F = +V(inf)^{-1} K verified instead of the minus sign
};

namespace detail {

// Rows of K restricted to the state block of their input block, so that K is
// block diagonal.  Equations: K Abar^{j-1} Bbar = R_j for j = 1..count.
inline std::optional<QMatrix> solve_markov(const CyclicBundle& b, const std::vector<QMatrix>& R, bool block_diagonal) {
  int N = b.total_states(), rows = R.empty() ? 0 : R[0].rows(), cols = b.m * b.T;
  int count = static_cast<int>(R.size());
  QMatrix K(rows, N);
  if (N == 0) {
    for (const auto& r : R)
      if (!r.is_zero()) return std::nullopt;
    return K;
  }
  std::vector<QMatrix> M;  // Abar^{j-1} Bbar
  QMatrix cur = b.Bbar;
  for (int j = 0; j < count; ++j) {
    M.push_back(cur);
    cur = b.Abar * cur;
  }
  int in_block = rows / b.T;
  for (int r = 0; r < rows; ++r) {
    int lo = 0, len = N;
    if (block_diagonal) {
      int i = r / in_block;
      lo = b.offsets[i];
      len = b.state_dims[i];
    }
    // Transposed system: (stacked M restricted to allowed rows)^T k^T = R_row^T.
    QMatrix sys(count * cols, len), rhs(count * cols, 1);
    for (int j = 0; j < count; ++j)
      for (int c = 0; c < cols; ++c) {
        for (int k = 0; k < len; ++k) sys(j * cols + c, k) = M[j](lo + k, c);
        rhs(j * cols + c, 0) = R[j](r, c);
      }
    auto x = solve(sys, rhs);
    if (!x) return std::nullopt;
    for (int k = 0; k < len; ++k) K(r, lo + k) = (*x)(k, 0);
  }
  return K;
}

inline bool block_diagonal(const QMatrix& M, const std::vector<int>& row_sizes, const std::vector<int>& col_sizes) {
  std::vector<int> rb, cb;
  for (std::size_t k = 0; k < row_sizes.size(); ++k) rb.insert(rb.end(), row_sizes[k], static_cast<int>(k));
  for (std::size_t k = 0; k < col_sizes.size(); ++k) cb.insert(cb.end(), col_sizes[k], static_cast<int>(k));
  for (int i = 0; i < M.rows(); ++i)
    for (int j = 0; j < M.cols(); ++j)
      if (rb[i] != cb[j] && M(i, j) != 0) return false;
  return true;
}

}  // namespace detail

// L defaults to the identity; it must be block diagonal with T blocks.
inline RealizationResult realize_compensator(const RatMat& target, const CyclicBundle& b, Convention conv,
                                             std::optional<QMatrix> L = std::nullopt) {
  int mT = b.m * b.T, N = b.total_states();
  if (target.rows() != mT || target.cols() != mT) throw Error(ErrorKind::DimensionMismatch, "compensator must be mT x mT");
  require_over_S(target, "compensator");
  RatMat V = conv == Convention::Theorem1 ? inverse(target) : target;
  require_over_S(V, "inverse compensator");
  QMatrix Lbar = L.value_or(QMatrix::identity(mT));
  if (Lbar.rows() != mT || Lbar.cols() % b.T != 0) throw Error(ErrorKind::DimensionMismatch, "L must be mT x qT");
  int q = Lbar.cols() / b.T;

  auto coeffs = series_coeffs(V, 2 * N + 2);
  QMatrix V0 = coeffs[0];
  std::vector<QMatrix> R(coeffs.begin() + 1, coeffs.end());
  auto K = detail::solve_markov(b, R, true);
  if (!K) {
    if (detail::solve_markov(b, R, false))
      throw Error(ErrorKind::NotBlockDiagonal, "the constant solution K is not block diagonal");
    throw Error(ErrorKind::NoConstantSolution, "compensator is not realizable by static state feedback");
  }
  if (rank(V0) != mT) throw Error(ErrorKind::Singular, "compensator value at infinity is singular");
  QMatrix V0inv = inverse(V0);

  RealizationResult res;
  res.Kbar = *K;
  res.Gbar = V0inv * Lbar;
  std::vector<int> ms(b.T, b.m), qs(b.T, q);
  if (!detail::block_diagonal(res.Gbar, ms, qs))
    throw Error(ErrorKind::NotBlockDiagonal, "G is not block diagonal");

  RatMat S = b.Sbar, I = RatMat::identity(mT);
  for (bool flip : {false, true}) {
    QMatrix F = V0inv * res.Kbar;
    if (!flip) F = QMatrix(F.rows(), F.cols()) - F;
    RatMat loop = I - to_ratmat(F) * S;
    bool ok = conv == Convention::Theorem1 ? inverse(loop) * to_ratmat(res.Gbar) == target
                                           : to_ratmat(V0) * loop == V;
    if (ok) {
      res.Fbar = F;
      res.flipped_sign = flip;
      break;
    }
    if (flip) throw Error(ErrorKind::ConstructionFailed, "realized feedback does not reproduce the compensator");
  }
  res.law.F.resize(b.T);
  res.law.G.resize(b.T);
  for (int i = 0; i < b.T; ++i) {
    int t = mod(b.tau + i, b.T);
    res.law.F[t] = res.Fbar.block(b.m * i, b.offsets[i], b.m, b.state_dims[i]);
    res.law.G[t] = res.Gbar.block(b.m * i, q * i, b.m, q);
  }
  return res;
}

struct SquareDecoupling {
  CyclicBundle bundle;
  CyclicHermiteResult hermite;
  RealizationResult realization;
  PeriodicSystem closed;
  DecouplingReport check;
};

inline void require_stable_reachable(const PeriodicSystem& s) {
  if (!is_stable(s)) throw Error(ErrorKind::NotStable, "system is not stable; stabilize it first");
  if (!output_reachable(s)) throw Error(ErrorKind::NotOutputReachable, "system is not output reachable");
  // The pointwise rank test does not imply full normal rank of the cyclic
  // transfer function, which the synthesis needs.
  int r = normal_rank(build_cyclic(s, 0).Wbar);
  if (r < s.p * s.T)
    throw Error(ErrorKind::NotOutputReachable, "cyclic transfer function has normal rank " + std::to_string(r) +
                                                   " < pT = " + std::to_string(s.p * s.T));
}

inline SquareDecoupling decouple_square(const PeriodicSystem& s, long tau = 0) {
  s.validate();
  if (s.m != s.p) throw Error(ErrorKind::DimensionMismatch, "square decoupling needs m = p");
  require_stable_reachable(s);
  SquareDecoupling out;
  out.bundle = build_cyclic(s, tau);
  out.hermite = cyclic_hermite(out.bundle);
  const RatMat& delta = out.hermite.hermite.H;
  if (!square_solvable(delta, s.p, s.T))
    throw Error(ErrorKind::NotSolvable, "cyclic Hermite form has a non-diagonal block");
  out.realization = realize_compensator(out.hermite.hermite.U, out.bundle, Convention::Theorem1);
  out.closed = apply_feedback(s, out.realization.law);
  out.check = verify_decoupled(out.closed);
  if (!out.check.diagonal || !out.check.stable || build_cyclic(out.closed, tau).Wbar != delta)
    throw Error(ErrorKind::ConstructionFailed, "closed loop does not reproduce the Hermite form");
  return out;
}

}  // namespace perdec
