#pragma once

// Time-invariant cyclic representation of a periodic system and the
// block-respecting Hermite form of its transfer function.

#include <string>
#include <vector>

#include "perdec/periodic.hpp"
#include "perdec/ratmat.hpp"

namespace perdec {

struct CyclicBundle {
  long tau = 0;
  int T = 1, m = 0, p = 0;
  std::vector<int> state_dims;  // n(tau), n(tau+1), ...
  std::vector<int> offsets;     // row offset of each state block
  QMatrix Abar, Bbar, Cbar, Dbar;
  RatMat Wbar;  // pT x mT
  RatMat Sbar;  // (sum n) x mT

  int total_states() const { return offsets.empty() ? 0 : offsets.back() + state_dims.back(); }
};

inline RatMat resolvent_times(const QMatrix& A, const QMatrix& B) {
  int n = A.rows();
  if (n == 0) return RatMat(0, B.cols());
  RatMat zi(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) zi(i, j) = RatFun(-A(i, j));
  for (int i = 0; i < n; ++i) zi(i, i) = zi(i, i) + RatFun(Poly::z());
  return inverse(zi) * to_ratmat(B);
}

inline CyclicBundle build_cyclic(const PeriodicSystem& s, long tau) {
  s.validate();
  CyclicBundle b;
  b.tau = tau;
  b.T = s.T;
  b.m = s.m;
  b.p = s.p;
  int N = 0;
  for (int i = 0; i < s.T; ++i) {
    b.state_dims.push_back(s.n(tau + i));
    b.offsets.push_back(N);
    N += s.n(tau + i);
  }
  b.Abar = QMatrix(N, N);
  b.Bbar = QMatrix(N, s.m * s.T);
  b.Cbar = QMatrix(s.p * s.T, N);
  b.Dbar = QMatrix(s.p * s.T, s.m * s.T);
  for (int i = 0; i < s.T; ++i) {
    int nx = (i + 1) % s.T;
    b.Abar.set_block(b.offsets[nx], b.offsets[i], s.a(tau + i));
    b.Bbar.set_block(b.offsets[nx], s.m * i, s.b(tau + i));
    b.Cbar.set_block(s.p * i, b.offsets[i], s.c(tau + i));
    b.Dbar.set_block(s.p * i, s.m * i, s.d(tau + i));
  }
  b.Sbar = resolvent_times(b.Abar, b.Bbar);
  b.Wbar = to_ratmat(b.Dbar) + (N ? to_ratmat(b.Cbar) * b.Sbar : RatMat(s.p * s.T, s.m * s.T));
  return b;
}

// Sampled transfer function H_i(z^T, tau) of the periodic system, returned
// as a rational matrix in z (the argument z^T already substituted).
inline RatMat sampled_transfer(const PeriodicSystem& s, int i, long tau) {
  if (i < 0 || i >= s.T) throw Error(ErrorKind::InvalidSystem, "sampled transfer index out of range");
  int n = s.n(tau);
  QMatrix psi = monodromy(s, tau).psi;
  // [z^T I - Psi]^{-1} as a rational matrix in z
  RatMat res;
  if (n > 0) {
    RatMat zi(n, n);
    for (int a = 0; a < n; ++a)
      for (int c = 0; c < n; ++c) zi(a, c) = RatFun(-psi(a, c));
    for (int a = 0; a < n; ++a) zi(a, a) = zi(a, a) + RatFun(Poly::z(s.T));
    res = inverse(zi);
  }
  if (i == 0) {
    RatMat h = to_ratmat(s.d(tau));
    if (n > 0) h = h + to_ratmat(s.c(tau)) * res * to_ratmat(transition(s, tau, tau - s.T + 1) * s.b(tau));
    return h;
  }
  if (n == 0) return RatMat(s.p, s.m);
  RatMat h = to_ratmat(s.c(tau)) * res * to_ratmat(transition(s, tau, tau - i + 1) * s.b(tau - i));
  return RatFun(Poly::z(s.T)) * h;
}

// Bundle at tau + 1, obtained by cyclically permuting blocks.
inline CyclicBundle shift_tau(const CyclicBundle& b) {
  int T = b.T;
  CyclicBundle r;
  r.tau = b.tau + 1;
  r.T = T;
  r.m = b.m;
  r.p = b.p;
  int N = 0;
  for (int i = 0; i < T; ++i) {
    r.state_dims.push_back(b.state_dims[(i + 1) % T]);
    r.offsets.push_back(N);
    N += r.state_dims.back();
  }
  // New block i is old block i+1.
  std::vector<int> sperm, iperm, operm;
  for (int i = 0; i < T; ++i) {
    int o = (i + 1) % T;
    for (int k = 0; k < b.state_dims[o]; ++k) sperm.push_back(b.offsets[o] + k);
    for (int k = 0; k < b.m; ++k) iperm.push_back(o * b.m + k);
    for (int k = 0; k < b.p; ++k) operm.push_back(o * b.p + k);
  }
  r.Abar = b.Abar.select_rows(sperm).select_cols(sperm);
  r.Bbar = b.Bbar.select_rows(sperm).select_cols(iperm);
  r.Cbar = b.Cbar.select_rows(operm).select_cols(sperm);
  r.Dbar = b.Dbar.select_rows(operm).select_cols(iperm);
  r.Wbar = b.Wbar.select_rows(operm).select_cols(iperm);
  r.Sbar = b.Sbar.select_rows(sperm).select_cols(iperm);
  return r;
}

// True iff f * z^s is a function of z^T.
inline bool is_shifted_function_of_zT(const RatFun& f, int s, int T) {
  if (f.is_zero()) return true;
  RatFun g = f * RatFun::zinv(-s);
  auto only_multiples = [T](const Poly& p) {
    for (std::size_t i = 0; i < p.coeffs().size(); ++i)
      if (p.coeffs()[i] != 0 && static_cast<int>(i) % T != 0) return false;
    return true;
  };
  return only_multiples(g.num()) && only_multiples(g.den());
}

// Shape of a cyclic transfer function: block diagonal at infinity and block
// (i, j) equal to z^{-((i-j) mod T)} times a function of z^T.
inline bool check_cyclic_structure(const RatMat& M, int p, int m, int T) {
  if (M.rows() != p * T || M.cols() != m * T) return false;
  for (int r = 0; r < M.rows(); ++r)
    for (int c = 0; c < M.cols(); ++c) {
      const RatFun& f = M(r, c);
      if (f.is_zero()) continue;
      if (!f.is_proper()) return false;
      int bi = r / p, bj = c / m;
      if (bi != bj && f.value_at_infinity() != 0) return false;
      if (!is_shifted_function_of_zT(f, mod(bi - bj, T), T)) return false;
    }
  return true;
}

// Same test for a matrix with arbitrary row/column block sizes (state blocks).
inline bool check_cyclic_structure_blocks(const RatMat& M, const std::vector<int>& rb, const std::vector<int>& cb,
                                          int T) {
  std::vector<int> ro, co;
  for (int i = 0; i < T; ++i)
    for (int k = 0; k < rb[i]; ++k) ro.push_back(i);
  for (int i = 0; i < T; ++i)
    for (int k = 0; k < cb[i]; ++k) co.push_back(i);
  for (int r = 0; r < M.rows(); ++r)
    for (int c = 0; c < M.cols(); ++c)
      if (!is_shifted_function_of_zT(M(r, c), mod(ro[r] - co[c], T), T)) return false;
  return true;
}

// Augmented signal: at time t the block (t - tau) mod T carries v(t), the
// rest is zero.  v[k] is the value at time t0 + k.
inline std::vector<QMatrix> cycle_signal(const std::vector<QMatrix>& v, long tau, int T, long t0 = 0) {
  std::vector<QMatrix> out;
  for (std::size_t k = 0; k < v.size(); ++k) {
    int q = v[k].rows();
    QMatrix c(q * T, 1);
    c.set_block(q * mod(t0 + static_cast<long>(k) - tau, T), 0, v[k]);
    out.push_back(c);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Cyclic Hermite normal form

struct CyclicHermiteResult {
  HermiteResult hermite;  // H = Delta bar, U = U bar
  int shift = 0;          // row block i is paired with column block (i + shift) mod T
  bool shift_found = true;
  std::vector<std::string> log;  // anomalies: unreduced entries, fallbacks
};

// Column block holding the pivots of row block i.
inline int paired_block(int i, int shift, int T) { return (i + shift) % T; }

inline CyclicHermiteResult cyclic_hermite(const CyclicBundle& b) {
  const RatMat& W = b.Wbar;
  require_over_S(W, "Wbar");
  int T = b.T, p = b.p, m = b.m;
  int target = std::min(p, m);
  CyclicHermiteResult out;
  out.shift_found = false;
  for (int s = 0; s < T && !out.shift_found; ++s) {
    bool ok = true;
    for (int i = 0; i < T && ok; ++i)
      ok = normal_rank(W.block(i * p, paired_block(i, s, T) * m, p, m)) == target;
    if (ok) {
      out.shift = s;
      out.shift_found = true;
    }
  }
  if (!out.shift_found) {
    out.shift = 0;
    out.log.push_back("no block pairing with full-rank blocks; using the diagonal pairing");
  }
  HermiteResult& h = out.hermite;
  h.H = W;
  h.U = RatMat::identity(m * T);
  detail::ColumnWorkspace ws{h.H, h.U, h.ops};
  for (int i = 0; i < T; ++i) {
    std::vector<int> rows, cols;
    for (int k = 0; k < p; ++k) rows.push_back(i * p + k);
    int cbk = paired_block(i, out.shift, T);
    for (int k = 0; k < m; ++k) cols.push_back(cbk * m + k);
    auto piv = detail::hermite_restricted(ws, rows, cols, PivotStrategy::MinOrderLowestIndex);
    h.pivots.insert(h.pivots.end(), piv.begin(), piv.end());
  }
  std::sort(h.pivots.begin(), h.pivots.end(), [](const Pivot& a, const Pivot& c) { return a.row < c.row; });
  // Cross-block residues, row by row, using operation (iii) only.  A
  // reduction is skipped when it would write into the diagonal block that
  // owns the target column; passes repeat until nothing changes.
  auto off_diagonal = [&](int, int c, int blk) { return c / m != blk; };
  std::vector<int> row_block_of(T);
  for (int i = 0; i < T; ++i) row_block_of[paired_block(i, out.shift, T)] = i;
  auto touches_diagonal = [&](int source, int target) {
    int rb = row_block_of[target / m];
    for (int r = rb * p; r < (rb + 1) * p; ++r)
      if (!h.H(r, source).is_zero()) return true;
    return false;
  };
  for (int pass = 0; pass < p * T; ++pass) {
    bool changed = false;
    for (const auto& pv : h.pivots) {
      int blk = pv.col / m;
      for (int c = 0; c < m * T; ++c) {
        if (!off_diagonal(pv.row, c, blk) || h.H(pv.row, c).is_zero()) continue;
        if (is_residue(h.H(pv.row, c), h.H(pv.row, pv.col)) || touches_diagonal(pv.col, c)) continue;
        ws.reduce(pv.row, c, pv.col);
        changed = true;
      }
    }
    if (!changed) break;
  }
  for (const auto& pv : h.pivots) {
    const RatFun& d = h.H(pv.row, pv.col);
    int blk = pv.col / m;
    for (int c = 0; c < m * T; ++c)
      if (off_diagonal(pv.row, c, blk) && !is_residue(h.H(pv.row, c), d))
        out.log.push_back("entry (" + std::to_string(pv.row + 1) + "," + std::to_string(c + 1) +
                          ") left unreduced");
  }
  return out;
}

// Each row block's paired p x m block is lower triangular with the
// diagonal in N and residues to the left; empty when all hold.
inline std::vector<std::string> cyclic_hermite_violations(const CyclicBundle& b, const CyclicHermiteResult& r) {
  std::vector<std::string> v;
  const auto& h = r.hermite;
  if (b.Wbar * h.U != h.H) v.push_back("W*U != Delta");
  RatFun d = det(h.U);
  if (!is_over_S(h.U) || !s_is_unit(d)) v.push_back("U not unimodular over S");
  QMatrix u0 = value_at_infinity(h.U);
  for (int i = 0; i < u0.rows(); ++i)
    for (int j = 0; j < u0.cols(); ++j)
      if (i / b.m != j / b.m && u0(i, j) != 0) v.push_back("U not block diagonal at infinity");
  for (int i = 0; i < b.T; ++i) {
    int cb = paired_block(i, r.shift, b.T);
    HermiteResult local;
    local.H = h.H.block(i * b.p, cb * b.m, b.p, b.m);
    local.U = RatMat::identity(b.m);
    for (const auto& pv : h.pivots)
      if (pv.row / b.p == i) local.pivots.push_back({pv.row - i * b.p, pv.col - cb * b.m});
    for (auto& s : hermite_violations(local.H, local)) v.push_back("block " + std::to_string(i + 1) + ": " + s);
  }
  if (!check_cyclic_structure(h.H, b.p, b.m, b.T)) v.push_back("Delta lacks cyclic structure");
  return v;
}

}  // namespace perdec
