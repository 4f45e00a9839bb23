#pragma once

#include <algorithm>
#include <functional>
#include <string>
#include <vector>

#include "perdec/ring_s.hpp"

namespace perdec {

inline bool is_over_S(const RatMat& m) {
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      if (!is_member_S(m(i, j))) return false;
  return true;
}

inline void require_over_S(const RatMat& m, const char* what) {
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      if (!is_member_S(m(i, j)))
        throw Error(ErrorKind::NotMember, std::string(what) + "(" + std::to_string(i) + "," + std::to_string(j) +
                                              ") = " + m(i, j).to_string() + " is not in S");
}

inline QMatrix value_at_infinity(const RatMat& m) {
  QMatrix v(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) v(i, j) = m(i, j).value_at_infinity();
  return v;
}

// Coefficient matrices of the expansion sum_k M_k z^-k, k < count.
inline std::vector<QMatrix> series_coeffs(const RatMat& m, int count) {
  std::vector<QMatrix> out(count, QMatrix(m.rows(), m.cols()));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) {
      if (m(i, j).is_zero()) continue;
      auto h = m(i, j).series(count);
      for (int k = 0; k < count; ++k) out[k](i, j) = h[k];
    }
  return out;
}

inline RatMat inflate(const RatMat& m, int k) {
  RatMat r(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) r(i, j) = m(i, j).inflate(k);
  return r;
}

// Determinant by fraction-free (Bareiss) elimination; divisions are exact.
inline RatFun det(RatMat m) {
  if (m.rows() != m.cols()) throw Error(ErrorKind::InvalidSystem, "det of non-square matrix");
  int n = m.rows();
  if (n == 0) return RatFun(1);
  RatFun prev(1);
  int sign = 1;
  for (int k = 0; k < n - 1; ++k) {
    if (m(k, k).is_zero()) {
      int p = -1;
      for (int i = k + 1; i < n; ++i)
        if (!m(i, k).is_zero()) { p = i; break; }
      if (p < 0) return RatFun();
      m.swap_rows(p, k);
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j) m(i, j) = (m(i, j) * m(k, k) - m(i, k) * m(k, j)) / prev;
    prev = m(k, k);
  }
  return sign > 0 ? m(n - 1, n - 1) : -m(n - 1, n - 1);
}

inline int normal_rank(RatMat m) {
  int row = 0;
  for (int c = 0; c < m.cols() && row < m.rows(); ++c) {
    int p = -1;
    for (int i = row; i < m.rows(); ++i)
      if (!m(i, c).is_zero()) { p = i; break; }
    if (p < 0) continue;
    m.swap_rows(p, row);
    for (int i = row + 1; i < m.rows(); ++i) {
      if (m(i, c).is_zero()) continue;
      RatFun f = m(i, c) / m(row, c);
      for (int j = c; j < m.cols(); ++j) m(i, j) -= f * m(row, j);
    }
    ++row;
  }
  return row;
}

inline RatMat inverse(const RatMat& a) {
  if (a.rows() != a.cols()) throw Error(ErrorKind::Singular, "inverse of non-square matrix");
  int n = a.rows();
  RatMat m = a, inv = RatMat::identity(n);
  for (int c = 0; c < n; ++c) {
    int p = -1;
    for (int i = c; i < n; ++i)
      if (!m(i, c).is_zero()) { p = i; break; }
    if (p < 0) throw Error(ErrorKind::Singular, "singular rational matrix");
    m.swap_rows(p, c);
    inv.swap_rows(p, c);
    RatFun piv = m(c, c);
    for (int j = 0; j < n; ++j) {
      m(c, j) = m(c, j) / piv;
      inv(c, j) = inv(c, j) / piv;
    }
    for (int i = 0; i < n; ++i) {
      if (i == c || m(i, c).is_zero()) continue;
      RatFun f = m(i, c);
      for (int j = 0; j < n; ++j) {
        if (!m(c, j).is_zero()) m(i, j) -= f * m(c, j);
        if (!inv(c, j).is_zero()) inv(i, j) -= f * inv(c, j);
      }
    }
  }
  return inv;
}

// ---------------------------------------------------------------------------
// Hermite normal form over S

struct ColumnOp {
  enum Kind { Swap, Scale, AddMultiple } kind;
  int target;     // column modified
  int source;     // Swap partner or AddMultiple source; -1 for Scale
  RatFun factor;  // Scale: unit multiplier, AddMultiple: col target += factor * col source

  std::string to_string() const {
    auto c = [](int i) { return "c" + std::to_string(i + 1); };
    switch (kind) {
      case Swap: return "swap(" + c(target) + ", " + c(source) + ")";
      case Scale: return c(target) + " *= " + factor.to_string();
      case AddMultiple: return c(target) + " += (" + factor.to_string() + ")*" + c(source);
    }
    return "";
  }
};

struct Pivot {
  int row;
  int col;
};

struct HermiteResult {
  RatMat H;
  RatMat U;
  std::vector<ColumnOp> ops;
  std::vector<Pivot> pivots;
};

enum class PivotStrategy { MinOrderLowestIndex, MinOrderHighestIndex };

namespace detail {

struct ColumnWorkspace {
  RatMat& H;
  RatMat& U;
  std::vector<ColumnOp>& log;

  void swap(int a, int b) {
    if (a == b) return;
    H.swap_cols(a, b);
    U.swap_cols(a, b);
    log.push_back({ColumnOp::Swap, a, b, RatFun()});
  }
  void scale(int a, const RatFun& s) {
    H.scale_col(a, s);
    U.scale_col(a, s);
    log.push_back({ColumnOp::Scale, a, -1, s});
  }
  void add(int target, int source, const RatFun& f) {
    if (f.is_zero()) return;
    H.add_col(target, source, f);
    U.add_col(target, source, f);
    log.push_back({ColumnOp::AddMultiple, target, source, f});
  }
  // Replace H(row, target) by its residue modulo H(row, source).
  void reduce(int row, int target, int source) {
    if (H(row, target).is_zero()) return;
    auto d = s_divide(H(row, target), H(row, source));
    add(target, source, -d.q);
  }
};

// Hermite reduction restricted to the given rows and columns.  Column
// operations act on whole columns of H and U.
inline std::vector<Pivot> hermite_restricted(ColumnWorkspace& ws, const std::vector<int>& rows,
                                             const std::vector<int>& cols, PivotStrategy strategy) {
  std::vector<Pivot> pivots;
  std::size_t k = 0;
  for (int r : rows) {
    if (k == cols.size()) break;
    while (true) {
      int best = -1, best_ord = 0, nonzero = 0;
      for (std::size_t c = k; c < cols.size(); ++c) {
        const RatFun& x = ws.H(r, cols[c]);
        if (x.is_zero()) continue;
        ++nonzero;
        int o = s_order(x);
        bool better = best < 0 || o < best_ord ||
                      (o == best_ord && strategy == PivotStrategy::MinOrderHighestIndex);
        if (better) {
          best = static_cast<int>(c);
          best_ord = o;
        }
      }
      if (best < 0) break;
      ws.swap(cols[k], cols[best]);
      if (nonzero == 1) break;
      for (std::size_t c = k + 1; c < cols.size(); ++c) ws.reduce(r, cols[c], cols[k]);
    }
    int pc = cols[k];
    if (ws.H(r, pc).is_zero()) continue;
    auto nf = s_normal_form(ws.H(r, pc));
    if (nf.u != RatFun(1)) ws.scale(pc, RatFun(1) / nf.u);
    for (std::size_t c = 0; c < k; ++c) ws.reduce(r, cols[c], pc);
    pivots.push_back({r, pc});
    ++k;
  }
  return pivots;
}

inline std::vector<int> iota(int n) {
  std::vector<int> v(n);
  for (int i = 0; i < n; ++i) v[i] = i;
  return v;
}

}  // namespace detail

inline HermiteResult hermite_form_S(const RatMat& m, PivotStrategy strategy = PivotStrategy::MinOrderLowestIndex) {
  require_over_S(m, "M");
  HermiteResult res{m, RatMat::identity(m.cols()), {}, {}};
  detail::ColumnWorkspace ws{res.H, res.U, res.ops};
  res.pivots = detail::hermite_restricted(ws, detail::iota(m.rows()), detail::iota(m.cols()), strategy);
  return res;
}

// Residue condition of the chosen residue set: r = 0 or r = f/z^l with
// deg f <= l < ord(d).
inline bool is_residue(const RatFun& r, const RatFun& d) {
  if (r.is_zero()) return true;
  int l = r.den().deg();
  return r.den() == Poly::z(l) && r.num().deg() <= l && l < s_order(d);
}

inline bool is_normal_form(const RatFun& x) {
  if (x.is_zero()) return false;
  auto nf = s_normal_form(x);
  return nf.n == x;
}

// ---------------------------------------------------------------------------
// Minors and invariant factors

inline void for_each_combination(int n, int k, const std::function<bool(const std::vector<int>&)>& f) {
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  if (k > n) return;
  while (true) {
    if (!f(idx)) return;
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

// Order of a gcd in S of all k x k minors, or -1 if they all vanish.  For
// elements a_i/b_i of S the gcd has order min(deg b_i - deg a_i) plus the
// number of zeros of gcd(a_i) in |z| >= 1, so only one polynomial needs
// splitting.
inline int minor_gcd_order(const RatMat& m, int k) {
  int minrel = -1;
  Poly g;
  bool done = false;
  for_each_combination(m.rows(), k, [&](const std::vector<int>& rs) {
    RatMat sub = m.select_rows(rs);
    for_each_combination(m.cols(), k, [&](const std::vector<int>& cs) {
      RatFun d = det(sub.select_cols(cs));
      if (!d.is_zero()) {
        int rel = d.relative_degree();
        minrel = minrel < 0 ? rel : std::min(minrel, rel);
        g = gcd(g, d.num());
        done = minrel == 0 && g.deg() == 0;
      }
      return !done;
    });
    return !done;
  });
  if (minrel < 0) return -1;
  return minrel + unstable_part(g).deg();
}

inline std::vector<int> invariant_factor_orders(const RatMat& m) {
  require_over_S(m, "M");
  int r = normal_rank(m);
  std::vector<int> out;
  int prev = 0;
  for (int k = 1; k <= r; ++k) {
    int g = minor_gcd_order(m, k);
    out.push_back(g - prev);
    prev = g;
  }
  return out;
}

enum class UnimodularKind { Unimodular, RowUnimodular, ColumnUnimodular, None };

inline const char* to_string(UnimodularKind k) {
  switch (k) {
    case UnimodularKind::Unimodular: return "unimodular";
    case UnimodularKind::RowUnimodular: return "row_unimodular";
    case UnimodularKind::ColumnUnimodular: return "column_unimodular";
    case UnimodularKind::None: return "none";
  }
  return "none";
}

inline UnimodularKind unimodular_kind(const RatMat& m) {
  require_over_S(m, "M");
  int k = std::min(m.rows(), m.cols());
  if (k == 0) return UnimodularKind::None;
  if (minor_gcd_order(m, k) != 0) return UnimodularKind::None;
  if (m.rows() == m.cols()) return UnimodularKind::Unimodular;
  return m.rows() < m.cols() ? UnimodularKind::RowUnimodular : UnimodularKind::ColumnUnimodular;
}

// Independent check of the Hermite postconditions; empty when all hold.
inline std::vector<std::string> hermite_violations(const RatMat& m, const HermiteResult& h) {
  std::vector<std::string> v;
  if (m * h.U != h.H) v.push_back("M*U != H");
  if (h.U.rows() != h.U.cols() || !is_over_S(h.U)) {
    v.push_back("U not square over S");
  } else {
    RatFun d = det(h.U);
    if (!s_is_unit(d)) v.push_back("det U is not a unit");
  }
  std::size_t pi = 0;
  int lastcol = -1;
  for (int r = 0; r < h.H.rows(); ++r) {
    bool has = pi < h.pivots.size() && h.pivots[pi].row == r;
    int pc = has ? h.pivots[pi].col : lastcol;
    if (has && pc <= lastcol) v.push_back("pivot columns not increasing at row " + std::to_string(r));
    for (int c = pc + 1; c < h.H.cols(); ++c)
      if (!h.H(r, c).is_zero()) v.push_back("nonzero right of pivot at row " + std::to_string(r));
    if (has) {
      const RatFun& d = h.H(r, pc);
      if (!is_normal_form(d)) v.push_back("diagonal not in normal form at row " + std::to_string(r));
      for (std::size_t q = 0; q < pi; ++q) {
        int c = h.pivots[q].col;
        if (!is_residue(h.H(r, c), d)) v.push_back("residue condition fails at row " + std::to_string(r));
      }
      lastcol = pc;
      ++pi;
    }
  }
  return v;
}

}  // namespace perdec
