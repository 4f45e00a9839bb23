#pragma once

// Decoupling of periodic systems with more inputs than outputs by nonregular
// periodic state feedback: decoupling invariants, the unobservable delay
// chains, the candidate-list search and the compensator construction.

#include <algorithm>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "perdec/decouple_square.hpp"
#include "perdec/int_list.hpp"

namespace perdec {

// ---------------------------------------------------------------------------
// Invariants from the cyclic Hermite form

struct FirstDecouplingData {
  std::vector<std::vector<Poly>> d;
  std::vector<IntList> delta;
  std::vector<std::vector<int>> selected_row;  // row of the chosen diagonal entry
};

// For column j < p of column-block i, the highest-order diagonal entry among
// the T blocks of that column-block; ties go to the topmost block.
inline FirstDecouplingData first_decoupling_data(const RatMat& delta_bar, int p, int m, int T) {
  FirstDecouplingData out;
  for (int i = 0; i < T; ++i) {
    std::vector<Poly> d;
    IntList delta;
    std::vector<int> sel;
    for (int j = 0; j < p; ++j) {
      int best = -1, best_order = -1;
      for (int r = 0; r < T; ++r) {
        const RatFun& e = delta_bar(r * p + j, i * m + j);
        if (e.is_zero()) continue;
        int o = s_order(e);
        if (o > best_order) {
          best = r * p + j;
          best_order = o;
        }
      }
      if (best < 0)
        throw Error(ErrorKind::ZeroColumn, "column " + std::to_string(j + 1) + " of column-block " +
                                               std::to_string(i + 1) + " has no nonzero diagonal entry");
      NormalForm nf = s_normal_form(delta_bar(best, i * m + j));
      d.push_back(nf.n.num());
      delta.push_back(best_order);
      sel.push_back(best);
    }
    out.d.push_back(d);
    out.delta.push_back(delta);
    out.selected_row.push_back(sel);
  }
  return out;
}

// Drops the last m - p columns of each column-block and zeroes the diagonal
// entries that were not selected.
inline RatMat build_delta_star(const RatMat& delta_bar, const FirstDecouplingData& fd, int p, int m, int T) {
  RatMat ds(p * T, p * T);
  for (int i = 0; i < T; ++i)
    for (int j = 0; j < p; ++j) {
      int src = i * m + j, dst = i * p + j;
      for (int r = 0; r < p * T; ++r) {
        bool diagonal = r % p == j;
        if (diagonal && r != fd.selected_row[i][j]) continue;
        ds(r, dst) = delta_bar(r, src);
      }
    }
  if (normal_rank(ds) != p * T) throw Error(ErrorKind::Singular, "pruned Hermite form is singular (output reachability)");
  return ds;
}

struct InteractorData {
  RatMat interactor;
  std::vector<std::vector<Poly>> f;
  std::vector<IntList> phi;
};

inline InteractorData interactor_data(const RatMat& delta_star, int p, int T) {
  InteractorData out;
  out.interactor = inverse(delta_star);
  if (out.interactor * delta_star != RatMat::identity(p * T))
    throw Error(ErrorKind::ConstructionFailed, "interactor identity failed");
  for (int i = 0; i < T; ++i) {
    std::vector<Poly> f;
    IntList phi;
    for (int j = 0; j < p; ++j) {
      Poly l(1);
      int excess = 0;
      for (int r = 0; r < p * T; ++r) {
        const RatFun& e = out.interactor(r, i * p + j);
        if (e.is_zero()) continue;
        l = lcm(l, e.den());
        excess = std::max(excess, -e.relative_degree());
      }
      f.push_back(l.monic());
      phi.push_back(l.deg() + excess);
    }
    out.f.push_back(f);
    out.phi.push_back(phi);
  }
  return out;
}

// The compensator block Phi diag(f_ij / z^(delta_ij + eps_ij)).
inline RatMat z1_matrix(const RatMat& interactor, const std::vector<std::vector<Poly>>& f,
                        const std::vector<IntList>& delta, const std::vector<IntList>& eps, int p, int T) {
  RatMat Z = interactor;
  for (int i = 0; i < T; ++i)
    for (int j = 0; j < p; ++j) {
      RatFun s = RatFun(f[i][j]) * RatFun::zinv(delta[i][j] + eps[i][j]);
      for (int r = 0; r < p * T; ++r) Z(r, i * p + j) = Z(r, i * p + j) * s;
    }
  if (!is_over_S(Z)) throw Error(ErrorKind::NotMember, "Z1 leaves S; epsilon is too small");
  return Z;
}

// Invariant-factor orders of Z1 attributed to column-blocks: block b gets the
// multiset difference between the orders of the first (b+1)p columns and of
// the first bp columns.  If that difference is not a sub-multiset, the block
// gets (0, ..., 0, s) with s the difference of the order sums.
inline std::vector<IntList> omega_of(const RatMat& Z1, int p, int T) {
  std::vector<IntList> out;
  IntList prev;
  for (int b = 0; b < T; ++b) {
    std::vector<int> cols;
    for (int c = 0; c < (b + 1) * p; ++c) cols.push_back(c);
    IntList cur = invariant_factor_orders(Z1.select_cols(cols));
    std::sort(cur.begin(), cur.end());
    IntList rest = cur, ok_prev = prev;
    bool sub = true;
    for (int v : ok_prev) {
      auto it = std::find(rest.begin(), rest.end(), v);
      if (it == rest.end()) {
        sub = false;
        break;
      }
      rest.erase(it);
    }
    if (!sub || static_cast<int>(rest.size()) != p) {
      rest.assign(p, 0);
      rest[p - 1] = list_sum(cur) - list_sum(prev);
    }
    out.push_back(rest);
    prev = cur;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Unobservable delay chains

struct Chain {
  int block = 0;        // column-block of the extra input
  int input = 0;        // column of the extra input in the cyclic input vector
  std::vector<QMatrix> vectors;
  int free_length = 0;  // length of the initial subchain not driven by other inputs
};

struct ChainData {
  std::vector<IntList> sigma, sigma_free;
  std::vector<Chain> chains;
  QMatrix unobservable;  // basis of the unobservable subspace, as columns
};

namespace detail {

inline bool in_span(const QMatrix& basis, const QMatrix& v) {
  if (basis.cols() == 0) return v.is_zero();
  return rank(hstack(basis, v)) == rank(basis);
}

}  // namespace detail

// Each extra input starts a chain b, Ab, A^2 b, ... kept while the vectors are
// unobservable, nonzero and independent of all vectors collected so far.  A
// chain is free up to the first vector that an output-side input also drives.
inline ChainData unobservable_chains(const CyclicBundle& b) {
  int N = b.total_states(), m = b.m, p = b.p, T = b.T;
  ChainData out;
  QMatrix O(0, N), cur = b.Cbar;
  for (int k = 0; k < N; ++k) {
    O = vstack(O, cur);
    cur = cur * b.Abar;
  }
  out.unobservable = N ? nullspace(O) : QMatrix(0, 0);
  QMatrix collected(N, 0);
  out.sigma.assign(T, IntList());
  for (int i = 0; i < T; ++i)
    for (int k = p; k < m; ++k) {
      Chain ch;
      ch.block = i;
      ch.input = i * m + k;
      QMatrix v = N ? b.Bbar.block(0, ch.input, N, 1) : QMatrix(0, 1);
      for (int step = 0; step < N; ++step) {
        if (v.is_zero() || !detail::in_span(out.unobservable, v) || detail::in_span(collected, v)) break;
        ch.vectors.push_back(v);
        collected = hstack(collected, v);
        v = b.Abar * v;
      }
      out.sigma[i].push_back(static_cast<int>(ch.vectors.size()));
      out.chains.push_back(ch);
    }

  // Coordinates of the output-side input columns in a basis that starts with
  // the chain vectors.
  QMatrix basis = collected;
  for (int e = 0; e < N && basis.cols() < N; ++e) {
    QMatrix u(N, 1);
    u(e, 0) = 1;
    if (!detail::in_span(basis, u)) basis = hstack(basis, u);
  }
  std::vector<int> piv_cols;
  for (int c = 0; c < m * T; ++c)
    if (c % m < p) piv_cols.push_back(c);
  QMatrix coords = N ? *solve(basis, b.Bbar.select_cols(piv_cols)) : QMatrix(0, 0);
  out.sigma_free.assign(T, IntList());
  int pos = 0;
  for (auto& ch : out.chains) {
    ch.free_length = static_cast<int>(ch.vectors.size());
    for (int k = 0; k < static_cast<int>(ch.vectors.size()); ++k) {
      bool driven = false;
      for (int c = 0; c < coords.cols(); ++c) driven = driven || coords(pos + k, c) != 0;
      if (driven) {
        ch.free_length = k;
        break;
      }
    }
    pos += static_cast<int>(ch.vectors.size());
    out.sigma_free[ch.block].push_back(ch.free_length);
  }
  return out;
}

struct DecouplingInvariants {
  std::vector<std::vector<Poly>> d, f;
  std::vector<IntList> delta, phi, sigma, sigma_free;
  RatMat delta_star, interactor;
  std::vector<std::vector<int>> selected_row;
};

struct StandardForm {
  RealizationResult hermite_law;  // realizes U on the given system
  PeriodicSystem transformed;
  CyclicBundle bundle;
  ChainData chains;
};

inline StandardForm standard_form(const PeriodicSystem& s, const CyclicBundle& b, const CyclicHermiteResult& h) {
  StandardForm out;
  out.hermite_law = realize_compensator(h.hermite.U, b, Convention::Theorem1);
  out.transformed = apply_feedback(s, out.hermite_law.law);
  out.bundle = build_cyclic(out.transformed, b.tau);
  if (out.bundle.Wbar != h.hermite.H)
    throw Error(ErrorKind::ConstructionFailed, "feedback realizing U does not produce the Hermite form");
  out.chains = unobservable_chains(out.bundle);
  return out;
}

inline DecouplingInvariants decoupling_invariants(const CyclicHermiteResult& h, const ChainData& chains, int p, int m,
                                                  int T) {
  DecouplingInvariants inv;
  auto fd = first_decoupling_data(h.hermite.H, p, m, T);
  inv.d = fd.d;
  inv.delta = fd.delta;
  inv.selected_row = fd.selected_row;
  inv.delta_star = build_delta_star(h.hermite.H, fd, p, m, T);
  auto id = interactor_data(inv.delta_star, p, T);
  inv.interactor = id.interactor;
  inv.f = id.f;
  inv.phi = id.phi;
  inv.sigma = chains.sigma;
  inv.sigma_free = chains.sigma_free;
  return inv;
}

// ---------------------------------------------------------------------------
// Candidate lists

struct CandidateLists {
  std::vector<IntList> epsilon, eta, eta_star, omega;
};

struct Theorem2Report {
  bool ok = true;
  std::vector<std::string> failures;
  std::vector<std::string> notes;  // per-block sum and dominance, informative only
};

// Sum and dominance are checked on the lists concatenated over all blocks;
// the remaining conditions block by block.
inline Theorem2Report theorem2_check(const DecouplingInvariants& inv, const CandidateLists& c, int T) {
  Theorem2Report r;
  auto fail = [&](const std::string& s) {
    r.ok = false;
    r.failures.push_back(s);
  };
  for (int i = 0; i < T; ++i) {
    std::string blk = "block " + std::to_string(i + 1) + ": ";
    const IntList &eps = c.epsilon[i], &eta = c.eta[i], &es = c.eta_star[i], &om = c.omega[i];
    if (eps.size() != inv.delta[i].size() || es.size() != eps.size() || eta.size() != inv.sigma[i].size()) {
      fail(blk + "list lengths do not match");
      continue;
    }
    for (int e : eps)
      if (e < 0 || e % T != 0) fail(blk + "epsilon element " + std::to_string(e) + " is not a multiple of T");
    IntList de = list_add(inv.delta[i], eps);
    if (!sublist_le(inv.phi[i], de)) fail(blk + "delta + epsilon < phi");
    if (!sublist_le(es, de)) fail(blk + "delta + epsilon < eta*");
    if (!sublist_le(eta, inv.sigma[i])) fail(blk + "eta > sigma");
    if (index_set(es) != index_set(eps)) fail(blk + "J(eta*) != J(epsilon)");
    IntList pool = eta;
    for (int v : es) {
      if (v == 0) continue;
      auto it = std::find(pool.begin(), pool.end(), v);
      if (it == pool.end()) {
        fail(blk + "eta* is not a selection of eta");
        break;
      }
      pool.erase(it);
    }
    if (list_sum(eps) != list_sum(eta) || list_sum(eta) != list_sum(om))
      r.notes.push_back(blk + "sums differ within the block");
    if (!dominates(eta, om)) r.notes.push_back(blk + "eta does not dominate omega within the block");
  }
  IntList E = concat(c.epsilon), H = concat(c.eta), W = concat(c.omega);
  if (list_sum(E) != list_sum(H) || list_sum(H) != list_sum(W))
    fail("sum epsilon = " + std::to_string(list_sum(E)) + ", sum eta = " + std::to_string(list_sum(H)) +
         ", sum omega = " + std::to_string(list_sum(W)));
  if (!dominates(H, W)) fail("eta " + to_string(H) + " does not dominate omega " + to_string(W));
  return r;
}

namespace detail {

// Injective choice of nonzero eta elements for the positions J(epsilon),
// respecting delta + epsilon >= eta*.  assign[j] is the eta index used at j.
inline std::optional<std::vector<int>> select_eta_star(const IntList& eta, const IntList& eps, const IntList& delta) {
  std::set<int> j = index_set(eps);
  std::vector<int> pos(j.begin(), j.end());
  std::vector<int> assign(eps.size(), -1);
  std::vector<bool> used(eta.size(), false);
  std::function<bool(std::size_t)> go = [&](std::size_t k) {
    if (k == pos.size()) return true;
    int j = pos[k];
    for (std::size_t e = 0; e < eta.size(); ++e) {
      if (used[e] || eta[e] == 0 || eta[e] > delta[j] + eps[j]) continue;
      used[e] = true;
      assign[j] = static_cast<int>(e);
      if (go(k + 1)) return true;
      used[e] = false;
      assign[j] = -1;
    }
    return false;
  };
  if (!go(0)) return std::nullopt;
  return assign;
}

// Calls f on every list with 0 <= x_k <= bound_k and sum x = total, in
// lexicographic order; stops when f returns true.
inline bool enumerate_bounded(const IntList& bound, int total, const std::function<bool(const IntList&)>& f) {
  IntList x(bound.size(), 0);
  std::function<bool(std::size_t, int)> go = [&](std::size_t k, int left) {
    if (k == bound.size()) return left == 0 && f(x);
    int rest = 0;
    for (std::size_t q = k + 1; q < bound.size(); ++q) rest += bound[q];
    for (int v = 0; v <= std::min(bound[k], left); ++v) {
      if (left - v > rest) continue;
      x[k] = v;
      if (go(k + 1, left - v)) return true;
    }
    return false;
  };
  return go(0, total);
}

}  // namespace detail

struct SearchOptions {
  int step10_bound = 64;
};

struct SearchResult {
  CandidateLists lists;
  RatMat Z1;
  std::vector<std::vector<int>> assignment;  // per block: eta index placed at each channel, or -1
  std::vector<int> connected;                // coupled chains used beyond their free part
  int step10_iterations = 0;
  Theorem2Report check;
};

inline std::vector<IntList> initial_epsilon(const DecouplingInvariants& inv, int T) {
  std::vector<IntList> eps;
  for (std::size_t i = 0; i < inv.phi.size(); ++i) {
    IntList e;
    for (std::size_t j = 0; j < inv.phi[i].size(); ++j) {
      int v = std::max(0, inv.phi[i][j] - inv.delta[i][j]);
      e.push_back((v + T - 1) / T * T);
    }
    eps.push_back(e);
  }
  return eps;
}

inline SearchResult search_candidate_lists(const DecouplingInvariants& inv, const ChainData& chains, int p, int T,
                                           const SearchOptions& opt = {}) {
  SearchResult res;
  CandidateLists& c = res.lists;
  c.epsilon = initial_epsilon(inv, T);
  res.Z1 = z1_matrix(inv.interactor, inv.f, inv.delta, c.epsilon, p, T);
  c.omega = omega_of(res.Z1, p, T);
  int total = list_sum(concat(c.epsilon));
  IntList W = concat(c.omega);

  auto attempt = [&](const IntList& bound) {
    return detail::enumerate_bounded(bound, total, [&](const IntList& flat) {
      if (!dominates(flat, W)) return false;
      std::vector<IntList> eta;
      std::size_t at = 0;
      for (const auto& s : inv.sigma) {
        eta.emplace_back(flat.begin() + at, flat.begin() + at + s.size());
        at += s.size();
      }
      std::vector<IntList> star;
      std::vector<std::vector<int>> assign;
      for (int i = 0; i < T; ++i) {
        auto a = detail::select_eta_star(eta[i], c.epsilon[i], inv.delta[i]);
        if (!a) return false;
        IntList es(p, 0);
        for (int j = 0; j < p; ++j)
          if ((*a)[j] >= 0) es[j] = eta[i][(*a)[j]];
        star.push_back(es);
        assign.push_back(*a);
      }
      CandidateLists trial = c;
      trial.eta = eta;
      trial.eta_star = star;
      Theorem2Report rep = theorem2_check(inv, trial, T);
      if (!rep.ok) return false;
      c = trial;
      res.assignment = assign;
      res.check = rep;
      return true;
    });
  };

  IntList free_bound = concat(inv.sigma_free);
  if (attempt(free_bound)) return res;

  // Connect selections of coupled chains beyond their free part.
  std::vector<int> coupled;
  for (std::size_t k = 0; k < chains.chains.size(); ++k)
    if (chains.chains[k].free_length < static_cast<int>(chains.chains[k].vectors.size()))
      coupled.push_back(static_cast<int>(k));
  if (coupled.empty()) throw Error(ErrorKind::NotFound, "no candidate lists satisfy the solvability conditions");
  IntList full = concat(inv.sigma);
  long subsets = (1L << std::min<std::size_t>(coupled.size(), 30)) - 1;
  for (long mask = 1; mask <= subsets; ++mask) {
    if (++res.step10_iterations > opt.step10_bound)
      throw Error(ErrorKind::BoundExceeded, "chain-connection iteration bound " + std::to_string(opt.step10_bound) +
                                                " reached; search inconclusive");
    IntList bound = free_bound;
    std::vector<int> chosen;
    for (std::size_t q = 0; q < coupled.size(); ++q)
      if (mask >> q & 1) {
        bound[coupled[q]] = full[coupled[q]];
        chosen.push_back(coupled[q]);
      }
    if (attempt(bound)) {
      res.connected = chosen;
      return res;
    }
  }
  throw Error(ErrorKind::NotFound, "no candidate lists satisfy the solvability conditions");
}

// ---------------------------------------------------------------------------
// Compensator construction and realization

struct CompensatorParts {
  RatMat Z1, V22, V21, Z2, Vbar, Zbar;
  QMatrix Lbar;
  RatMat target;                 // channel-diagonal closed-loop transfer aimed for
  std::vector<int> extra_choice; // per extra input: column of Z driven by it, or -1
};

namespace detail {

inline RatMat channel_diagonal_part(const RatMat& X, int p) {
  RatMat Y(X.rows(), X.cols());
  for (int r = 0; r < X.rows(); ++r)
    for (int c = 0; c < X.cols(); ++c)
      if (r % p == c % p) Y(r, c) = X(r, c);
  return Y;
}

// Block-diagonal F, G with (I - F S)^{-1} G = Z, found by matching series
// coefficients of Z - G = F (S Z) and then checked exactly.
inline std::optional<RealizationResult> realize_direct(const CyclicBundle& b, const RatMat& Z) {
  int m = b.m, T = b.T, N = b.total_states(), q = Z.cols() / T;
  QMatrix G0 = value_at_infinity(Z);
  std::vector<int> ms(T, m), qs(T, q);
  if (!block_diagonal(G0, ms, qs)) return std::nullopt;
  RatMat X = b.Sbar * Z;
  int K = 2 * N + 2;
  auto Zk = series_coeffs(Z, K + 1);
  auto Xk = series_coeffs(X, K + 1);
  QMatrix F(m * T, N);
  for (int i = 0; i < T; ++i) {
    int lo = b.offsets[i], len = b.state_dims[i];
    for (int r = m * i; r < m * (i + 1); ++r) {
      QMatrix sys(K * Z.cols(), len), rhs(K * Z.cols(), 1);
      for (int k = 1; k <= K; ++k)
        for (int c = 0; c < Z.cols(); ++c) {
          for (int s = 0; s < len; ++s) sys((k - 1) * Z.cols() + c, s) = Xk[k](lo + s, c);
          rhs((k - 1) * Z.cols() + c, 0) = Zk[k](r, c);
        }
      auto x = solve(sys, rhs);
      if (!x) return std::nullopt;
      for (int s = 0; s < len; ++s) F(r, lo + s) = (*x)(s, 0);
    }
  }
  if (Z - to_ratmat(F) * X != to_ratmat(G0)) return std::nullopt;
  RealizationResult res;
  res.Fbar = F;
  res.Gbar = G0;
  res.law.F.resize(T);
  res.law.G.resize(T);
  for (int i = 0; i < T; ++i) {
    int t = mod(b.tau + i, T);
    res.law.F[t] = F.block(m * i, b.offsets[i], m, b.state_dims[i]);
    res.law.G[t] = G0.block(m * i, q * i, m, q);
  }
  return res;
}

inline bool closed_loop_ok(const PeriodicSystem& s, const FeedbackLaw& law, long tau) {
  PeriodicSystem c = apply_feedback(s, law);
  auto rep = verify_decoupled(c);
  return rep.diagonal && rep.stable && is_nilpotent(monodromy(c, tau).psi);
}

}  // namespace detail

struct NonsquareDecoupling {
  CyclicBundle bundle;
  CyclicHermiteResult hermite;
  StandardForm standard;
  DecouplingInvariants invariants;
  SearchResult search;
  CompensatorParts parts;
  RealizationResult realization;
  PeriodicSystem closed;
  DecouplingReport check;
  bool nilpotent = false;
};

// Completes the m x p blocks of G to invertible m x m blocks with unit
// vectors; V(inf) is the inverse, so that V Z = L has L = [I; 0] per block.
inline CompensatorParts assemble_identity(const CyclicBundle& b, const RealizationResult& r, const RatMat& Z) {
  int m = b.m, p = b.p, T = b.T;
  QMatrix P(m * T, m * T);
  for (int i = 0; i < T; ++i) {
    QMatrix Gi = r.Gbar.block(m * i, p * i, m, p);
    if (rank(Gi) != p) throw Error(ErrorKind::ConstructionFailed, "G(t) does not have full column rank");
    QMatrix cols = Gi;
    for (int e = 0; e < m && cols.cols() < m; ++e) {
      QMatrix u(m, 1);
      u(e, 0) = 1;
      if (!detail::in_span(cols, u)) cols = hstack(cols, u);
    }
    P.set_block(m * i, m * i, cols);
  }
  CompensatorParts parts;
  QMatrix V0 = inverse(P);
  parts.Vbar = to_ratmat(V0) * (RatMat::identity(m * T) - to_ratmat(r.Fbar) * b.Sbar);
  parts.Zbar = Z;
  parts.Lbar = V0 * r.Gbar;
  if (parts.Vbar * parts.Zbar != to_ratmat(parts.Lbar))
    throw Error(ErrorKind::ConstructionFailed, "identity V Z = L failed");
  std::vector<int> piv, ext;
  for (int c = 0; c < m * T; ++c) (c % m < p ? piv : ext).push_back(c);
  parts.V22 = parts.Vbar.select_rows(ext).select_cols(ext);
  parts.V21 = parts.Vbar.select_rows(ext).select_cols(piv);
  parts.Z2 = parts.Zbar.select_rows(ext);
  return parts;
}

inline NonsquareDecoupling decouple_nonsquare(const PeriodicSystem& s, long tau = 0, const SearchOptions& opt = {}) {
  s.validate();
  if (s.m <= s.p) throw Error(ErrorKind::DimensionMismatch, "nonsquare decoupling needs m > p; use the square path");
  require_stable_reachable(s);
  int m = s.m, p = s.p, T = s.T;
  NonsquareDecoupling out;
  out.bundle = build_cyclic(s, tau);
  out.hermite = cyclic_hermite(out.bundle);
  out.standard = standard_form(s, out.bundle, out.hermite);
  out.invariants = decoupling_invariants(out.hermite, out.standard.chains, p, m, T);
  out.search = search_candidate_lists(out.invariants, out.standard.chains, p, T, opt);

  const RatMat& Delta = out.hermite.hermite.H;
  std::vector<int> piv, ext;
  for (int c = 0; c < m * T; ++c) (c % m < p ? piv : ext).push_back(c);
  RatMat Dp = Delta.select_cols(piv), De = Delta.select_cols(ext);
  RatMat Dp_inv = inverse(Dp);
  RatMat target = detail::channel_diagonal_part(Dp * out.search.Z1, p);

  // Each extra input drives nothing or one channel of its own block.
  std::vector<std::vector<int>> options;
  for (int e : ext) {
    std::vector<int> o{-1};
    int blk = e / m;
    for (int j = 0; j < p; ++j) o.push_back(p * blk + j);
    options.push_back(o);
  }
  std::vector<int> guided(ext.size(), -1);
  for (int i = 0; i < T; ++i)
    for (int j = 0; j < p; ++j) {
      int k = out.search.assignment[i][j];
      if (k >= 0) guided[i * (m - p) + k] = p * i + j;
    }
  std::vector<std::vector<int>> order{guided};
  std::vector<int> idx(ext.size(), 0);
  while (true) {
    std::vector<int> ch;
    for (std::size_t k = 0; k < ext.size(); ++k) ch.push_back(options[k][idx[k]]);
    if (ch != guided) order.push_back(ch);
    std::size_t k = ext.size();
    while (k > 0 && ++idx[k - 1] == static_cast<int>(options[k - 1].size())) idx[--k] = 0;
    if (k == 0) break;
  }

  for (const auto& choice : order) {
    RatMat Ze(static_cast<int>(ext.size()), p * T);
    for (std::size_t k = 0; k < ext.size(); ++k)
      if (choice[k] >= 0) Ze(static_cast<int>(k), choice[k]) = RatFun(1);
    RatMat Zp = Dp_inv * (target - De * Ze);
    if (!is_over_S(Zp)) continue;
    RatMat Z(m * T, p * T);
    for (std::size_t k = 0; k < piv.size(); ++k)
      for (int c = 0; c < p * T; ++c) Z(piv[k], c) = Zp(static_cast<int>(k), c);
    for (std::size_t k = 0; k < ext.size(); ++k)
      for (int c = 0; c < p * T; ++c) Z(ext[k], c) = Ze(static_cast<int>(k), c);
    RatMat Ztot = out.hermite.hermite.U * Z;
    auto direct = detail::realize_direct(out.bundle, Ztot);
    if (!direct || !detail::closed_loop_ok(s, direct->law, tau)) continue;

    CompensatorParts parts = assemble_identity(out.bundle, *direct, Ztot);
    parts.Z1 = out.search.Z1;
    parts.target = target;
    parts.extra_choice = choice;
    // Realize V Z = L in the form F = -V(inf)^{-1} K, G = V(inf)^{-1} L.
    // The direct law is kept when that form is not realizable or does not decouple.
    out.realization = *direct;
    try {
      RealizationResult via_v = realize_compensator(parts.Vbar, out.bundle, Convention::Nonsquare, parts.Lbar);
      if (detail::closed_loop_ok(s, via_v.law, tau)) out.realization = via_v;
    } catch (const Error&) {
    }
    out.parts = parts;
    out.closed = apply_feedback(s, out.realization.law);
    out.check = verify_decoupled(out.closed);
    out.nilpotent = is_nilpotent(monodromy(out.closed, tau).psi);
    if (build_cyclic(out.closed, tau).Wbar != target)
      throw Error(ErrorKind::ConstructionFailed, "closed loop differs from the target transfer");
    return out;
  }
  throw Error(ErrorKind::ConstructionFailed, "no extra-input assignment yields a realizable compensator");
}

}  // namespace perdec
