#pragma once

// Finite lists of nonnegative integers: sums, index sets, sublists and
// dominance.

#include <algorithm>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "perdec/rational.hpp"

namespace perdec {

using IntList = std::vector<int>;

inline int list_sum(const IntList& l) { return std::accumulate(l.begin(), l.end(), 0); }

// Zero-based positions of the nonzero elements.
inline std::set<int> index_set(const IntList& l) {
  std::set<int> j;
  for (std::size_t i = 0; i < l.size(); ++i)
    if (l[i] != 0) j.insert(static_cast<int>(i));
  return j;
}

inline bool sublist_le(const IntList& mu, const IntList& lambda) {
  if (mu.size() != lambda.size()) throw Error(ErrorKind::LengthMismatch, "sublist comparison needs equal lengths");
  for (std::size_t i = 0; i < mu.size(); ++i)
    if (mu[i] > lambda[i]) return false;
  return true;
}

inline IntList list_add(const IntList& a, const IntList& b) {
  if (a.size() != b.size()) throw Error(ErrorKind::LengthMismatch, "list sum needs equal lengths");
  IntList r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline IntList list_sub(const IntList& a, const IntList& b) {
  if (!sublist_le(b, a)) throw Error(ErrorKind::LengthMismatch, "list difference needs a sublist");
  IntList r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

// lambda dominates mu: pad with zeros to a common length, sort both
// nondecreasing, and compare prefix sums.
inline bool dominates(IntList lambda, IntList mu) {
  std::size_t n = std::max(lambda.size(), mu.size());
  lambda.resize(n, 0);
  mu.resize(n, 0);
  std::sort(lambda.begin(), lambda.end());
  std::sort(mu.begin(), mu.end());
  long a = 0, b = 0;
  for (std::size_t i = 0; i < n; ++i) {
    a += lambda[i];
    b += mu[i];
    if (a < b) return false;
  }
  return true;
}

inline IntList concat(const std::vector<IntList>& lists) {
  IntList r;
  for (const auto& l : lists) r.insert(r.end(), l.begin(), l.end());
  return r;
}

inline std::string to_string(const IntList& l) {
  std::string s = "(";
  for (std::size_t i = 0; i < l.size(); ++i) s += (i ? "," : "") + std::to_string(l[i]);
  return s + ")";
}

}  // namespace perdec
