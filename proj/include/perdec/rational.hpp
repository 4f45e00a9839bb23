#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <string_view>

namespace perdec {

using Q = mpq_class;

enum class ErrorKind {
  InvalidSystem,
  Parse,
  NotMember,
  UnsupportedFactor,
  DivisionByZero,
  ZeroElement,
  Singular,
  NotStable,
  NotOutputReachable,
  NotSolvable,
  NotBlockDiagonal,
  NoConstantSolution,
  NotFound,
  BoundExceeded,
  ConstructionFailed,
  DimensionMismatch,
  LengthMismatch,
  ZeroColumn,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidSystem: return "ShapeError";
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::NotMember: return "NotMember";
    case ErrorKind::UnsupportedFactor: return "UnsupportedFactor";
    case ErrorKind::DivisionByZero: return "ZeroDivisor";
    case ErrorKind::ZeroElement: return "ZeroElement";
    case ErrorKind::Singular: return "Singular";
    case ErrorKind::NotStable: return "NotStable";
    case ErrorKind::NotOutputReachable: return "NotOutputReachable";
    case ErrorKind::NotSolvable: return "NotSolvable";
    case ErrorKind::NotBlockDiagonal: return "NotBlockDiagonal";
    case ErrorKind::NoConstantSolution: return "NoConstantSolution";
    case ErrorKind::NotFound: return "NotFound";
    case ErrorKind::BoundExceeded: return "BoundExceeded";
    case ErrorKind::ConstructionFailed: return "ConstructionFailed";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::ZeroColumn: return "ZeroColumn";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Accepts "a", "-a", "a/b".  Whitespace around the value is ignored.
inline Q parse_rational(std::string_view text) {
  std::string s(text);
  auto b = s.find_first_not_of(" \t");
  auto e = s.find_last_not_of(" \t");
  if (b == std::string::npos) throw Error(ErrorKind::Parse, "empty rational");
  s = s.substr(b, e - b + 1);
  if (!s.empty() && s[0] == '+') s.erase(0, 1);
  auto slash = s.find('/');
  auto digits_ok = [](const std::string& t, bool sign) {
    std::size_t i = (sign && !t.empty() && t[0] == '-') ? 1 : 0;
    if (i >= t.size()) return false;
    for (; i < t.size(); ++i)
      if (t[i] < '0' || t[i] > '9') return false;
    return true;
  };
  std::string num = slash == std::string::npos ? s : s.substr(0, slash);
  std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
  if (!digits_ok(num, true) || !digits_ok(den, false))
    throw Error(ErrorKind::Parse, "bad rational '" + std::string(text) + "'");
  mpz_class n(num, 10), d(den, 10);
  if (d == 0) throw Error(ErrorKind::Parse, "zero denominator in '" + std::string(text) + "'");
  Q q(n, d);
  q.canonicalize();
  return q;
}

inline std::string to_string(const Q& q) { return q.get_str(); }

inline Q abs(const Q& q) { return q < 0 ? Q(-q) : q; }

}  // namespace perdec
