#pragma once

// JSON documents for systems and feedback laws, and text rendering of
// matrices.  Numbers are exact: JSON integers or "p/q" strings.

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "perdec/periodic.hpp"
#include "perdec/ratfun.hpp"

namespace perdec {

using Json = nlohmann::ordered_json;

inline Q rational_from_json(const Json& j) {
  if (j.is_number_integer()) return Q(mpz_class(std::to_string(j.get<long long>()), 10));
  if (j.is_string()) return parse_rational(j.get<std::string>());
  throw Error(ErrorKind::Parse, "expected an integer or a \"p/q\" string, got " + j.dump());
}

inline Json rational_to_json(const Q& q) {
  if (q.get_den() == 1 && q.get_num().fits_slong_p()) return Json(q.get_num().get_si());
  return Json(q.get_str());
}

// An empty list [] stands for a matrix with zero rows; `cols` fixes its width.
inline QMatrix matrix_from_json(const Json& j, int rows, int cols, const std::string& what) {
  if (!j.is_array()) throw Error(ErrorKind::Parse, what + " must be an array of rows");
  if (static_cast<int>(j.size()) != rows)
    throw Error(ErrorKind::InvalidSystem, what + " must have " + std::to_string(rows) + " rows, got " +
                                              std::to_string(j.size()));
  QMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    const Json& row = j[i];
    if (!row.is_array() || static_cast<int>(row.size()) != cols)
      throw Error(ErrorKind::InvalidSystem, what + " row " + std::to_string(i) + " must have " +
                                                std::to_string(cols) + " entries");
    for (int c = 0; c < cols; ++c) m(i, c) = rational_from_json(row[c]);
  }
  return m;
}

inline Json matrix_to_json(const QMatrix& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(rational_to_json(m(i, c)));
    rows.push_back(row);
  }
  return rows;
}

inline Json poly_to_json(const Poly& p) {
  Json a = Json::array();
  for (const auto& c : p.coeffs()) a.push_back(rational_to_json(c));
  return a;
}

// Machine format for rational functions: ascending coefficients in z.
inline Json ratfun_to_json(const RatFun& f) { return Json{{"num", poly_to_json(f.num())}, {"den", poly_to_json(f.den())}}; }

inline RatFun ratfun_from_json(const Json& j) {
  auto poly = [](const Json& a) {
    std::vector<Q> c;
    for (const auto& x : a) c.push_back(rational_from_json(x));
    return Poly(c);
  };
  return RatFun(poly(j.at("num")), poly(j.at("den")));
}

inline Json ratmat_to_json(const RatMat& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(ratfun_to_json(m(i, c)));
    rows.push_back(row);
  }
  return rows;
}

inline Json ratmat_to_text_json(const RatMat& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(i, c).to_string());
    rows.push_back(row);
  }
  return rows;
}

inline std::vector<int> int_list_from_json(const Json& j, const std::string& what) {
  if (!j.is_array()) throw Error(ErrorKind::Parse, what + " must be an array");
  std::vector<int> v;
  for (const auto& x : j) {
    if (!x.is_number_integer()) throw Error(ErrorKind::Parse, what + " entries must be integers");
    v.push_back(x.get<int>());
  }
  return v;
}

inline PeriodicSystem system_from_json(const Json& j) {
  PeriodicSystem s;
  try {
    s.T = j.at("period").get<int>();
    s.dims = int_list_from_json(j.at("dims"), "dims");
    s.m = j.at("m").get<int>();
    s.p = j.at("p").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("system document: ") + e.what());
  }
  if (s.T < 1 || static_cast<int>(s.dims.size()) != s.T)
    throw Error(ErrorKind::InvalidSystem, "dims must list one state dimension per time step");
  auto family = [&](const char* key, auto rows, auto cols) {
    if (!j.contains(key) || !j[key].is_array() || static_cast<int>(j[key].size()) != s.T)
      throw Error(ErrorKind::InvalidSystem, std::string(key) + " must be an array of " + std::to_string(s.T) +
                                                " matrices");
    std::vector<QMatrix> out;
    for (int t = 0; t < s.T; ++t)
      out.push_back(matrix_from_json(j[key][t], rows(t), cols(t), std::string(key) + "[" + std::to_string(t) + "]"));
    return out;
  };
  auto n = [&](int t) { return s.dims[mod(t, s.T)]; };
  s.A = family("A", [&](int t) { return n(t + 1); }, [&](int t) { return n(t); });
  s.B = family("B", [&](int t) { return n(t + 1); }, [&](int) { return s.m; });
  s.C = family("C", [&](int) { return s.p; }, [&](int t) { return n(t); });
  s.D = family("D", [&](int) { return s.p; }, [&](int) { return s.m; });
  s.validate();
  return s;
}

inline Json system_to_json(const PeriodicSystem& s) {
  Json j;
  j["period"] = s.T;
  j["dims"] = s.dims;
  j["m"] = s.m;
  j["p"] = s.p;
  for (auto [key, fam] : {std::pair{"A", &s.A}, std::pair{"B", &s.B}, std::pair{"C", &s.C}, std::pair{"D", &s.D}}) {
    Json a = Json::array();
    for (const auto& mtx : *fam) a.push_back(matrix_to_json(mtx));
    j[key] = a;
  }
  return j;
}

// Gains F(t): m x n(t), G(t): m x q.  q defaults to the row count of the first G.
inline FeedbackLaw law_from_json(const Json& j, const PeriodicSystem& s) {
  const Json& body = j.contains("law") ? j["law"] : j;
  if (!body.contains("F") || !body.contains("G")) throw Error(ErrorKind::Parse, "feedback law needs F and G");
  const Json &F = body["F"], &G = body["G"];
  if (!F.is_array() || !G.is_array() || static_cast<int>(F.size()) != s.T || static_cast<int>(G.size()) != s.T)
    throw Error(ErrorKind::InvalidSystem, "feedback law must have T gains F and G");
  FeedbackLaw law;
  int q = G[0].empty() ? 0 : static_cast<int>(G[0][0].size());
  for (int t = 0; t < s.T; ++t) {
    law.F.push_back(matrix_from_json(F[t], s.m, s.n(t), "F[" + std::to_string(t) + "]"));
    law.G.push_back(matrix_from_json(G[t], s.m, q, "G[" + std::to_string(t) + "]"));
  }
  return law;
}

inline Json law_to_json(const FeedbackLaw& law) {
  Json F = Json::array(), G = Json::array();
  for (const auto& f : law.F) F.push_back(matrix_to_json(f));
  for (const auto& g : law.G) G.push_back(matrix_to_json(g));
  return Json{{"F", F}, {"G", G}};
}

inline Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Parse, "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, path + ": " + e.what());
  }
}

// Aligned text grid; block separators after every `rb` rows / `cb` columns
// when those are positive.
template <class T, class Fmt>
std::string render_grid(const Matrix<T>& m, Fmt fmt, int rb = 0, int cb = 0) {
  std::vector<std::vector<std::string>> cells(m.rows(), std::vector<std::string>(m.cols()));
  std::vector<std::size_t> width(m.cols(), 1);
  for (int i = 0; i < m.rows(); ++i)
    for (int c = 0; c < m.cols(); ++c) {
      cells[i][c] = fmt(m(i, c));
      width[c] = std::max(width[c], cells[i][c].size());
    }
  std::ostringstream os;
  std::size_t total = 0;
  for (int c = 0; c < m.cols(); ++c) total += width[c] + 2 + ((cb > 0 && c > 0 && c % cb == 0) ? 2 : 0);
  for (int i = 0; i < m.rows(); ++i) {
    if (rb > 0 && i > 0 && i % rb == 0) os << "  " << std::string(total, '-') << "\n";
    os << "  ";
    for (int c = 0; c < m.cols(); ++c) {
      if (cb > 0 && c > 0 && c % cb == 0) os << "| ";
      os << std::string(width[c] - cells[i][c].size(), ' ') << cells[i][c] << "  ";
    }
    os << "\n";
  }
  if (m.rows() == 0) os << "  (empty)\n";
  return os.str();
}

inline std::string render(const QMatrix& m, int rb = 0, int cb = 0) {
  return render_grid(m, [](const Q& q) { return q.get_str(); }, rb, cb);
}

inline std::string render(const RatMat& m, int rb = 0, int cb = 0) {
  return render_grid(m, [](const RatFun& f) { return f.to_string(); }, rb, cb);
}

inline std::ostream& operator<<(std::ostream& os, const QMatrix& m) { return os << "\n" << render(m); }
inline std::ostream& operator<<(std::ostream& os, const RatMat& m) { return os << "\n" << render(m); }
inline std::ostream& operator<<(std::ostream& os, const RatFun& f) { return os << f.to_string(); }
inline std::ostream& operator<<(std::ostream& os, const Poly& p) { return os << p.to_string(); }

}  // namespace perdec
