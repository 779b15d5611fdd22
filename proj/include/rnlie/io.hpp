#pragma once

// Algebra files and JSON helpers.
//
// {"dim": n, "scalars": "rational" | "float",
//  "brackets": [[i, j, [[k, "c"], ...]], ...]}
// with 1-based indices, i < j, and c a decimal or "p/q" string.

#include "rnlie/bracket.hpp"
#include "rnlie/errors.hpp"
#include "rnlie/rational.hpp"

#include <json.hpp>

#include <Eigen/Dense>

#include <concepts>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace rnlie {

using json = nlohmann::ordered_json;

struct Algebra {
  ScalarKind scalars = ScalarKind::Rational;
  ExactBracket bracket;

  Bracket numeric() const { return bracket.cast<double>(); }
};

// ---------------------------------------------------------------------------
// Number formatting

inline json encode(double x) { return format_double(x); }
template <class T>
  requires std::same_as<T, Rational>
json encode(const T& x) {
  return format_rational(x);
}

inline json encode(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(encode(x));
  return a;
}
inline json encode(const std::vector<Rational>& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(encode(x));
  return a;
}
inline json encode(const Eigen::VectorXd& v) { return encode(std::vector<double>(v.data(), v.data() + v.size())); }

/// Row-major nested arrays.
inline json encode(const Eigen::MatrixXd& m) {
  json a = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(encode(m(r, c)));
    a.push_back(row);
  }
  return a;
}

/// Scalar from a JSON number or a decimal / "p/q" string.
inline Rational scalar_from_json(const json& v, const std::string& where) {
  try {
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_number_integer()) return Rational(v.get<long long>());
    if (v.is_number_float()) return Rational(v.get<double>());
  } catch (const std::invalid_argument& e) {
    throw FormatError(where + ": " + e.what());
  }
  throw FormatError(where + ": expected a number or a numeric string");
}

// ---------------------------------------------------------------------------
// Algebra files

inline json algebra_to_json(const Algebra& a) {
  json j;
  j["dim"] = a.bracket.dim();
  j["scalars"] = a.scalars == ScalarKind::Rational ? "rational" : "float";
  std::map<std::pair<int, int>, json> rows;
  for (const auto& [t, c] : a.bracket.constants()) {
    json val = a.scalars == ScalarKind::Rational ? encode(c) : encode(to_double(c));
    rows[{t.i, t.j}].push_back(json::array({t.k + 1, val}));
  }
  json br = json::array();
  for (const auto& [p, targets] : rows) br.push_back(json::array({p.first + 1, p.second + 1, targets}));
  j["brackets"] = br;
  return j;
}

inline Algebra algebra_from_json(const json& j) {
  if (!j.is_object()) throw FormatError("algebra: top level must be an object");
  if (!j.contains("dim") || !j["dim"].is_number_integer()) throw FormatError("dim: missing or not an integer");
  const int n = j["dim"].get<int>();
  if (n < 1) throw FormatError("dim: must be positive");
  Algebra a;
  if (j.contains("scalars")) {
    if (!j["scalars"].is_string()) throw FormatError("scalars: must be \"rational\" or \"float\"");
    auto s = j["scalars"].get<std::string>();
    if (s == "rational") a.scalars = ScalarKind::Rational;
    else if (s == "float") a.scalars = ScalarKind::Float;
    else throw FormatError("scalars: must be \"rational\" or \"float\", got \"" + s + "\"");
  }
  if (!j.contains("brackets") || !j["brackets"].is_array()) throw FormatError("brackets: missing or not an array");
  std::vector<ExactBracket::Entry> entries;
  std::set<std::pair<int, int>> pairs;
  const auto& br = j["brackets"];
  for (std::size_t r = 0; r < br.size(); ++r) {
    const std::string where = "brackets[" + std::to_string(r) + "]";
    const auto& row = br[r];
    if (!row.is_array() || row.size() != 3) throw FormatError(where + ": expected [i, j, [[k, c], ...]]");
    if (!row[0].is_number_integer() || !row[1].is_number_integer()) throw FormatError(where + ": i and j must be integers");
    int i = row[0].get<int>(), jj = row[1].get<int>();
    if (i < 1 || i > n || jj < 1 || jj > n) throw FormatError(where + ": index out of range 1.." + std::to_string(n));
    if (i >= jj) throw FormatError(where + ": entries need i < j, got (" + std::to_string(i) + ", " + std::to_string(jj) + ")");
    if (!pairs.insert({i, jj}).second) throw FormatError(where + ": duplicate pair (" + std::to_string(i) + ", " + std::to_string(jj) + ")");
    if (!row[2].is_array()) throw FormatError(where + "[2]: expected a list of [k, c]");
    std::set<int> targets;
    for (std::size_t q = 0; q < row[2].size(); ++q) {
      const std::string w2 = where + "[2][" + std::to_string(q) + "]";
      const auto& kc = row[2][q];
      if (!kc.is_array() || kc.size() != 2 || !kc[0].is_number_integer()) throw FormatError(w2 + ": expected [k, c]");
      int k = kc[0].get<int>();
      if (k < 1 || k > n) throw FormatError(w2 + ": index out of range 1.." + std::to_string(n));
      if (!targets.insert(k).second) throw FormatError(w2 + ": duplicate target " + std::to_string(k));
      Rational c = scalar_from_json(kc[1], w2);
      if (a.scalars == ScalarKind::Float) c = Rational(to_double(c));
      entries.push_back({i - 1, jj - 1, k - 1, c});
    }
  }
  a.bracket = ExactBracket(n, entries);
  return a;
}

/// Parses text; JSON syntax errors carry the line and column.
inline Algebra parse_algebra(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    // locate the byte offset as line:column
    std::size_t line = 1, col = 1;
    for (std::size_t p = 0; p + 1 < e.byte && p < text.size(); ++p) {
      if (text[p] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw FormatError("line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + e.what());
  }
  return algebra_from_json(j);
}

inline Algebra load_algebra(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_algebra(ss.str());
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

inline std::string dump(const json& j) { return j.dump(2); }

inline void save_algebra(const Algebra& a, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path);
  out << dump(algebra_to_json(a)) << "\n";
}

// ---------------------------------------------------------------------------
// Derivation arguments

/// "[1, 1, 2]" (diagonal) or "[[...], ...]" (row-major matrix); entries may be
/// numbers or numeric strings.
inline Eigen::MatrixXd parse_derivation(const std::string& text, int n) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("derivation: ") + e.what());
  }
  if (!j.is_array()) throw FormatError("derivation: expected a JSON array");
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  if (!j.empty() && j[0].is_array()) {
    if (static_cast<int>(j.size()) != n) throw FormatError("derivation: expected " + std::to_string(n) + " rows");
    for (int r = 0; r < n; ++r) {
      if (!j[r].is_array() || static_cast<int>(j[r].size()) != n) throw FormatError("derivation[" + std::to_string(r) + "]: expected " + std::to_string(n) + " entries");
      for (int c = 0; c < n; ++c) d(r, c) = to_double(scalar_from_json(j[r][c], "derivation[" + std::to_string(r) + "][" + std::to_string(c) + "]"));
    }
    return d;
  }
  if (static_cast<int>(j.size()) != n) throw FormatError("derivation: expected " + std::to_string(n) + " diagonal entries");
  for (int i = 0; i < n; ++i) d(i, i) = to_double(scalar_from_json(j[i], "derivation[" + std::to_string(i) + "]"));
  return d;
}

/// Exact diagonal entries, or nullopt for a matrix argument.
inline std::optional<std::vector<Rational>> parse_diagonal_exact(const std::string& text, int n) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("derivation: ") + e.what());
  }
  if (!j.is_array() || (!j.empty() && j[0].is_array())) return std::nullopt;
  if (static_cast<int>(j.size()) != n) throw FormatError("derivation: expected " + std::to_string(n) + " diagonal entries");
  std::vector<Rational> out;
  for (int i = 0; i < n; ++i) out.push_back(scalar_from_json(j[i], "derivation[" + std::to_string(i) + "]"));
  return out;
}

}  // namespace rnlie
