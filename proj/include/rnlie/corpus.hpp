#pragma once

// Named algebras used by the tests, the acceptance suite and the CLI.

#include "rnlie/bracket.hpp"
#include "rnlie/errors.hpp"
#include "rnlie/rational.hpp"

#include <string>
#include <tuple>
#include <vector>

namespace rnlie {

struct CorpusEntry {
  std::string name;    // canonical "name" or "name:param"
  ExactBracket bracket;
  int step = -1;       // nilpotency step, -1 when not nilpotent
  std::string note;    // classical description

  Bracket numeric() const { return bracket.cast<double>(); }
};

namespace detail {

inline ExactBracket make_bracket(int n, const std::vector<std::tuple<int, int, int, int>>& one_based) {
  std::vector<ExactBracket::Entry> e;
  for (auto [i, j, k, c] : one_based) e.push_back({i - 1, j - 1, k - 1, Rational(c)});
  return ExactBracket(n, e);
}

inline int parse_param(const std::string& name, const std::string& param, int lo, int hi) {
  try {
    std::size_t used = 0;
    int v = std::stoi(param, &used);
    if (used != param.size() || v < lo || v > hi) throw std::out_of_range("range");
    return v;
  } catch (const std::exception&) {
    throw PreconditionError("corpus entry " + name + " needs an integer parameter in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
}

}  // namespace detail

inline const std::vector<std::string>& corpus_names() {
  static const std::vector<std::string> names{"abelian:<n>",   "heisenberg:<2m+1>", "filiform:<n>",  "tricky5",
                                              "milnor_heis",   "milnor_hyp:<n>",    "milnor_e2",     "milnor_jordan"};
  return names;
}

/// Builds a corpus entry from "name" or "name:param".
inline CorpusEntry corpus(const std::string& spec) {
  auto colon = spec.find(':');
  std::string name = spec.substr(0, colon);
  std::string param = colon == std::string::npos ? "" : spec.substr(colon + 1);
  auto need = [&](int lo, int hi) { return detail::parse_param(name, param, lo, hi); };
  auto no_param = [&] {
    if (!param.empty()) throw PreconditionError("corpus entry " + name + " takes no parameter");
  };
  CorpusEntry c;
  if (name == "abelian") {
    int n = need(1, 12);
    c = {spec, ExactBracket(n), 1, "abelian R^n"};
  } else if (name == "heisenberg") {
    int n = need(3, 13);
    if (n % 2 == 0) throw PreconditionError("heisenberg dimension must be odd");
    std::vector<std::tuple<int, int, int, int>> e;
    for (int i = 1; 2 * i < n; ++i) e.emplace_back(2 * i - 1, 2 * i, n, 1);
    c = {spec, detail::make_bracket(n, e), 2, "[e_{2i-1}, e_{2i}] = e_n"};
  } else if (name == "filiform") {
    int n = need(3, 12);
    std::vector<std::tuple<int, int, int, int>> e;
    for (int i = 2; i < n; ++i) e.emplace_back(1, i, i + 1, 1);
    c = {spec, detail::make_bracket(n, e), n - 1, "[e1, e_i] = e_{i+1}"};
  } else if (name == "tricky5") {
    no_param();
    c = {spec, detail::make_bracket(5, {{1, 2, 3, 1}, {1, 2, 4, 1}, {1, 3, 5, 1}, {1, 4, 5, 1}}), 3,
         "[e1,e2] = e3+e4, [e1,e3] = e5, [e1,e4] = e5"};
  } else if (name == "milnor_heis") {
    no_param();
    c = {spec, detail::make_bracket(3, {{1, 2, 3, 1}}), 2, "3-dim Heisenberg, [e1,e2] = e3"};
  } else if (name == "milnor_hyp") {
    int n = need(2, 12);
    std::vector<std::tuple<int, int, int, int>> e;
    for (int i = 1; i < n; ++i) e.emplace_back(n, i, i, 1);
    c = {spec, detail::make_bracket(n, e), -1, "[e_n, e_i] = e_i, real hyperbolic space"};
  } else if (name == "milnor_e2") {
    no_param();
    c = {spec, detail::make_bracket(3, {{3, 1, 2, 1}, {3, 2, 1, -1}}), -1, "Euclidean motions, [e3,e1] = e2, [e3,e2] = -e1"};
  } else if (name == "milnor_jordan") {
    no_param();
    c = {spec, detail::make_bracket(3, {{3, 1, 1, 1}, {3, 2, 1, 1}, {3, 2, 2, 1}}), -1, "[e3,e1] = e1, [e3,e2] = e1+e2"};
  } else {
    throw PreconditionError("unknown corpus entry '" + name + "'");
  }
  return c;
}

}  // namespace rnlie
