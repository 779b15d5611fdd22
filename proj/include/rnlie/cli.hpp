#pragma once

// Command-line front end. run_cli parses argv, dispatches one subcommand and
// streams JSON (or CSV) to `out`.
//
// Exit codes: 0 success, 1 usage or format error, 2 precondition failure,
// 3 unknown / inconclusive, 4 numerical failure.

#include "rnlie/certify.hpp"
#include "rnlie/cone.hpp"
#include "rnlie/corpus.hpp"
#include "rnlie/curvature.hpp"
#include "rnlie/degeneration.hpp"
#include "rnlie/derivations.hpp"
#include "rnlie/io.hpp"
#include "rnlie/moment.hpp"
#include "rnlie/random.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace rnlie {

enum ExitCode { kExitOk = 0, kExitUsage = 1, kExitPrecondition = 2, kExitUnknown = 3, kExitNumerical = 4 };

namespace cli {

/// A corpus spec ("heisenberg:5") or the path of an algebra file.
inline Algebra resolve_algebra(const std::string& arg) {
  if (arg.ends_with(".json") || std::filesystem::exists(arg)) return load_algebra(arg);
  return {ScalarKind::Rational, corpus(arg).bracket};
}

inline json weight_label(const Triple& t) { return to_string(t); }

inline json exact_matrix(const dense::Matrix<Rational>& m) {
  json a = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(encode(m(r, c)));
    a.push_back(row);
  }
  return a;
}

template <class T>
json certificate_json(const SrnCertificate<T>& c) {
  json j;
  j["method"] = to_string(c.method);
  j["derivation"] = encode(c.derivation);
  json terms = json::array();
  for (std::size_t q = 0; q < c.labels.size(); ++q) {
    json t;
    t["source"] = c.labels[q];
    t["point"] = encode(c.points[q]);
    t["coefficient"] = encode(c.coefficients[q]);
    terms.push_back(t);
  }
  j["terms"] = terms;
  j["remainder"] = encode(c.remainder);
  j["margin"] = encode(c.margin);
  return j;
}

inline json witness_json(const RnSearchResult& r) {
  json j;
  j["success"] = r.success;
  j["lambda_max"] = encode(r.lambda_max);
  j["evaluations"] = r.evaluations;
  if (r.params.h.size() > 0) {
    j["params"] = {{"c", encode(r.params.c)}, {"X", encode(r.params.X)}, {"h", encode(r.params.h)}};
  }
  return j;
}

inline json sample_json(const CurvatureSample& s) {
  return {{"t", encode(s.t)}, {"norm", encode(s.norm)}, {"lambda_max", encode(s.lambda_max)}, {"scalar", encode(s.scalar)}};
}

inline std::vector<double> diag_of(const Eigen::MatrixXd& d) {
  for (int r = 0; r < d.rows(); ++r)
    for (int c = 0; c < d.cols(); ++c)
      if (r != c && d(r, c) != 0.0) throw PreconditionError("this method needs a diagonal derivation");
  Eigen::VectorXd v = d.diagonal();
  return std::vector<double>(v.data(), v.data() + v.size());
}

inline std::vector<double> parse_vector(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(to_double(parse_rational(item)));
    } catch (const std::invalid_argument& e) {
      throw FormatError("curve exponents: " + std::string(e.what()));
    }
  }
  return out;
}

}  // namespace cli

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Curvature, moment maps and Ricci negative derivations of nilpotent Lie algebras"};
  app.require_subcommand(1);
  std::uint64_t seed = default_seed();
  int jobs = 1;
  app.add_option("--seed", seed, "random seed (default: $RNL_SEED or 20240601)");
  app.add_option("--jobs", jobs, "worker threads")->check(CLI::Range(1, 256));

  std::string algebra_arg, derivation_arg;
  auto add_algebra = [&](CLI::App* sub) {
    sub->add_option("--algebra,-a", algebra_arg, "corpus spec (e.g. heisenberg:5) or algebra JSON file")->required();
  };

  auto* ricci = app.add_subcommand("ricci", "Ricci operator of n or of the extension s_D");
  add_algebra(ricci);
  ricci->add_option("--derivation,-d", derivation_arg, "D as [diag] or [[row], ...]");

  auto* derivs = app.add_subcommand("derivations", "basis of Der(n)");
  add_algebra(derivs);

  auto* torus_cmd = app.add_subcommand("torus", "diagonal torus, weights and orthogonal Weyl group");
  add_algebra(torus_cmd);

  auto* nice_cmd = app.add_subcommand("nice", "nice-basis check");
  add_algebra(nice_cmd);

  auto* moment_cmd = app.add_subcommand("moment", "moment map m(mu) and the weights F_ij^k");
  add_algebra(moment_cmd);

  auto* hull_cmd = app.add_subcommand("hull", "vertices and facets of CH_mu");
  add_algebra(hull_cmd);

  std::string group = "diag";
  int count = 100;
  auto* orbit_cmd = app.add_subcommand("orbit-sample",
                                       "CSV of sampled diagonal moment values; columns: index, face, c_(i,j,k) hull "
                                       "coordinates (c^2 / sum c^2 per input triple), m1..mn diagonal entries");
  add_algebra(orbit_cmd);
  orbit_cmd->add_option("--group", group, "diag | torus | derivation")->check(CLI::IsMember({"diag", "torus", "derivation"}));
  orbit_cmd->add_option("--count", count, "number of samples")->check(CLI::Range(1, 1000000));
  orbit_cmd->add_option("--derivation,-d", derivation_arg, "diagonal D for --group derivation");

  std::string method = "auto";
  int budget = kDefaultSearchBudget;
  int samples = kMembershipSamples;
  auto* certify_cmd = app.add_subcommand("certify", "certify a diagonal derivation as (strongly) Ricci negative");
  add_algebra(certify_cmd);
  certify_cmd->add_option("--derivation,-d", derivation_arg, "D as [diag] or [[row], ...]")->required();
  certify_cmd->add_option("--method", method, "nice-lp | sampled-lp | search | auto")
      ->check(CLI::IsMember({"nice-lp", "sampled-lp", "search", "auto"}));
  certify_cmd->add_option("--budget", budget, "metric search evaluations")->check(CLI::Range(1, 100000000));
  certify_cmd->add_option("--samples", samples, "orbit samples for sampled-lp")->check(CLI::Range(1, 100000));

  std::string trace_level = "1";
  int resolution = 32;
  bool exact = false;
  std::string csv_path;
  auto* cone_cmd = app.add_subcommand("cone", "cross-section of the cone C(n) at fixed trace");
  add_algebra(cone_cmd);
  cone_cmd->add_option("--trace-level", trace_level, "trace level t > 0");
  cone_cmd->add_option("--resolution", resolution, "random probe directions (sampled mode)")->check(CLI::Range(0, 100000));
  cone_cmd->add_flag("--exact", exact, "require the exact section");
  cone_cmd->add_option("--csv", csv_path, "also write the vertex list as CSV (columns x1..xr, then d1..dn)");

  std::string curve_arg, predicate_arg;
  double t_max = std::ldexp(1.0, kMaxDoublings);
  auto* degen_cmd = app.add_subcommand("degenerate", "limits and curvature along a degeneration curve");
  add_algebra(degen_cmd);
  degen_cmd->add_option("--curve", curve_arg, "diag:<e1,...,en> | exp:<e1,...,en> | heintze:<[D]>")->required();
  degen_cmd->add_option("--predicate", predicate_arg, "ricci-negative | scalar-negative")
      ->check(CLI::IsMember({"ricci-negative", "scalar-negative"}));
  degen_cmd->add_option("--t-max", t_max, "largest sampled t")->check(CLI::PositiveNumber);

  std::string corpus_name;
  auto* corpus_cmd = app.add_subcommand("corpus", "list corpus entries or print one as an algebra file");
  corpus_cmd->add_option("name", corpus_name, "entry, e.g. tricky5 or heisenberg:5");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    json result;
    int code = kExitOk;
    auto emit = [&](const json& j) { out << dump(j) << "\n"; };

    if (corpus_cmd->parsed()) {
      if (corpus_name.empty()) {
        result["entries"] = corpus_names();
      } else {
        auto c = corpus(corpus_name);
        result["name"] = c.name;
        result["note"] = c.note;
        result["step"] = c.step;
        result["algebra"] = algebra_to_json({ScalarKind::Rational, c.bracket});
      }
      emit(result);
      return kExitOk;
    }

    Algebra alg = cli::resolve_algebra(algebra_arg);
    const ExactBracket& eb = alg.bracket;
    const Bracket b = alg.numeric();
    const int n = b.dim();
    require_lie(eb);
    result["algebra"] = algebra_arg;

    if (ricci->parsed()) {
      if (derivation_arg.empty()) {
        auto data = koszul_oracle(b);
        result["ricci"] = encode(data.ricci);
        auto spec = ricci_spectrum(data.ricci);
        result["eigenvalues"] = encode(spec.eigenvalues);
        result["lambda_max"] = encode(spec.lambda_max);
        result["scalar"] = encode(data.scalar);
        if (is_nilpotent(eb)) result["oracle_delta"] = encode((ricci_nilpotent(b) - data.ricci).cwiseAbs().maxCoeff());
      } else {
        Eigen::MatrixXd d = parse_derivation(derivation_arg, n);
        auto blk = ricci_extension(d, b);
        result["blocks"] = {{"ff", encode(blk.ff)}, {"fn", encode(blk.fn_row)}, {"nn", encode(blk.nn)}, {"star", encode(blk.star)}};
        auto spec = ricci_spectrum(blk.assembled);
        result["eigenvalues"] = encode(spec.eigenvalues);
        result["lambda_max"] = encode(spec.lambda_max);
        result["oracle_delta"] = encode(blk.oracle_delta);
      }
    } else if (derivs->parsed()) {
      auto basis = derivation_space_exact(eb);
      result["dim"] = basis.size();
      json arr = json::array();
      for (const auto& m : basis) arr.push_back(cli::exact_matrix(m));
      result["basis"] = arr;
    } else if (torus_cmd->parsed()) {
      Torus t = diagonal_torus(eb);
      result["dim"] = t.dim();
      json basis = json::array();
      for (int c = 0; c < t.dim(); ++c) {
        std::vector<Rational> col;
        for (int i = 0; i < n; ++i) col.push_back(t.basis(i, c));
        basis.push_back(encode(col));
      }
      result["basis"] = basis;
      json coords = json::array();
      for (int c : t.coordinate_index) coords.push_back(c + 1);
      result["coordinate_index"] = coords;
      json weights = json::array();
      for (const auto& w : t.weights) {
        json idx = json::array();
        for (int i : w.indices) idx.push_back(i + 1);
        weights.push_back({{"coefficients", encode(w.coeffs)}, {"indices", idx}});
      }
      result["weights"] = weights;
      result["multiplicity_free"] = t.multiplicity_free();
      if (n <= kWeylSearchBound) {
        auto w = orthogonal_weyl_group(eb, t);
        json reps = json::array();
        for (std::size_t g = 0; g < w.induced.size(); ++g) {
          json perm = json::array(), sign = json::array();
          for (int i = 0; i < n; ++i) {
            perm.push_back(w.representatives[g].perm[i] + 1);
            sign.push_back(w.representatives[g].sign[i]);
          }
          reps.push_back({{"perm", perm}, {"sign", sign}, {"induced", cli::exact_matrix(w.induced[g])}});
        }
        result["weyl"] = {{"induced_actions", w.induced.size()},
                          {"normalizer_order", w.normalizer_order},
                          {"centralizer_order", w.centralizer_order},
                          {"representatives", reps}};
      }
    } else if (nice_cmd->parsed()) {
      auto r = nice_basis_check(eb);
      result["nice"] = r.nice;
      json v = json::array();
      for (const auto& x : r.violations) v.push_back(describe(x));
      result["violations"] = v;
    } else if (moment_cmd->parsed()) {
      auto m = moment_map(b);
      result["moment"] = encode(Eigen::MatrixXd(m));
      result["trace"] = encode(m.trace());
      json w = json::array();
      for (const auto& t : eb.support()) {
        auto f = weight_vector(n, t);
        w.push_back({{"triple", cli::weight_label(t)}, {"F", std::vector<int>(f.begin(), f.end())}});
      }
      result["weights"] = w;
    } else if (hull_cmd->parsed()) {
      auto wp = weight_polytope(eb);
      result["dim"] = wp.lattice.dim;
      json verts = json::array();
      for (int v : wp.lattice.vertices) {
        json labels = json::array();
        for (const auto& t : wp.triples[v]) labels.push_back(cli::weight_label(t));
        verts.push_back({{"point", encode(wp.points[v])}, {"triples", labels}});
      }
      result["vertices"] = verts;
      json facets = json::array();
      for (const auto& f : wp.lattice.facets) {
        json labels = json::array();
        for (int p : f.points)
          for (const auto& t : wp.triples[p]) labels.push_back(cli::weight_label(t));
        facets.push_back(labels);
      }
      result["facets"] = facets;
      result["faces"] = wp.lattice.faces.size();
    } else if (orbit_cmd->parsed()) {
      GroupTag tag = group == "diag" ? GroupTag::DiagPositive : group == "torus" ? GroupTag::TorusCentralizer : GroupTag::DerivationCentralizer;
      std::optional<std::vector<double>> d;
      if (!derivation_arg.empty()) d = cli::diag_of(parse_derivation(derivation_arg, n));
      auto s = orbit_sample(tag, b, count, seed, d, jobs);
      out << "index,face";
      for (const auto& t : s.triples) out << ",c_" << to_string(t);
      for (int i = 0; i < n; ++i) out << ",m" << i + 1;
      out << "\n";
      for (std::size_t p = 0; p < s.points.size(); ++p) {
        out << p << "," << s.points[p].face;
        for (double x : s.points[p].hull_coords) out << "," << format_double(x);
        for (int i = 0; i < n; ++i) out << "," << format_double(s.points[p].moment(i, i));
        out << "\n";
      }
      return kExitOk;
    } else if (certify_cmd->parsed()) {
      Eigen::MatrixXd d = parse_derivation(derivation_arg, n);
      auto exact_diag = parse_diagonal_exact(derivation_arg, n);
      result["derivation"] = encode(d);
      result["method"] = method;
      bool certified = false;
      std::vector<MetricParams> hints;
      bool nice = nice_basis_check(eb).nice;
      bool want_nice = method == "nice-lp" || (method == "auto" && nice && exact_diag);
      if (want_nice) {
        if (!exact_diag) throw PreconditionError("nice-lp needs a diagonal derivation");
        auto lp = certify_srn_nice(*exact_diag, eb);
        result["nice_lp"] = {{"certified", lp.certified}, {"epsilon", encode(lp.epsilon)}, {"certificate", cli::certificate_json(lp.certificate)}};
        if (!lp.certified) result["nice_lp"]["dual"] = encode(lp.dual);
        certified = lp.certified;
        if (certified) {
          std::vector<double> dd = cli::diag_of(d);
          SrnCertificate<double> cd;
          cd.method = lp.certificate.method;
          cd.labels = lp.certificate.labels;
          for (const auto& c : lp.certificate.coefficients) cd.coefficients.push_back(to_double(c));
          cd.margin = to_double(lp.certificate.margin);
          if (auto h = srn_hint(dd, b, cd)) hints.push_back(*h);
        }
      }
      bool want_sampled = method == "sampled-lp" || (method == "auto" && !certified && !b.is_zero());
      if (want_sampled) {
        std::vector<double> dd = cli::diag_of(d);
        auto s = orbit_sample(GroupTag::DerivationCentralizer, b, samples, seed, dd, jobs);
        auto lp = certify_srn_sampled(dd, b, s);
        json pts = json::array();
        result["sampled_lp"] = {{"certified", lp.certified}, {"epsilon", encode(lp.epsilon)}, {"samples", samples},
                                {"certificate", cli::certificate_json(lp.certificate)}};
        if (lp.certified) {
          certified = true;
          if (auto h = srn_sampled_hint(dd, b, lp.certificate, s)) hints.push_back(*h);
        }
      }
      bool witness = false;
      if (method == "search" || certified || method == "auto") {
        auto r = search_rn_metric(d, b, budget, seed, hints);
        result["witness"] = cli::witness_json(r);
        witness = r.success;
      }
      result["necessary_condition"] = necessary_condition(d, b);
      result["extension_necessary_condition"] = extension_necessary_condition(d, b);
      result["certified"] = certified;
      bool ok = method == "search" ? witness : certified || (method == "auto" && witness);
      code = ok ? kExitOk : kExitUnknown;
    } else if (cone_cmd->parsed()) {
      Rational t;
      try {
        t = parse_rational(trace_level);
      } catch (const std::invalid_argument& e) {
        throw FormatError(std::string("--trace-level: ") + e.what());
      }
      ConeSection s = exact ? cone_section_exact(eb, t) : cone_section(b, to_double(t), resolution, seed, false, jobs);
      result["exactness"] = to_string(s.exactness);
      result["trace_level"] = trace_level;
      result["dim"] = s.dim;
      json verts = json::array();
      for (std::size_t v = 0; v < s.vertices.size(); ++v) {
        json x = s.exactness == Exactness::Exact ? encode(s.vertices_exact[v]) : encode(s.vertices[v]);
        verts.push_back({{"coordinates", x}, {"diagonal", encode(s.diagonal(s.vertices[v]))}});
      }
      result["vertices"] = verts;
      json edges = json::array();
      for (auto [u, v] : s.edges) edges.push_back({u, v});
      result["edges"] = edges;
      result["hypercube"] = s.is_hypercube();
      if (n <= kWeylSearchBound) {
        auto w = orthogonal_weyl_group(eb, s.torus);
        auto rep = weyl_invariance_check(s, w);
        result["weyl_report"] = {{"invariant", rep.invariant}, {"elements", w.induced.size()},
                                 {"max_distance", encode(rep.max_distance)}, {"violations", rep.violations}};
      }
      if (!csv_path.empty()) {
        std::ofstream csv(csv_path);
        if (!csv) throw FormatError("cannot write " + csv_path);
        for (int j = 0; j < s.torus.dim(); ++j) csv << (j ? "," : "") << "x" << j + 1;
        for (int i = 0; i < n; ++i) csv << ",d" << i + 1;
        csv << "\n";
        for (const auto& v : s.vertices) {
          for (std::size_t j = 0; j < v.size(); ++j) csv << (j ? "," : "") << format_double(v[j]);
          for (double x : s.diagonal(v)) csv << "," << format_double(x);
          csv << "\n";
        }
      }
    } else if (degen_cmd->parsed()) {
      auto colon = curve_arg.find(':');
      if (colon == std::string::npos) throw FormatError("--curve: expected kind:<arguments>");
      std::string kind = curve_arg.substr(0, colon), arg = curve_arg.substr(colon + 1);
      std::optional<DegenerationCurve> curve;
      if (kind == "diag") curve = DegenerationCurve::power(b, cli::parse_vector(arg), curve_arg);
      else if (kind == "exp") curve = DegenerationCurve::exponential(b, cli::parse_vector(arg), curve_arg);
      else if (kind == "heintze") curve = heintze_degeneration(parse_derivation(arg, n), b);
      else throw FormatError("--curve: unknown kind '" + kind + "'");
      result["curve"] = curve_arg;
      json traj = json::array();
      for (const auto& s : trajectory(*curve, t_max, jobs)) traj.push_back(cli::sample_json(s));
      result["trajectory"] = traj;
      Bracket lim = limit_bracket(*curve, t_max);
      std::vector<ExactBracket::Entry> le;
      for (const auto& [tr, c] : lim.constants()) le.push_back({tr.i, tr.j, tr.k, Rational(c)});
      result["limit"] = algebra_to_json({ScalarKind::Float, ExactBracket(lim.dim(), le)});
      result["limit_curvature"] = cli::sample_json(curvature_at(lim));
      if (!predicate_arg.empty()) {
        Predicate p = predicate_arg == "ricci-negative" ? Predicate::RicciNegative : Predicate::ScalarNegative;
        auto pr = pinching_transfer(*curve, p, t_max);
        json pj = {{"predicate", predicate_arg}, {"found", pr.found}};
        if (pr.found) {
          pj["k"] = pr.k;
          pj["t"] = encode(pr.t);
          pj["witness"] = cli::sample_json(pr.witness);
          pj["h"] = encode(pr.h);
        }
        result["pinching"] = pj;
        if (!pr.found) code = kExitUnknown;
      }
    }
    emit(result);
    return code;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const PreconditionError& e) {
    err << "precondition: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const NumericalError& e) {
    err << "numerical: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "numerical: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace rnlie
