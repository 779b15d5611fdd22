#include "rnlie/cli.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <sstream>

#include <sys/wait.h>

using namespace rnlie;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "rnlie_cli");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path temp_file(const std::string& name) { return std::filesystem::temp_directory_path() / ("rnlie_test_" + name); }

}  // namespace

TEST(Corpus, EntriesAreLieWithTheirSteps) {
  for (const char* name : {"abelian:4", "heisenberg:3", "heisenberg:7", "filiform:5", "tricky5", "milnor_heis", "milnor_hyp:3", "milnor_e2",
                           "milnor_jordan"}) {
    auto c = corpus(name);
    EXPECT_EQ(c.name, name);
    EXPECT_TRUE(is_lie(c.bracket)) << name;
    EXPECT_EQ(nilpotency_step(c.bracket), c.step) << name;
  }
  EXPECT_EQ(corpus_names().size(), 8u);
}

TEST(Corpus, Tricky5Invariants) {
  auto c = corpus("tricky5");
  EXPECT_EQ(c.bracket.dim(), 5);
  EXPECT_EQ(center(c.bracket).cols(), 2);
  EXPECT_EQ(lower_central_series(c.bracket), (std::vector<int>{5, 2, 1, 0}));
}

TEST(Corpus, RejectsBadNames) {
  EXPECT_THROW(corpus("nosuch"), PreconditionError);
  EXPECT_THROW(corpus("heisenberg:4"), PreconditionError);
  EXPECT_THROW(corpus("heisenberg:x"), PreconditionError);
  EXPECT_THROW(corpus("tricky5:2"), PreconditionError);
}

TEST(AlgebraFile, RoundTripIsExact) {
  for (const char* name : {"tricky5", "heisenberg:5", "milnor_jordan"}) {
    Algebra a{ScalarKind::Rational, corpus(name).bracket};
    std::string text = dump(algebra_to_json(a));
    Algebra b = parse_algebra(text);
    EXPECT_EQ(b.bracket.constants(), a.bracket.constants()) << name;
    EXPECT_EQ(dump(algebra_to_json(b)), text);
  }
}

TEST(AlgebraFile, RationalStringsStayExact) {
  Algebra a = parse_algebra(R"({"dim": 3, "scalars": "rational", "brackets": [[1, 2, [[3, "1/3"]]]]})");
  EXPECT_EQ(a.bracket(0, 1, 2), Rational(1, 3));
  EXPECT_EQ(a.bracket(1, 0, 2), Rational(-1, 3));
  auto j = algebra_to_json(a);
  EXPECT_EQ(j["brackets"][0][2][0][1], "1/3");
  Algebra f = parse_algebra(R"({"dim": 3, "scalars": "float", "brackets": [[1, 2, [[3, "1/3"]]]]})");
  EXPECT_EQ(to_double(f.bracket(0, 1, 2)), 1.0 / 3.0);
}

TEST(AlgebraFile, FileRoundTrip) {
  auto path = temp_file("roundtrip.json");
  Algebra a{ScalarKind::Rational, corpus("tricky5").bracket};
  save_algebra(a, path.string());
  EXPECT_EQ(load_algebra(path.string()).bracket.constants(), a.bracket.constants());
  std::filesystem::remove(path);
  EXPECT_THROW(load_algebra(path.string()), FormatError);
}

TEST(AlgebraFile, ValidationNamesTheField) {
  auto message = [](const std::string& text) {
    try {
      parse_algebra(text);
    } catch (const FormatError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_NE(message(R"({"dim": 3, "brackets": [[2, 1, [[3, 1]]]]})").find("brackets[0]: entries need i < j"), std::string::npos);
  EXPECT_NE(message(R"({"dim": 3, "brackets": [[1, 1, [[3, 1]]]]})").find("i < j"), std::string::npos);
  EXPECT_NE(message(R"({"dim": 3, "brackets": [[1, 2, [[4, 1]]]]})").find("brackets[0][2][0]"), std::string::npos);
  EXPECT_NE(message(R"({"dim": 3, "brackets": [[1, 2, [[3, 1]]], [1, 2, [[3, 2]]]]})").find("duplicate pair"), std::string::npos);
  EXPECT_NE(message(R"({"dim": 3, "brackets": [[1, 2, [[3, 1], [3, 2]]]]})").find("duplicate target"), std::string::npos);
  EXPECT_NE(message(R"({"dim": 3, "brackets": [[1, 2, [[3, "x/2"]]]]})").find("brackets[0][2][0]"), std::string::npos);
  EXPECT_NE(message(R"({"dim": 3, "scalars": "complex", "brackets": []})").find("scalars"), std::string::npos);
  EXPECT_NE(message(R"({"brackets": []})").find("dim"), std::string::npos);
  EXPECT_NE(message("{\"dim\": 3,\n \"brackets\": [}").find("line 2"), std::string::npos);
}

TEST(DerivationArgument, DiagonalAndMatrix) {
  Eigen::MatrixXd d = parse_derivation("[1, \"1/2\", 2]", 3);
  EXPECT_EQ(d(1, 1), 0.5);
  EXPECT_EQ(d(0, 1), 0.0);
  Eigen::MatrixXd m = parse_derivation("[[1, 2], [3, 4]]", 2);
  EXPECT_EQ(m(0, 1), 2.0);
  EXPECT_EQ(m(1, 0), 3.0);
  EXPECT_THROW(parse_derivation("[1, 2]", 3), FormatError);
  EXPECT_THROW(parse_derivation("[[1, 2], [3]]", 2), FormatError);
  EXPECT_THROW(parse_derivation("oops", 2), FormatError);
  auto exact = parse_diagonal_exact("[\"1/3\", 1, 2]", 3);
  ASSERT_TRUE(exact.has_value());
  EXPECT_EQ((*exact)[0], Rational(1, 3));
  EXPECT_FALSE(parse_diagonal_exact("[[1]]", 1).has_value());
}

TEST(Cli, RicciOfTheHeintzeExample) {
  auto r = run({"ricci", "-a", "heisenberg:3", "-d", "[1,1,2]"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  auto j = json::parse(r.out);
  EXPECT_NEAR(std::stod(j["lambda_max"].get<std::string>()), -4.5, 1e-12);
}

TEST(Cli, CertifyExitCodes) {
  auto ok = run({"certify", "-a", "heisenberg:3", "-d", "[1,1,2]"});
  EXPECT_EQ(ok.code, kExitOk) << ok.err;
  auto j = json::parse(ok.out);
  EXPECT_TRUE(j["certified"].get<bool>());
  EXPECT_EQ(j["nice_lp"]["epsilon"], "3/2");
  EXPECT_TRUE(j["witness"]["success"].get<bool>());

  auto refuted = run({"certify", "-a", "heisenberg:3", "-d", "[-1,2,1]", "--method", "nice-lp"});
  EXPECT_EQ(refuted.code, kExitUnknown);
  EXPECT_EQ(json::parse(refuted.out)["nice_lp"]["epsilon"], "0");
  EXPECT_EQ(json::parse(refuted.out)["nice_lp"]["dual"], json::parse(R"(["1/2", "0", "1/2"])"));

  EXPECT_EQ(run({"certify", "-a", "heisenberg:3", "-d", "[1,1,1]", "--method", "nice-lp"}).code, kExitPrecondition);
  EXPECT_EQ(run({"certify", "-a", "heisenberg:3", "-d", "[1,1]"}).code, kExitUsage);
  EXPECT_EQ(run({"certify", "-a", "heisenberg:3"}).code, kExitUsage);
  EXPECT_EQ(run({"certify", "-a", "nosuch", "-d", "[1]"}).code, kExitPrecondition);
}

TEST(Cli, CertifySampledOnTricky5) {
  auto r = run({"certify", "-a", "tricky5", "-d", "[1,1,2,2,3]"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  auto j = json::parse(r.out);
  EXPECT_TRUE(j["sampled_lp"]["certified"].get<bool>());
  EXPECT_EQ(j["sampled_lp"]["certificate"]["method"], "sampled-lp");
}

TEST(Cli, ConeSectionOfHeisenberg5) {
  auto csv = temp_file("h5.csv");
  auto r = run({"cone", "-a", "heisenberg:5", "--exact", "--csv", csv.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  auto j = json::parse(r.out);
  EXPECT_EQ(j["exactness"], "exact");
  EXPECT_EQ(j["vertices"].size(), 8u);
  EXPECT_FALSE(j["hypercube"].get<bool>());
  EXPECT_TRUE(j["weyl_report"]["invariant"].get<bool>());
  EXPECT_TRUE(std::filesystem::exists(csv));
  std::filesystem::remove(csv);
  EXPECT_EQ(run({"cone", "-a", "tricky5", "--exact"}).code, kExitPrecondition);
  EXPECT_EQ(run({"cone", "-a", "heisenberg:3", "--trace-level", "abc"}).code, kExitUsage);
}

TEST(Cli, DegenerateMilnorE2) {
  auto r = run({"degenerate", "-a", "milnor_e2", "--curve", "diag:0,1,1", "--predicate", "scalar-negative"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  auto j = json::parse(r.out);
  EXPECT_TRUE(j["pinching"]["found"].get<bool>());
  EXPECT_EQ(j["pinching"]["k"], 1);
  EXPECT_EQ(run({"degenerate", "-a", "heisenberg:3", "--curve", "diag:0,0,1"}).code, kExitNumerical);
  EXPECT_EQ(run({"degenerate", "-a", "heisenberg:3", "--curve", "spiral:1"}).code, kExitUsage);
}

TEST(Cli, AlgebraFromFile) {
  auto path = temp_file("alg.json");
  save_algebra({ScalarKind::Rational, corpus("heisenberg:3").bracket}, path.string());
  auto r = run({"nice", "-a", path.string()});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_TRUE(json::parse(r.out)["nice"].get<bool>());
  std::filesystem::remove(path);
  auto bad = temp_file("bad.json");
  {
    std::ofstream f(bad);
    f << R"({"dim": 3, "brackets": [[2, 1, [[3, 1]]]]})";
  }
  auto e = run({"nice", "-a", bad.string()});
  EXPECT_EQ(e.code, kExitUsage);
  EXPECT_NE(e.err.find("i < j"), std::string::npos);
  std::filesystem::remove(bad);
}

TEST(Cli, OtherSubcommands) {
  EXPECT_EQ(run({"derivations", "-a", "heisenberg:3"}).code, kExitOk);
  auto nice = run({"nice", "-a", "tricky5"});
  ASSERT_EQ(nice.code, kExitOk);
  EXPECT_FALSE(json::parse(nice.out)["nice"].get<bool>());
  EXPECT_FALSE(json::parse(nice.out)["violations"].empty());
  auto t = run({"torus", "-a", "heisenberg:5"});
  ASSERT_EQ(t.code, kExitOk);
  EXPECT_EQ(json::parse(t.out)["weyl"]["induced_actions"], 8);
  auto h = run({"hull", "-a", "tricky5"});
  ASSERT_EQ(h.code, kExitOk);
  EXPECT_EQ(json::parse(h.out)["vertices"].size(), 4u);
  auto m = run({"moment", "-a", "tricky5"});
  ASSERT_EQ(m.code, kExitOk);
  EXPECT_EQ(json::parse(m.out)["weights"].size(), 4u);
  auto o = run({"orbit-sample", "-a", "tricky5", "--group", "torus", "--count", "3"});
  ASSERT_EQ(o.code, kExitOk);
  EXPECT_EQ(std::count(o.out.begin(), o.out.end(), '\n'), 4);
  EXPECT_EQ(run({"corpus"}).code, kExitOk);
  EXPECT_EQ(run({}).code, kExitUsage);
  EXPECT_EQ(run({"--help"}).code, kExitOk);
}

TEST(Cli, SameSeedSameBytes) {
  std::vector<std::string> args{"--seed", "7", "cone", "-a", "tricky5", "--resolution", "8"};
  auto a = run(args), b = run(args);
  ASSERT_EQ(a.code, kExitOk) << a.err;
  EXPECT_EQ(a.out, b.out);
  args.insert(args.begin(), {"--jobs", "2"});
  EXPECT_EQ(run(args).out, a.out);
}

TEST(Cli, BinaryExitCodes) {
  auto status = [](const std::string& args) {
    std::string cmd = std::string(RNLIE_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    int s = std::system(cmd.c_str());
    return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
  };
  EXPECT_EQ(status("certify -a heisenberg:3 -d '[1,1,2]'"), 0);
  EXPECT_EQ(status("certify -a heisenberg:3 -d '[1,1,1]' --method nice-lp"), 2);
  EXPECT_EQ(status("bogus"), 1);
}
