#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "sral/io.hpp"
#include "sral/rng.hpp"
#include "sral/triangularize.hpp"

using namespace sral;
using nlohmann::ordered_json;
using io::json;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
};

CliResult run_cli(const std::string& args) {
  std::string cmd = std::string(SRAL_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  EXPECT_NE(pipe, nullptr);
  CliResult r;
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof(buf), pipe)) > 0) r.out.append(buf, got);
  int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string write_temp(const std::string& name, const std::string& text) {
  std::string path = testing::TempDir() + name;
  std::ofstream out(path);
  out << text;
  return path;
}

std::string fixture(const std::string& name) {
  return std::string(SRAL_FIXTURE_DIR) + "/" + name;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CMatrix unit(Eigen::Index d, Eigen::Index i, Eigen::Index j) {
  CMatrix e = CMatrix::Zero(d, d);
  e(i, j) = 1.0;
  return e;
}

}  // namespace

TEST(MatrixJson, DumpAndParseRoundTripIsExact) {
  Rng rng = Rng::stream(909, 1);
  CMatrix a = rng.gaussian(3, 4);
  json j = json::parse(io::matrix_to_json(a).dump());
  CMatrix back = io::matrix_from_json(j);
  ASSERT_EQ(back.rows(), 3);
  ASSERT_EQ(back.cols(), 4);
  EXPECT_EQ((back - a).norm(), 0.0);
}

TEST(MatrixJson, MalformedShapesAreRejected) {
  EXPECT_THROW(io::matrix_from_json(json{{"rows", 2}, {"cols", 2}}), ParseError);
  EXPECT_THROW(io::matrix_from_json(json{{"rows", 0}, {"cols", 2}, {"data", json::array()}}),
               ParseError);
  json short_row = io::matrix_to_json(CMatrix::Identity(2, 2));
  short_row["data"][1] = json::array({json::array({1.0, 0.0})});
  EXPECT_THROW(io::matrix_from_json(short_row), ParseError);
  json bad_cell = io::matrix_to_json(CMatrix::Identity(2, 2));
  bad_cell["data"][0][0] = 1.0;
  EXPECT_THROW(io::matrix_from_json(bad_cell), ParseError);
}

TEST(MatrixJson, NonFiniteEntriesAreRejected) {
  json j = io::matrix_to_json(CMatrix::Identity(2, 2));
  j["data"][0][0][0] = std::numeric_limits<double>::infinity();
  EXPECT_THROW(io::matrix_from_json(j), ParseError);
  json nanj = io::matrix_to_json(CMatrix::Identity(2, 2));
  nanj["data"][1][1][1] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(io::matrix_from_json(nanj), ParseError);
}

TEST(FamilyJson, RoundTripKeepsMultiplicities) {
  families::SummableFamily m;
  Rng rng = Rng::stream(909, 2);
  m.members = {rng.gaussian(2, 2), rng.gaussian(2, 2)};
  m.multiplicities = {3, 1};
  families::SummableFamily back = io::family_from_json(json::parse(io::family_to_json(m).dump()));
  ASSERT_EQ(back.members.size(), 2u);
  EXPECT_EQ((back.members[0] - m.members[0]).norm(), 0.0);
  EXPECT_EQ((back.members[1] - m.members[1]).norm(), 0.0);
  EXPECT_EQ(back.multiplicities, m.multiplicities);
}

TEST(FamilyJson, DimensionFieldMustAgreeWithMembers) {
  json j = io::family_to_json(families::SummableFamily{{CMatrix::Identity(2, 2)}, {}});
  j["dimension"] = 5;
  EXPECT_THROW(io::family_from_json(j), ParseError);
  EXPECT_THROW(io::bounded_from_json(j), ParseError);
}

TEST(ElemJson, RoundTripKeepsCompactFlags) {
  elem::ElementaryOperator t;
  t.m = 2;
  t.n = 2;
  t.terms.push_back({unit(2, 0, 0), CMatrix::Identity(2, 2), true, false});
  t.terms.push_back({unit(2, 0, 1), unit(2, 1, 0), false, true});
  elem::ElementaryOperator back = io::elem_from_json(json::parse(io::elem_to_json(t).dump()));
  ASSERT_EQ(back.terms.size(), 2u);
  EXPECT_TRUE(back.terms[0].a_compact);
  EXPECT_FALSE(back.terms[0].b_compact);
  EXPECT_FALSE(back.terms[1].a_compact);
  EXPECT_TRUE(back.terms[1].b_compact);
  EXPECT_EQ((back.terms[1].a - t.terms[1].a).norm(), 0.0);
}

TEST(ChainJson, TriangularizedChainSurvivesTheRoundTrip) {
  CMatrix n = unit(3, 0, 1) + unit(3, 1, 2);
  tri::SubspaceChain c = tri::triangularize({n});
  tri::SubspaceChain back = io::chain_from_json(json::parse(io::chain_to_json(c).dump()));
  ASSERT_EQ(back.bases.size(), c.bases.size());
  for (std::size_t j = 0; j < c.bases.size(); ++j)
    EXPECT_EQ((back.bases[j] - c.bases[j]).norm(), 0.0);
}

TEST(ChainJson, ValidationRunsOnParse) {
  json j{{"dimension", 2},
         {"bases", json::array({json::array({io::matrix_to_json(CMatrix::Identity(2, 2))})})}};
  EXPECT_THROW(io::chain_from_json(j), ParseError);
}

TEST(DecayCsv, FormatsHandBuiltRows) {
  std::vector<tri::DecayRow> rows = {{1, 2, 0.5, 0.5}, {2, 4, 0.25, 0.5}};
  EXPECT_EQ(io::decay_csv(rows),
            "m,count_enumerated,max_norm,root\n1,2,0.5,0.5\n2,4,0.25,0.5\n");
}

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(io::format_double(0.1), "0.1");
  EXPECT_EQ(io::format_double(2.0), "2");
  EXPECT_EQ(std::stod(io::format_double(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Cli, JsrBracketsTheGoldenPair) {
  CliResult r = run_cli("jsr " + fixture("golden_pair.json"));
  ASSERT_EQ(r.exit_code, 0) << r.out;
  json j = json::parse(r.out);
  EXPECT_TRUE(j["certified"].get<bool>());
  double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  EXPECT_LE(j["lower"].get<double>(), phi * (1.0 + 1e-9));
  EXPECT_GE(j["upper"].get<double>(), phi * (1.0 - 1e-9));
}

TEST(Cli, MalformedInputExitsWithInputError) {
  std::string bad = write_temp("sral_bad.json", "{");
  EXPECT_EQ(run_cli("jsr " + bad).exit_code, 2);
  EXPECT_EQ(run_cli("jsr /nonexistent/file.json").exit_code, 2);
  std::string wrong = write_temp("sral_wrong.json", "{\"members\": [1, 2]}");
  EXPECT_EQ(run_cli("tsr " + wrong).exit_code, 2);
}

TEST(Cli, InclusionCounterexampleExitsWithHypothesisCode) {
  CliResult r = run_cli("elem inclusion " + fixture("inclusion_counterexample.json"));
  ASSERT_EQ(r.exit_code, 4) << r.out;
  json j = json::parse(r.out);
  EXPECT_FALSE(j["hypothesis_satisfied"].get<bool>());
  EXPECT_NEAR(j["sum_distance"].get<double>(), 1.0, 1e-9);
  EXPECT_FALSE(j["sum_ok"].get<bool>());
}

TEST(Cli, ExhaustedBudgetExitsWithBudgetCode) {
  CliResult flag = run_cli("--budget 10 tsr " + fixture("golden_pair.json") + " --depth 6");
  EXPECT_EQ(flag.exit_code, 3);
  std::string cmd = std::string("SRAL_BUDGET=10 ") + SRAL_CLI_PATH + " tsr " +
                    fixture("golden_pair.json") + " --depth 6 2>/dev/null";
  int status = std::system(cmd.c_str());
  EXPECT_EQ(WIFEXITED(status) ? WEXITSTATUS(status) : -1, 3);
}

TEST(Cli, RieszProjectsOntoTheSelectedEigenspace) {
  CMatrix a = CMatrix::Zero(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = 3.0;
  std::string path = write_temp("sral_riesz_in.json", io::matrix_to_json(a).dump());
  CliResult r = run_cli("riesz " + path + " --center 1 --radius 0.5");
  ASSERT_EQ(r.exit_code, 0) << r.out;
  CMatrix p = io::matrix_from_json(json::parse(r.out));
  CMatrix expected = unit(2, 0, 0);
  EXPECT_LE((p - expected).norm(), 1e-10);
}

TEST(Cli, QuadratureLiftReportsWeightedSamples) {
  json curve{{"interval", json::array({0.0, 1.0})},
             {"samples", json::array({io::matrix_to_json(CMatrix::Identity(2, 2)),
                                      io::matrix_to_json(CMatrix::Identity(2, 2)),
                                      io::matrix_to_json(CMatrix::Identity(2, 2))})}};
  json in{{"a", curve}, {"b", curve}};
  std::string path = write_temp("sral_quad_in.json", in.dump());
  CliResult r = run_cli("elem quad " + path);
  ASSERT_EQ(r.exit_code, 0) << r.out;
  elem::ElementaryOperator t = io::elem_from_json(json::parse(r.out));
  ASSERT_EQ(t.terms.size(), 3u);
  CMatrix sum = CMatrix::Zero(2, 2);
  for (const elem::ElemTerm& e : t.terms) sum += e.a * e.b;
  EXPECT_LE((sum - CMatrix::Identity(2, 2)).norm(), 1e-12);
}

TEST(Cli, TriangularizeEmitsAValidChain) {
  families::SummableFamily f{{unit(3, 0, 1) + unit(3, 1, 2)}, {}};
  std::string path = write_temp("sral_tri_in.json", io::family_to_json(f).dump());
  CliResult r = run_cli("triangularize " + path);
  ASSERT_EQ(r.exit_code, 0) << r.out;
  tri::SubspaceChain chain = io::chain_from_json(json::parse(r.out));
  ASSERT_EQ(chain.bases.size(), 2u);
  EXPECT_EQ(chain.dimension, 3);
}

TEST(Cli, DecayReproducesTheFrozenSnapshot) {
  CliResult r = run_cli("decay " + fixture("decay_k.json") + " " + fixture("decay_f.json") +
                        " --lambda 0.333333333333333 --m-max 10");
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.out, read_file(fixture("decay_snapshot.csv")));
}

TEST(Cli, PairReconstructsADominantEigendirection) {
  elem::ElementaryOperator t;
  t.m = 2;
  t.n = 2;
  t.terms.push_back({CMatrix(2.0 * unit(2, 0, 0)), unit(2, 0, 0), true, false});
  t.terms.push_back({CMatrix(0.1 * unit(2, 1, 1)), unit(2, 1, 1), false, false});
  std::string path = write_temp("sral_pair_in.json", io::elem_to_json(t).dump());
  CliResult r = run_cli("pair " + path + " --p 1.0 --m 3 --cluster 0.6");
  ASSERT_EQ(r.exit_code, 0) << r.out;
  json j = json::parse(r.out);
  EXPECT_TRUE(j["verdict"].get<bool>());
  EXPECT_LE(j["partial_sum_residuals"].back().get<double>(), 1e-9);
}

TEST(Cli, VerifySingleSuitePrintsItsLine) {
  CliResult r = run_cli("verify --suite trace --seed 42");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.out.find("PASS trace"), std::string::npos);
  EXPECT_NE(r.out.find("passed 1/1"), std::string::npos);
  EXPECT_EQ(run_cli("verify --suite bogus").exit_code, 2);
}

TEST(Cli, RepeatRunsAreByteIdentical) {
  std::string args = "verify --suite eta_calculus --seed 7";
  CliResult a = run_cli(args);
  CliResult b = run_cli(args);
  EXPECT_EQ(a.exit_code, 0);
  EXPECT_EQ(a.out, b.out);
  CliResult j1 = run_cli("jsr " + fixture("golden_pair.json"));
  CliResult j2 = run_cli("jsr " + fixture("golden_pair.json"));
  EXPECT_EQ(j1.out, j2.out);
}

TEST(Cli, OutputFlagWritesTheReportToAFile) {
  std::string outp = testing::TempDir() + "sral_out.json";
  std::remove(outp.c_str());
  CliResult r = run_cli("-o " + outp + " jsr " + fixture("golden_pair.json"));
  ASSERT_EQ(r.exit_code, 0);
  json j = json::parse(read_file(outp));
  EXPECT_TRUE(j.contains("lower"));
  EXPECT_TRUE(j.contains("upper"));
}
