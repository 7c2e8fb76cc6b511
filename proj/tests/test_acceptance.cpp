#include <gtest/gtest.h>

#include <cstdio>

#include "sral/verify.hpp"

// One test per acceptance criterion; each prints its own PASS/FAIL line so
// the binary's output doubles as the acceptance report.

namespace {

constexpr std::uint64_t kSeed = 42;

void run_criterion(const std::string& name) {
  sral::verify::Criterion c = sral::verify::run_suite(name, kSeed, SRAL_CLI_PATH);
  std::printf("%s %s: %s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
  std::fflush(stdout);
  EXPECT_TRUE(c.pass) << c.name << ": " << c.detail;
}

}  // namespace

TEST(AcceptanceRoster, HasSixteenCriteria) {
  EXPECT_EQ(sral::verify::suite_names().size(), 16u);
}

TEST(Acceptance, JsrOracle) { run_criterion("jsr_oracle"); }
TEST(Acceptance, GoldenPair) { run_criterion("golden_pair"); }
TEST(Acceptance, BergerWang) { run_criterion("berger_wang"); }
TEST(Acceptance, EtaCalculus) { run_criterion("eta_calculus"); }
TEST(Acceptance, GeometricSeries) { run_criterion("geometric_series"); }
TEST(Acceptance, FreeLift) { run_criterion("free_lift"); }
TEST(Acceptance, Trace) { run_criterion("trace"); }
TEST(Acceptance, Inclusion) { run_criterion("inclusion"); }
TEST(Acceptance, Engel) { run_criterion("engel"); }
TEST(Acceptance, QmodRate) { run_criterion("qmod_rate"); }
TEST(Acceptance, Triangularize) { run_criterion("triangularize"); }
TEST(Acceptance, Decay) { run_criterion("decay"); }
TEST(Acceptance, SpectralSubspace) { run_criterion("spectral_subspace"); }
TEST(Acceptance, Pnorm) { run_criterion("pnorm"); }
TEST(Acceptance, Riesz) { run_criterion("riesz"); }
TEST(Acceptance, Determinism) { run_criterion("determinism"); }
