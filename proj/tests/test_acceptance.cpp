#include <gtest/gtest.h>

#include <iostream>

#include "bml/verify/acceptance.hpp"

using namespace bml::verify;

namespace {

const AcceptanceConfig& config() {
    static const AcceptanceConfig cfg{kSuiteSeed, 1};
    return cfg;
}

void expect_pass(const CheckResult& r) {
    std::cout << to_json(r).dump(2) << std::endl;
    EXPECT_TRUE(r.passed) << "criterion " << r.id << " (" << r.name << ") failed: " << r.metrics.dump();
}

}  // namespace

TEST(Acceptance, C01_CsbpLaplaceLaw) { expect_pass(check_csbp_laplace(config())); }
TEST(Acceptance, C02_CsbpExtinctionLaw) { expect_pass(check_csbp_extinction(config())); }
TEST(Acceptance, C03_CsbpScaling) { expect_pass(check_csbp_scaling(config())); }
TEST(Acceptance, C04_LampertiRoundTrip) { expect_pass(check_lamperti_round_trip(config())); }
TEST(Acceptance, C05_SnakeMapInvariants) { expect_pass(check_snake_invariants(config())); }
TEST(Acceptance, C06_CvsCorrectness) { expect_pass(check_cvs(config())); }
TEST(Acceptance, C07_BallVolumeExponent) { expect_pass(check_ball_volume(config())); }
TEST(Acceptance, C08_TwoSamplerAgreement) { expect_pass(check_two_samplers(config())); }
TEST(Acceptance, C09_MergePppConsistency) { expect_pass(check_merge_ppp(config())); }
TEST(Acceptance, C10_GeodesicOracles) { expect_pass(check_geodesic_oracles(config())); }
TEST(Acceptance, C11_FrameSparsity) { expect_pass(check_frame_sparsity(config())); }
TEST(Acceptance, C12_DgffLaw) { expect_pass(check_dgff(config())); }
TEST(Acceptance, C13_StrongConfluence) { expect_pass(check_strong_confluence(config())); }
TEST(Acceptance, C14_Determinism) { expect_pass(check_determinism(config())); }
