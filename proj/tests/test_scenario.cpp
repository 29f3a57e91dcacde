#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "cvsat/errors.hpp"
#include "cvsat/scenario.hpp"

using namespace cvsat;

namespace {

const char* kBase = R"(
scheme.kinds = swap, direct
sweep.sigma_b_min = 0.5
sweep.sigma_b_max = 1.0
sweep.sigma_b_steps = 3
sweep.r_min = 0.5
sweep.r_max = 1.5
sweep.r_steps = 2
channel.beta = 1
channel.beta_over_w = 0.5
)";

std::string field_of(const std::string& text) {
    try {
        parse_scenario_text(text);
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "";
}

std::string sweep_csv(const Scenario& sc, int workers) {
    std::ostringstream out;
    write_sweep_csv(out, run_sweep(sc, workers), false);
    return out.str();
}

}  // namespace

TEST(Scenario, ParsesBaseFile) {
    const auto sc = parse_scenario_text(kBase);
    ASSERT_EQ(sc.kinds.size(), 2u);
    EXPECT_EQ(sc.kinds[0], SchemeKind::Direct);
    EXPECT_EQ(sc.kinds[1], SchemeKind::Swap);
    EXPECT_DOUBLE_EQ(sc.w, 2.0);
    EXPECT_EQ(sc.sigma_b.values().size(), 3u);
    EXPECT_EQ(sc.postselect, PostSelectKind::None);
}

TEST(Scenario, ErrorsNameTheField) {
    const std::string base = kBase;
    EXPECT_EQ(field_of(base + "channel.k1 = 1.5\n"), "channel.k1");
    EXPECT_EQ(field_of(base + "channel.betta = 1\n"), "channel.betta");
    EXPECT_EQ(field_of(base + "channel.beta = 2\n"), "channel.beta");
    EXPECT_EQ(field_of(base + "channel.w = 2\n"), "channel.w");
    EXPECT_EQ(field_of(base + "noise.chi = -0.1\n"), "noise.chi");
    EXPECT_EQ(field_of(base + "noise.chi = abc\n"), "noise.chi");
    EXPECT_EQ(field_of(base + "noise.chi =\n"), "noise.chi");
    EXPECT_EQ(field_of(base + "quad.nodes_1d = 4\n"), "quad.nodes_1d");
    EXPECT_EQ(field_of(base + "scheme.kinds = teleport\n"), "scheme.kinds");
    EXPECT_EQ(field_of(base + "postselect.type = maybe\n"), "postselect.type");
    EXPECT_EQ(field_of(base + "postselect.tap_t = 0\n"), "postselect.tap_t");
    EXPECT_EQ(field_of(base + "mc.samples = 10\n"), "mc.samples");
    EXPECT_EQ(field_of("sweep.r_steps = 0\n"), "sweep.r_steps");
    EXPECT_EQ(field_of("just some words\n"), "line 1");
}

TEST(Scenario, ClassicalThresholdBoundedByBestTransmittance) {
    const std::string base = std::string(kBase) + "postselect.type = classical\npostselect.threshold_min = 0\n"
                                                  "postselect.threshold_steps = 2\n";
    EXPECT_EQ(field_of(base + "postselect.threshold_max = 0.99\n"), "postselect.threshold_max");
    EXPECT_EQ(field_of(base + "postselect.threshold_max = 0.3\n"), "");
}

TEST(Scenario, CoarseQuadratureAllowedForDiagnostics) {
    const std::string text = std::string(kBase) + "quad.nodes_1d = 4\n";
    EXPECT_THROW(parse_scenario_text(text), ConfigError);
    const auto sc = parse_scenario_text(text, true);
    const auto rep = validate_scenario(sc);
    EXPECT_FALSE(rep.passed());
    bool saw = false;
    for (const auto& f : rep.failures) saw = saw || f.check == "quadrature" || f.check == "convergence";
    EXPECT_TRUE(saw);
    EXPECT_NE(rep.to_json().find("\"passed\": false"), std::string::npos);
}

TEST(Scenario, GridRangeIsInclusive) {
    const auto v = GridRange{0.1, 1.5, 15}.values();
    ASSERT_EQ(v.size(), 15u);
    EXPECT_DOUBLE_EQ(v.front(), 0.1);
    EXPECT_DOUBLE_EQ(v.back(), 1.5);
    EXPECT_NEAR(v[1], 0.2, 1e-15);
    EXPECT_EQ(GridRange{}.values().size(), 1u);
}

TEST(Scenario, NumberFormatting) {
    EXPECT_EQ(format_number(0.0), "0");
    EXPECT_EQ(format_number(0.5), "0.5");
    EXPECT_EQ(format_number(2.0 / std::log(2.0)), "2.88539008178");
    EXPECT_EQ(format_number(std::nan("")), "nan");
    EXPECT_EQ(format_number(std::numeric_limits<double>::infinity()), "inf");
    EXPECT_EQ(format_number(-std::numeric_limits<double>::infinity()), "-inf");
    EXPECT_NE(format_number(1.5e-7).find('e'), std::string::npos);
}

TEST(Scenario, LosslessPointReproducesTmsv) {
    auto sc = parse_scenario_text("sweep.r_min = 1\nsweep.r_max = 1\nsweep.sigma_b_min = 0\n"
                                  "sweep.sigma_b_max = 0\nchannel.beta_over_w = 12\n");
    const auto rows = run_sweep(sc);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_NEAR(rows[0].e_ln, 2.0 / std::log(2.0), 1e-9);
    ASSERT_TRUE(rows[0].effective.has_value());
    EXPECT_NEAR(rows[0].effective->r(), 1.0, 1e-9);
}

TEST(Scenario, SweepOrderAndWorkerIndependence) {
    const auto sc = parse_scenario_text(kBase);
    const auto rows = run_sweep(sc, 1);
    ASSERT_EQ(rows.size(), 12u);
    EXPECT_EQ(rows[0].scheme, SchemeKind::Direct);
    EXPECT_EQ(rows[11].scheme, SchemeKind::Swap);
    EXPECT_DOUBLE_EQ(rows[1].r, 1.5);
    EXPECT_EQ(sweep_csv(sc, 1), sweep_csv(sc, 3));
    const auto header = sweep_csv(sc, 1).substr(0, sweep_csv(sc, 1).find('\n'));
    EXPECT_EQ(header,
              "scheme,sigma_b,r,chi,e_ln,p_success,eff_r,eff_eta_a,eff_eta_b,mean_loss_up_db,mean_loss_down_db");
}

TEST(Scenario, PostselectNeedsBlockAndDirectScheme) {
    EXPECT_THROW(run_postselect(parse_scenario_text(kBase)), ConfigError);
    const auto sc = parse_scenario_text(
        "postselect.type = classical\npostselect.threshold_min = 0\npostselect.threshold_max = 0.3\n"
        "postselect.threshold_steps = 4\nchannel.beta_over_w = 0.5\nsweep.r_min = 1.5\nsweep.r_max = 1.5\n");
    const auto rows = run_postselect(sc, 2);
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_NEAR(rows[0].p_success, 1.0, 1e-12);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        EXPECT_LT(rows[i].p_success, rows[i - 1].p_success);
        EXPECT_GT(rows[i].e_ln, rows[i - 1].e_ln);
    }
}

TEST(Scenario, NumericalErrorsCarryGridPoint) {
    const auto sc = parse_scenario_text(
        "postselect.type = quantum\npostselect.threshold_min = 60\npostselect.threshold_max = 60\n"
        "channel.beta_over_w = 0.5\n");
    try {
        run_postselect(sc);
        FAIL() << "expected NumericalError";
    } catch (const NumericalError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("scheme=direct"), std::string::npos) << msg;
        EXPECT_NE(msg.find("threshold=60"), std::string::npos) << msg;
    }
}

TEST(Scenario, EffectiveRowsCoverGrid) {
    const auto sc = parse_scenario_text(kBase);
    const auto rows = run_effective(sc);
    EXPECT_EQ(rows.size(), 6u);
    std::ostringstream out;
    write_effective_csv(out, rows);
    EXPECT_EQ(out.str().substr(0, out.str().find('\n')),
              "scheme,sigma_b,r,eff_cosh_2r,eff_eta_a,eff_eta_b,eff_eta_product,out_of_range_mass,swap_le_direct,"
              "satellite_ge_direct");
}

TEST(Scenario, ValidatePassesOnDefaultQuadrature) {
    const auto rep = validate_scenario(parse_scenario_text(kBase));
    EXPECT_TRUE(rep.passed()) << rep.to_json();
    EXPECT_EQ(rep.points, 12u);
}

TEST(Rate, EstimateAndDomain) {
    EXPECT_DOUBLE_EQ(rate_estimate(1e-4, 1e8), 1e4);
    EXPECT_DOUBLE_EQ(rate_estimate(0.0, 1e8), 0.0);
    EXPECT_DOUBLE_EQ(rate_estimate(1.0, 1e8), 1e8);
    EXPECT_THROW(rate_estimate(1.2, 1e8), DomainError);
    EXPECT_THROW(rate_estimate(0.5, 0.0), DomainError);
}
