#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cvsat/effective_channel.hpp"
#include "cvsat/fading_channel.hpp"
#include "cvsat/numerics.hpp"
#include "cvsat/schemes.hpp"

namespace cvsat {

enum class PostSelectKind { None, Classical, Quantum };

std::string_view to_string(PostSelectKind kind);

/// Inclusive, evenly spaced grid. steps == 1 means the single value min (== max).
struct GridRange {
    double min = 0.0;
    double max = 0.0;
    int steps = 1;

    std::vector<double> values() const;
};

/// Everything a sweep needs, read from a flat `section.key = value` file.
///
/// Lengths are in units of the aperture radius: with channel.beta = 1 the
/// sigma_b grid is sigma_b / beta.
struct Scenario {
    std::vector<SchemeKind> kinds{SchemeKind::Direct};
    GridRange sigma_b{0.7, 0.7, 1};
    GridRange r{1.0, 1.0, 1};
    double beta = 1.0;
    double w = 1.0;
    double k1 = 0.5;
    double k2 = 0.64;
    /// Absolute SB beam-wander deviation, replacing k1 * k2 * sigma_b.
    std::optional<double> sigma_b_sb;
    double chi = 0.0;

    PostSelectKind postselect = PostSelectKind::None;
    GridRange threshold{0.0, 0.0, 1};
    double tap_t = 0.93;

    QuadratureSpec quad;
    std::optional<McSpec> mc;
    std::string output_path;

    /// Throws ConfigError naming the offending key. With allow_coarse_quadrature
    /// the nodes_1d floor is not enforced (used by the validate diagnostics).
    void validate(bool allow_coarse_quadrature = false) const;

    LinkChannels channels(double sigma_b_value) const;
};

/// Parses `key = value` lines; '#' starts a comment. Unknown or repeated keys
/// and malformed values raise ConfigError. The result is validated.
Scenario parse_scenario(std::istream& in, bool allow_coarse_quadrature = false);
Scenario parse_scenario_text(std::string_view text, bool allow_coarse_quadrature = false);
Scenario load_scenario(const std::string& path, bool allow_coarse_quadrature = false);

struct SweepRow {
    SchemeKind scheme = SchemeKind::Direct;
    double sigma_b = 0.0;
    double r = 0.0;
    double chi = 0.0;
    std::optional<double> threshold;
    double e_ln = 0.0;
    double p_success = 1.0;
    std::optional<EffectiveParams> effective;
    double mean_loss_up_db = 0.0;
    double mean_loss_down_db = 0.0;
    TwoModeCM cm = TwoModeCM::vacuum();
};

/// Scheme ensembles over the (scheme, sigma_b, r) grid, in that lexicographic order.
/// NumericalError is rethrown with the failing grid point in the message.
std::vector<SweepRow> run_sweep(const Scenario& sc, int workers = 1);

/// Direct-scheme post-selection over (sigma_b, r, threshold).
std::vector<SweepRow> run_postselect(const Scenario& sc, int workers = 1);

struct EffectiveRow {
    double sigma_b = 0.0;
    double r = 0.0;
    OrderingReport report;
};

std::vector<EffectiveRow> run_effective(const Scenario& sc, int workers = 1);

/// Locale-independent number formatting: 12 significant digits, scientific
/// below 1e-4, "nan"/"inf" for non-finite values.
std::string format_number(double x);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows, bool with_threshold);
void write_effective_csv(std::ostream& out, const std::vector<EffectiveRow>& rows);

struct ValidationFailure {
    std::string check;
    std::string location;
    std::string detail;
    double value = 0.0;
};

struct ValidationReport {
    std::size_t points = 0;
    std::size_t cms_audited = 0;
    std::size_t mc_elements = 0;
    std::vector<ValidationFailure> failures;

    bool passed() const { return failures.empty(); }
    std::string to_json() const;
};

/// Maximum element difference tolerated between the requested and the doubled-subdivision rule.
inline constexpr double kConvergenceTol = 1e-7;
/// Monte Carlo agreement band in standard errors.
inline constexpr double kMcSigmaBand = 4.0;

/// Convergence gate, physicality audit and (when sc.mc is set) Monte Carlo
/// cross-check over every grid point. Failures are collected, not thrown.
ValidationReport validate_scenario(const Scenario& sc, int workers = 1);

/// Pair rate after post-selection. Throws DomainError outside p in [0, 1], tx > 0.
double rate_estimate(double p_success, double tx_rate_hz);

}  // namespace cvsat
