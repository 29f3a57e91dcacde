#include "cvsat/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <iterator>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "cvsat/errors.hpp"
#include "cvsat/postselection.hpp"
#include "json.hpp"

namespace cvsat {

namespace {

// --- parsing helpers -------------------------------------------------------------

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, std::string_view text) {
    double value = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
        throw ConfigError(key, "expected a finite number, got '" + std::string(text) + "'");
    }
    return value;
}

std::uint64_t parse_uint(const std::string& key, std::string_view text) {
    std::uint64_t value = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end) {
        throw ConfigError(key, "expected a non-negative integer, got '" + std::string(text) + "'");
    }
    return value;
}

int parse_int(const std::string& key, std::string_view text) {
    const auto value = parse_uint(key, text);
    if (value > 1'000'000) {
        throw ConfigError(key, "value too large");
    }
    return static_cast<int>(value);
}

std::vector<SchemeKind> parse_kinds(const std::string& key, std::string_view text) {
    std::set<SchemeKind> kinds;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto comma = text.find(',', pos);
        const auto item = trim(text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
        try {
            kinds.insert(parse_scheme_kind(item));
        } catch (const DomainError& e) {
            throw ConfigError(key, e.what());
        }
        if (comma == std::string_view::npos) {
            break;
        }
        pos = comma + 1;
    }
    return {kinds.begin(), kinds.end()};
}

PostSelectKind parse_postselect(const std::string& key, std::string_view text) {
    if (text == "none") return PostSelectKind::None;
    if (text == "classical") return PostSelectKind::Classical;
    if (text == "quantum") return PostSelectKind::Quantum;
    throw ConfigError(key, "expected none, classical or quantum, got '" + std::string(text) + "'");
}

void check_range(const std::string& prefix, const GridRange& g) {
    if (g.steps < 1) {
        throw ConfigError(prefix + "_steps", "steps must be >= 1");
    }
    if (g.max < g.min) {
        throw ConfigError(prefix + "_max", "max must not be below min");
    }
    if (g.steps == 1 && g.max != g.min) {
        throw ConfigError(prefix + "_steps", "a single step needs min == max");
    }
}

// --- parallel evaluation ---------------------------------------------------------

/// Evaluates f(0..n-1) on `workers` threads; results and the first exception
/// (by index) are returned in index order.
template <class T>
std::vector<T> parallel_map(std::size_t n, int workers, const std::function<T(std::size_t)>& f) {
    std::vector<std::optional<T>> slots(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    const auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                slots[i].emplace(f(i));
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        const auto extra = static_cast<std::size_t>(std::max(1, workers)) - 1;
        for (std::size_t k = 0; k < std::min(extra, n); ++k) {
            pool.emplace_back(work);
        }
        work();
    }
    std::vector<T> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (errors[i]) {
            std::rethrow_exception(errors[i]);
        }
        out.push_back(std::move(*slots[i]));
    }
    return out;
}

std::string point_label(SchemeKind kind, double sigma_b, double r, std::optional<double> threshold = {}) {
    std::string s = "scheme=" + std::string(to_string(kind)) + " sigma_b=" + format_number(sigma_b) +
                    " r=" + format_number(r);
    if (threshold) {
        s += " threshold=" + format_number(*threshold);
    }
    return s;
}

/// Runs f, prefixing NumericalError messages with the grid point.
template <class F>
auto at_point(const std::string& label, F&& f) {
    try {
        return f();
    } catch (const NumericalError& e) {
        throw NumericalError(label + ": " + e.what());
    }
}

struct SchemePoint {
    SchemeKind kind;
    double sigma_b;
    double r;
};

std::vector<SchemePoint> scheme_points(const Scenario& sc) {
    std::vector<SchemePoint> pts;
    for (const auto kind : sc.kinds) {
        for (const double s : sc.sigma_b.values()) {
            for (const double r : sc.r.values()) {
                pts.push_back({kind, s, r});
            }
        }
    }
    return pts;
}

struct PsPoint {
    double sigma_b;
    double r;
    double threshold;
};

std::vector<PsPoint> ps_points(const Scenario& sc) {
    std::vector<PsPoint> pts;
    for (const double s : sc.sigma_b.values()) {
        for (const double r : sc.r.values()) {
            for (const double t : sc.threshold.values()) {
                pts.push_back({s, r, t});
            }
        }
    }
    return pts;
}

void require_postselect_ready(const Scenario& sc) {
    if (sc.postselect == PostSelectKind::None) {
        throw ConfigError("postselect.type", "post-selection needs type classical or quantum");
    }
    if (sc.kinds != std::vector<SchemeKind>{SchemeKind::Direct}) {
        throw ConfigError("scheme.kinds", "post-selection is defined for the direct scheme only");
    }
}

SweepRow evaluate_scheme_point(const Scenario& sc, const SchemePoint& p, const QuadratureSpec& quad) {
    const auto links = scheme_links(p.kind, sc.channels(p.sigma_b));
    SweepRow row;
    row.scheme = p.kind;
    row.sigma_b = p.sigma_b;
    row.r = p.r;
    row.chi = sc.chi;
    row.cm = scheme_ensemble(p.kind, Squeezing::from_r(p.r), links[0], links[1], sc.chi, quad);
    row.e_ln = log_negativity(row.cm);
    row.effective = try_effective(row.cm);
    row.mean_loss_up_db = links[0].loss_db(quad);
    row.mean_loss_down_db = links[1].loss_db(quad);
    return row;
}

SweepRow evaluate_ps_point(const Scenario& sc, const PsPoint& p, const QuadratureSpec& quad) {
    const auto ch = sc.channels(p.sigma_b);
    const auto sq = Squeezing::from_r(p.r);
    const auto res = sc.postselect == PostSelectKind::Classical
                         ? classical_postselect(sq, ch.as, ch.sb, ClassicalPsConfig{p.threshold}, quad)
                         : quantum_postselect(sq, ch.as, ch.sb, QuantumPsConfig{sc.tap_t, p.threshold}, quad);
    SweepRow row;
    row.scheme = SchemeKind::Direct;
    row.sigma_b = p.sigma_b;
    row.r = p.r;
    row.chi = 0.0;
    row.threshold = p.threshold;
    row.cm = res.cm;
    row.e_ln = res.e_ln;
    row.p_success = res.p_success;
    row.effective = try_effective(res.cm);
    row.mean_loss_up_db = ch.as.loss_db(quad);
    row.mean_loss_down_db = ch.sb.loss_db(quad);
    return row;
}

}  // namespace

// --- scenario ----------------------------------------------------------------------

std::string_view to_string(PostSelectKind kind) {
    switch (kind) {
        case PostSelectKind::None:
            return "none";
        case PostSelectKind::Classical:
            return "classical";
        case PostSelectKind::Quantum:
            return "quantum";
    }
    return "unknown";
}

std::vector<double> GridRange::values() const {
    if (steps <= 1) {
        return {min};
    }
    std::vector<double> out(static_cast<std::size_t>(steps));
    const double step = (max - min) / (steps - 1);
    for (int i = 0; i < steps; ++i) {
        out[static_cast<std::size_t>(i)] = i + 1 == steps ? max : min + step * i;
    }
    return out;
}

void Scenario::validate(bool allow_coarse_quadrature) const {
    if (kinds.empty()) {
        throw ConfigError("scheme.kinds", "at least one scheme is required");
    }
    check_range("sweep.sigma_b", sigma_b);
    check_range("sweep.r", r);
    if (sigma_b.min < 0.0) {
        throw ConfigError("sweep.sigma_b_min", "sigma_b must be >= 0");
    }
    if (r.min < 0.0) {
        throw ConfigError("sweep.r_min", "squeezing r must be >= 0");
    }
    if (!(beta > 0.0)) {
        throw ConfigError("channel.beta", "aperture radius must be > 0");
    }
    if (!(w > 0.0)) {
        throw ConfigError("channel.w", "beam-spot radius must be > 0");
    }
    if (!(k1 >= 0.0 && k1 <= 1.0)) {
        throw ConfigError("channel.k1", "k1 must lie in [0, 1], got " + format_number(k1));
    }
    if (!(k2 >= 0.0)) {
        throw ConfigError("channel.k2", "k2 must be >= 0, got " + format_number(k2));
    }
    if (sigma_b_sb && !(*sigma_b_sb >= 0.0)) {
        throw ConfigError("channel.sigma_b_sb", "must be >= 0");
    }
    if (!(chi >= 0.0)) {
        throw ConfigError("noise.chi", "excess noise must be >= 0");
    }
    if (quad.subdivisions < 1) {
        throw ConfigError("quad.subdivisions", "must be >= 1");
    }
    if (quad.nodes_1d < (allow_coarse_quadrature ? 1 : QuadratureSpec::kMinNodes)) {
        throw ConfigError("quad.nodes_1d", "must be >= " + std::to_string(QuadratureSpec::kMinNodes));
    }
    if (mc) {
        if (mc->samples < 10'000) {
            throw ConfigError("mc.samples", "must be >= 10000");
        }
    }
    try {
        (void)FadingChannel::beam_wander(0.0, beta, w);
    } catch (const std::exception& e) {
        throw ConfigError("channel.beta_over_w", e.what());
    }
    if (postselect != PostSelectKind::None) {
        check_range("postselect.threshold", threshold);
    }
    if (postselect == PostSelectKind::Classical) {
        const double eta0 = FadingChannel::beam_wander(0.0, beta, w).eta0();
        if (threshold.min < 0.0) {
            throw ConfigError("postselect.threshold_min", "combined-transmittance threshold must be >= 0");
        }
        if (!(threshold.max < eta0 * eta0)) {
            throw ConfigError("postselect.threshold_max",
                              "must stay below the best combined transmittance " + format_number(eta0 * eta0));
        }
    }
    if (!(tap_t > 0.0 && tap_t <= 1.0)) {
        throw ConfigError("postselect.tap_t", "tap transmittivity must lie in (0, 1]");
    }
}

LinkChannels Scenario::channels(double sigma_b_value) const {
    auto links = expand_links(LinkGeometry{sigma_b_value, k1, k2}, beta, w);
    if (sigma_b_sb) {
        links.sb = FadingChannel::beam_wander(*sigma_b_sb, beta, w);
    }
    return links;
}

Scenario parse_scenario(std::istream& in, bool allow_coarse_quadrature) {
    Scenario sc;
    std::optional<double> w;
    std::optional<double> beta_over_w;
    McSpec mc;
    bool has_mc = false;

    using Setter = std::function<void(const std::string&, std::string_view)>;
    const std::map<std::string, Setter, std::less<>> setters{
        {"scheme.kinds", [&](const auto& k, auto v) { sc.kinds = parse_kinds(k, v); }},
        {"sweep.sigma_b_min", [&](const auto& k, auto v) { sc.sigma_b.min = parse_double(k, v); }},
        {"sweep.sigma_b_max", [&](const auto& k, auto v) { sc.sigma_b.max = parse_double(k, v); }},
        {"sweep.sigma_b_steps", [&](const auto& k, auto v) { sc.sigma_b.steps = parse_int(k, v); }},
        {"sweep.r_min", [&](const auto& k, auto v) { sc.r.min = parse_double(k, v); }},
        {"sweep.r_max", [&](const auto& k, auto v) { sc.r.max = parse_double(k, v); }},
        {"sweep.r_steps", [&](const auto& k, auto v) { sc.r.steps = parse_int(k, v); }},
        {"channel.beta", [&](const auto& k, auto v) { sc.beta = parse_double(k, v); }},
        {"channel.w", [&](const auto& k, auto v) { w = parse_double(k, v); }},
        {"channel.beta_over_w", [&](const auto& k, auto v) { beta_over_w = parse_double(k, v); }},
        {"channel.k1", [&](const auto& k, auto v) { sc.k1 = parse_double(k, v); }},
        {"channel.k2", [&](const auto& k, auto v) { sc.k2 = parse_double(k, v); }},
        {"channel.sigma_b_sb", [&](const auto& k, auto v) { sc.sigma_b_sb = parse_double(k, v); }},
        {"noise.chi", [&](const auto& k, auto v) { sc.chi = parse_double(k, v); }},
        {"quad.nodes_1d", [&](const auto& k, auto v) { sc.quad.nodes_1d = parse_int(k, v); }},
        {"quad.subdivisions", [&](const auto& k, auto v) { sc.quad.subdivisions = parse_int(k, v); }},
        {"mc.samples", [&](const auto& k, auto v) { mc.samples = parse_uint(k, v); has_mc = true; }},
        {"mc.seed", [&](const auto& k, auto v) { mc.seed = parse_uint(k, v); has_mc = true; }},
        {"postselect.type", [&](const auto& k, auto v) { sc.postselect = parse_postselect(k, v); }},
        {"postselect.threshold_min", [&](const auto& k, auto v) { sc.threshold.min = parse_double(k, v); }},
        {"postselect.threshold_max", [&](const auto& k, auto v) { sc.threshold.max = parse_double(k, v); }},
        {"postselect.threshold_steps", [&](const auto& k, auto v) { sc.threshold.steps = parse_int(k, v); }},
        {"postselect.tap_t", [&](const auto& k, auto v) { sc.tap_t = parse_double(k, v); }},
        {"output.path", [&](const auto&, auto v) { sc.output_path = std::string(v); }},
    };

    std::set<std::string, std::less<>> seen;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view text = line;
        if (const auto hash = text.find('#'); hash != std::string_view::npos) {
            text = text.substr(0, hash);
        }
        text = trim(text);
        if (text.empty()) {
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(line_no), "expected 'key = value'");
        }
        const std::string key(trim(text.substr(0, eq)));
        const auto value = trim(text.substr(eq + 1));
        const auto it = setters.find(key);
        if (it == setters.end()) {
            throw ConfigError(key, "unknown key");
        }
        if (!seen.insert(key).second) {
            throw ConfigError(key, "given more than once");
        }
        if (value.empty()) {
            throw ConfigError(key, "missing value");
        }
        it->second(key, value);
    }

    if (w && beta_over_w) {
        throw ConfigError("channel.w", "give either channel.w or channel.beta_over_w, not both");
    }
    if (beta_over_w) {
        if (!(*beta_over_w > 0.0)) {
            throw ConfigError("channel.beta_over_w", "must be > 0");
        }
        sc.w = sc.beta / *beta_over_w;
    } else if (w) {
        sc.w = *w;
    }
    if (has_mc) {
        sc.mc = mc;
    }
    sc.validate(allow_coarse_quadrature);
    return sc;
}

Scenario parse_scenario_text(std::string_view text, bool allow_coarse_quadrature) {
    std::istringstream in{std::string(text)};
    return parse_scenario(in, allow_coarse_quadrature);
}

Scenario load_scenario(const std::string& path, bool allow_coarse_quadrature) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("scenario", "cannot open '" + path + "'");
    }
    return parse_scenario(in, allow_coarse_quadrature);
}

// --- sweeps ------------------------------------------------------------------------

std::vector<SweepRow> run_sweep(const Scenario& sc, int workers) {
    sc.validate();
    const auto pts = scheme_points(sc);
    return parallel_map<SweepRow>(pts.size(), workers, [&](std::size_t i) {
        const auto& p = pts[i];
        return at_point(point_label(p.kind, p.sigma_b, p.r), [&] { return evaluate_scheme_point(sc, p, sc.quad); });
    });
}

std::vector<SweepRow> run_postselect(const Scenario& sc, int workers) {
    sc.validate();
    require_postselect_ready(sc);
    const auto pts = ps_points(sc);
    return parallel_map<SweepRow>(pts.size(), workers, [&](std::size_t i) {
        const auto& p = pts[i];
        return at_point(point_label(SchemeKind::Direct, p.sigma_b, p.r, p.threshold),
                        [&] { return evaluate_ps_point(sc, p, sc.quad); });
    });
}

std::vector<EffectiveRow> run_effective(const Scenario& sc, int workers) {
    sc.validate();
    std::vector<std::pair<double, double>> pts;
    for (const double s : sc.sigma_b.values()) {
        for (const double r : sc.r.values()) {
            pts.emplace_back(s, r);
        }
    }
    return parallel_map<EffectiveRow>(pts.size(), workers, [&](std::size_t i) {
        const auto [s, r] = pts[i];
        return at_point(point_label(SchemeKind::Swap, s, r), [&] {
            const auto ch = sc.channels(s);
            const auto sq = Squeezing::from_r(r);
            OrderingReport rep;
            rep.direct = scheme_effective_summary(SchemeKind::Direct, sq, ch.as, ch.sb, sc.quad);
            rep.satellite = scheme_effective_summary(SchemeKind::SatelliteSource, sq, ch.sa, ch.sb, sc.quad);
            rep.swap = scheme_effective_summary(SchemeKind::Swap, sq, ch.as, ch.bs, sc.quad);
            rep.swap_le_direct = rep.swap.eta_product() <= rep.direct.eta_product() + 1e-12;
            rep.satellite_ge_direct = rep.satellite.eta_product() + 1e-12 >= rep.direct.eta_product();
            return EffectiveRow{s, r, rep};
        });
    });
}

// --- output ------------------------------------------------------------------------

std::string format_number(double x) {
    if (std::isnan(x)) {
        return "nan";
    }
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    if (x == 0.0) {
        return "0";
    }
    char buf[64];
    const bool tiny = std::abs(x) < 1e-4;
    const auto res = tiny ? std::to_chars(buf, buf + sizeof buf, x, std::chars_format::scientific, 11)
                          : std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 12);
    return std::string(buf, res.ptr);
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows, bool with_threshold) {
    out << "scheme,sigma_b,r,chi,";
    if (with_threshold) {
        out << "threshold,";
    }
    out << "e_ln,p_success,eff_r,eff_eta_a,eff_eta_b,mean_loss_up_db,mean_loss_down_db\n";
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& row : rows) {
        out << to_string(row.scheme) << ',' << format_number(row.sigma_b) << ',' << format_number(row.r) << ','
            << format_number(row.chi) << ',';
        if (with_threshold) {
            out << format_number(row.threshold.value_or(nan)) << ',';
        }
        out << format_number(row.e_ln) << ',' << format_number(row.p_success) << ','
            << format_number(row.effective ? row.effective->r() : nan) << ','
            << format_number(row.effective ? row.effective->eta_a : nan) << ','
            << format_number(row.effective ? row.effective->eta_b : nan) << ','
            << format_number(row.mean_loss_up_db) << ',' << format_number(row.mean_loss_down_db) << '\n';
    }
}

void write_effective_csv(std::ostream& out, const std::vector<EffectiveRow>& rows) {
    out << "scheme,sigma_b,r,eff_cosh_2r,eff_eta_a,eff_eta_b,eff_eta_product,out_of_range_mass,"
           "swap_le_direct,satellite_ge_direct\n";
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& row : rows) {
        for (const auto* s : {&row.report.direct, &row.report.satellite, &row.report.swap}) {
            out << to_string(s->kind) << ',' << format_number(row.sigma_b) << ',' << format_number(row.r) << ','
                << format_number(s->cosh_2r.value_or(nan)) << ',' << format_number(s->eta_a) << ','
                << format_number(s->eta_b) << ',' << format_number(s->eta_product()) << ','
                << format_number(s->out_of_range_mass) << ',' << (row.report.swap_le_direct ? 1 : 0) << ','
                << (row.report.satellite_ge_direct ? 1 : 0) << '\n';
        }
    }
}

// --- validation --------------------------------------------------------------------

namespace {

double max_scaled_difference(const Mat4& a, const Mat4& b) {
    return ((a - b).array().abs() / (1.0 + a.array().abs().max(b.array().abs()))).maxCoeff();
}

struct PointCheck {
    std::size_t cms = 0;
    std::size_t mc_elements = 0;
    std::vector<ValidationFailure> failures;
};

void audit_pair(const std::string& label, const TwoModeCM& base, const TwoModeCM& fine, PointCheck& out) {
    out.cms += 2;
    const double diff = max_scaled_difference(base.matrix(), fine.matrix());
    if (!(diff < kConvergenceTol)) {
        out.failures.push_back({"convergence", label, "CM changes when quadrature subdivisions are doubled", diff});
    }
    for (const auto* cm : {&base, &fine}) {
        if (!cm->is_physical()) {
            out.failures.push_back(
                {"physicality", label, "CM violates the uncertainty relation", cm->symplectic_eigenvalues()[0]});
        }
    }
}

void compare_mc(const std::string& label, const std::string& what, double quad_value, const McEstimate& est,
                PointCheck& out) {
    ++out.mc_elements;
    const double diff = std::abs(est.mean - quad_value);
    const double band = kMcSigmaBand * est.std_err + 1e-9 * (1.0 + std::abs(quad_value));
    if (!(diff <= band)) {
        out.failures.push_back({"monte_carlo", label, what + " disagrees with Monte Carlo beyond 4 standard errors",
                                est.std_err > 0.0 ? diff / est.std_err : diff});
    }
}

double draw_eta(const FadingChannel& ch, Rng& rng) { return ch.is_point_mass() ? ch.eta0() : ch.sample(rng); }

PointCheck check_scheme_point(const Scenario& sc, const SchemePoint& p, const QuadratureSpec& quad) {
    PointCheck out;
    const auto label = point_label(p.kind, p.sigma_b, p.r);
    try {
        const auto base = evaluate_scheme_point(sc, p, quad);
        const auto fine = evaluate_scheme_point(sc, p, quad.doubled());
        audit_pair(label, base.cm, fine.cm, out);
        if (sc.mc) {
            const auto links = scheme_links(p.kind, sc.channels(p.sigma_b));
            const auto est = scheme_ensemble_mc(p.kind, Squeezing::from_r(p.r), links[0], links[1], sc.chi, *sc.mc);
            for (int i = 0; i < 4; ++i) {
                for (int j = i; j < 4; ++j) {
                    compare_mc(label, "CM(" + std::to_string(i) + "," + std::to_string(j) + ")", base.cm(i, j),
                               {est.mean(i, j), est.std_err(i, j)}, out);
                }
            }
        }
    } catch (const std::exception& e) {
        out.failures.push_back({"evaluation", label, e.what(), std::numeric_limits<double>::quiet_NaN()});
    }
    return out;
}

PointCheck check_ps_point(const Scenario& sc, const PsPoint& p, const QuadratureSpec& quad) {
    PointCheck out;
    const auto label = point_label(SchemeKind::Direct, p.sigma_b, p.r, p.threshold);
    try {
        const auto base = evaluate_ps_point(sc, p, quad);
        const auto fine = evaluate_ps_point(sc, p, quad.doubled());
        audit_pair(label, base.cm, fine.cm, out);
        if (std::abs(base.p_success - fine.p_success) >= kConvergenceTol) {
            out.failures.push_back({"convergence", label, "P_s changes when quadrature subdivisions are doubled",
                                    std::abs(base.p_success - fine.p_success)});
        }
        if (!sc.mc) {
            return out;
        }
        const auto ch = sc.channels(p.sigma_b);
        const auto sq = Squeezing::from_r(p.r);
        if (sc.postselect == PostSelectKind::Classical) {
            // Unnormalized accumulators: acceptance, acceptance * b, acceptance * c.
            const double v = sq.v();
            const double s = sq.correlation();
            const double zeta_th = p.threshold;
            const auto est = mc_expectation(
                3,
                [&](Rng& rng, std::span<double> o) {
                    const double zeta = draw_eta(ch.as, rng) * draw_eta(ch.sb, rng);
                    const double keep = zeta > zeta_th ? 1.0 : 0.0;
                    o[0] = keep;
                    o[1] = keep * (1.0 + zeta * (v - 1.0));
                    o[2] = keep * std::sqrt(zeta) * s;
                },
                *sc.mc);
            const double ps = base.p_success;
            compare_mc(label, "P_s", ps, est[0], out);
            compare_mc(label, "P_s * b", ps * base.cm(2, 2), est[1], out);
            compare_mc(label, "P_s * c", ps * base.cm(0, 2), est[2], out);
        } else {
            const QuantumPsConfig cfg{sc.tap_t, p.threshold};
            const auto ens = quantum_ensemble_moments(sq, ch.as, ch.sb, cfg, quad);
            const auto est = mc_expectation(
                6,
                [&](Rng& rng, std::span<double> o) {
                    const auto m = quantum_moments_realization(sq, draw_eta(ch.as, rng), draw_eta(ch.sb, rng), cfg);
                    o[0] = m.mean_qa;
                    o[1] = m.mean_qb;
                    o[2] = m.second_qa;
                    o[3] = m.second_qb;
                    o[4] = m.cross_qab;
                    o[5] = m.p_accept;
                },
                *sc.mc);
            const double quad_values[6] = {ens.q.mean_qa,   ens.q.mean_qb,   ens.q.second_qa,
                                           ens.q.second_qb, ens.q.cross_qab, ens.q.p_accept};
            const char* names[6] = {"<qA>", "<qB'>", "<qA^2>", "<qB'^2>", "<qA qB'>", "P_s"};
            for (std::size_t k = 0; k < 6; ++k) {
                compare_mc(label, names[k], quad_values[k], est[k], out);
            }
        }
    } catch (const std::exception& e) {
        out.failures.push_back({"evaluation", label, e.what(), std::numeric_limits<double>::quiet_NaN()});
    }
    return out;
}

}  // namespace

std::string ValidationReport::to_json() const {
    nlohmann::ordered_json j;
    j["passed"] = passed();
    j["points"] = points;
    j["cms_audited"] = cms_audited;
    j["mc_elements"] = mc_elements;
    j["failures"] = nlohmann::ordered_json::array();
    for (const auto& f : failures) {
        nlohmann::ordered_json item;
        item["check"] = f.check;
        item["location"] = f.location;
        item["detail"] = f.detail;
        if (std::isfinite(f.value)) {
            item["value"] = f.value;
        } else {
            item["value"] = nullptr;
        }
        j["failures"].push_back(std::move(item));
    }
    return j.dump(2);
}

ValidationReport validate_scenario(const Scenario& sc, int workers) {
    ValidationReport report;
    sc.validate(true);
    if (sc.quad.nodes_1d < QuadratureSpec::kMinNodes) {
        report.failures.push_back({"quadrature", "quad.nodes_1d",
                                   "below the minimum of " + std::to_string(QuadratureSpec::kMinNodes) +
                                       " nodes per panel",
                                   static_cast<double>(sc.quad.nodes_1d)});
    }
    const auto scheme_pts = scheme_points(sc);
    auto checks = parallel_map<PointCheck>(scheme_pts.size(), workers, [&](std::size_t i) {
        return check_scheme_point(sc, scheme_pts[i], sc.quad);
    });
    if (sc.postselect != PostSelectKind::None) {
        require_postselect_ready(sc);
        const auto pts = ps_points(sc);
        auto ps_checks = parallel_map<PointCheck>(
            pts.size(), workers, [&](std::size_t i) { return check_ps_point(sc, pts[i], sc.quad); });
        std::move(ps_checks.begin(), ps_checks.end(), std::back_inserter(checks));
    }
    for (auto& c : checks) {
        ++report.points;
        report.cms_audited += c.cms;
        report.mc_elements += c.mc_elements;
        std::move(c.failures.begin(), c.failures.end(), std::back_inserter(report.failures));
    }
    return report;
}

double rate_estimate(double p_success, double tx_rate_hz) {
    if (!(p_success >= 0.0 && p_success <= 1.0)) {
        throw DomainError("success probability must lie in [0, 1]");
    }
    if (!(tx_rate_hz > 0.0) || !std::isfinite(tx_rate_hz)) {
        throw DomainError("transmission rate must be finite and > 0");
    }
    return p_success * tx_rate_hz;
}

}  // namespace cvsat
