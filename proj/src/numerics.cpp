#include "cvsat/numerics.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

namespace cvsat {

void QuadratureSpec::validate() const {
    if (nodes_1d < kMinNodes) {
        throw DomainError("quadrature nodes_1d must be >= " + std::to_string(kMinNodes) + ", got " +
                          std::to_string(nodes_1d));
    }
    if (subdivisions < 1) {
        throw DomainError("quadrature subdivisions must be >= 1, got " + std::to_string(subdivisions));
    }
}

namespace {

std::vector<WeightedNode> compute_gauss_legendre(int n) {
    std::vector<WeightedNode> rule(static_cast<std::size_t>(n));
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Tricomi initial guess, then Newton on P_n.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule[static_cast<std::size_t>(i)] = {-x, w};
        rule[static_cast<std::size_t>(n - 1 - i)] = {x, w};
    }
    return rule;
}

}  // namespace

const std::vector<WeightedNode>& gauss_legendre(int n) {
    if (n < 1) {
        throw DomainError("gauss_legendre: node count must be >= 1");
    }
    static std::mutex mutex;
    static std::map<int, std::vector<WeightedNode>> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) {
        it = cache.emplace(n, compute_gauss_legendre(n)).first;
    }
    return it->second;
}

std::vector<WeightedNode> composite_rule(std::span<const double> breaks, int nodes_per_panel) {
    const auto& base = gauss_legendre(nodes_per_panel);
    std::vector<WeightedNode> out;
    if (breaks.size() < 2) {
        return out;
    }
    out.reserve((breaks.size() - 1) * base.size());
    for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
        const double lo = breaks[p];
        const double hi = breaks[p + 1];
        const double half = 0.5 * (hi - lo);
        const double mid = 0.5 * (hi + lo);
        if (half <= 0.0) {
            continue;
        }
        for (const auto& node : base) {
            out.push_back({mid + half * node.x, half * node.w});
        }
    }
    return out;
}

std::vector<WeightedNode> composite_rule(double lo, double hi, int panels, int nodes_per_panel) {
    if (panels < 1) {
        throw DomainError("composite_rule: panel count must be >= 1");
    }
    std::vector<double> breaks(static_cast<std::size_t>(panels) + 1);
    for (int i = 0; i <= panels; ++i) {
        breaks[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / panels;
    }
    breaks.back() = hi;
    return composite_rule(breaks, nodes_per_panel);
}

namespace detail {
void throw_non_finite(double x) {
    std::ostringstream msg;
    msg << "integrand is not finite at x = " << x;
    throw NumericalError(msg.str());
}
}  // namespace detail

double erfc(double x) { return std::erfc(x); }

double bessel_i(int order, double x) {
    if (order != 0 && order != 1) {
        throw DomainError("bessel_i: only orders 0 and 1 are provided");
    }
    if (!(x >= 0.0)) {
        throw DomainError("bessel_i: argument must be >= 0");
    }
    return std::cyl_bessel_i(static_cast<double>(order), x);
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

void McSpec::validate() const {
    if (samples < 10'000) {
        throw DomainError("Monte Carlo samples must be >= 10000");
    }
    if (workers < 1) {
        throw DomainError("Monte Carlo workers must be >= 1");
    }
}

namespace {

struct Moments {
    std::uint64_t n = 0;
    std::vector<double> mean;
    std::vector<double> m2;
};

// Chan et al. pairwise combination of running moments.
void merge_into(Moments& acc, const Moments& part) {
    if (part.n == 0) {
        return;
    }
    if (acc.n == 0) {
        acc = part;
        return;
    }
    const double na = static_cast<double>(acc.n);
    const double nb = static_cast<double>(part.n);
    const double n = na + nb;
    for (std::size_t k = 0; k < acc.mean.size(); ++k) {
        const double delta = part.mean[k] - acc.mean[k];
        acc.mean[k] += delta * nb / n;
        acc.m2[k] += part.m2[k] + delta * delta * na * nb / n;
    }
    acc.n += part.n;
}

Moments run_partition(std::size_t n_outputs, const McDraw& draw, std::uint64_t seed, int partition,
                      std::uint64_t count) {
    Moments m{0, std::vector<double>(n_outputs, 0.0), std::vector<double>(n_outputs, 0.0)};
    Rng rng(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(partition) + 1)));
    std::vector<double> values(n_outputs);
    for (std::uint64_t i = 0; i < count; ++i) {
        draw(rng, values);
        ++m.n;
        const double n = static_cast<double>(m.n);
        for (std::size_t k = 0; k < n_outputs; ++k) {
            const double delta = values[k] - m.mean[k];
            m.mean[k] += delta / n;
            m.m2[k] += delta * (values[k] - m.mean[k]);
        }
    }
    return m;
}

}  // namespace

std::vector<McEstimate> mc_expectation(std::size_t n_outputs, const McDraw& draw, const McSpec& spec) {
    spec.validate();
    constexpr int parts = McSpec::kPartitions;
    std::vector<Moments> partials(parts);
    auto count_of = [&](int p) {
        const std::uint64_t base = spec.samples / parts;
        return base + (static_cast<std::uint64_t>(p) < spec.samples % parts ? 1 : 0);
    };
    const int workers = std::min(spec.workers, parts);
    if (workers == 1) {
        for (int p = 0; p < parts; ++p) {
            partials[p] = run_partition(n_outputs, draw, spec.seed, p, count_of(p));
        }
    } else {
        std::vector<std::jthread> pool;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (int p = w; p < parts; p += workers) {
                    partials[p] = run_partition(n_outputs, draw, spec.seed, p, count_of(p));
                }
            });
        }
    }
    Moments total;
    for (const auto& part : partials) {
        merge_into(total, part);
    }
    std::vector<McEstimate> out(n_outputs);
    for (std::size_t k = 0; k < n_outputs; ++k) {
        out[k].mean = total.mean[k];
        if (total.n > 1) {
            const double n = static_cast<double>(total.n);
            out[k].std_err = std::sqrt(total.m2[k] / (n - 1.0) / n);
        }
    }
    return out;
}

McEstimate mc_expectation(const std::function<double(Rng&)>& draw, const McSpec& spec) {
    return mc_expectation(1, [&](Rng& rng, std::span<double> out) { out[0] = draw(rng); }, spec)[0];
}

}  // namespace cvsat
