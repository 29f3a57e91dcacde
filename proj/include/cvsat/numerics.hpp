#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "cvsat/errors.hpp"

namespace cvsat {

/// Composite Gauss-Legendre rule: `subdivisions` equal panels, `nodes_1d` nodes each.
struct QuadratureSpec {
    int nodes_1d = 64;
    int subdivisions = 8;

    /// Production minimum for nodes_1d.
    static constexpr int kMinNodes = 8;

    /// Throws DomainError unless nodes_1d >= kMinNodes and subdivisions >= 1.
    void validate() const;
    QuadratureSpec doubled() const { return {nodes_1d, 2 * subdivisions}; }
};

struct WeightedNode {
    double x;
    double w;
};

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1]. Cached per n.
const std::vector<WeightedNode>& gauss_legendre(int n);

/// Composite rule over consecutive panels [breaks[i], breaks[i+1]].
std::vector<WeightedNode> composite_rule(std::span<const double> breaks, int nodes_per_panel);

/// Equal panels on [lo, hi].
std::vector<WeightedNode> composite_rule(double lo, double hi, int panels, int nodes_per_panel);

namespace detail {
[[noreturn]] void throw_non_finite(double x);
}

template <class F>
double integrate_1d(F&& f, double lo, double hi, const QuadratureSpec& spec) {
    if (!(lo <= hi)) {
        throw DomainError("integrate_1d: lo must not exceed hi");
    }
    double sum = 0.0;
    for (const auto& node : composite_rule(lo, hi, spec.subdivisions, spec.nodes_1d)) {
        const double fx = f(node.x);
        if (!std::isfinite(fx)) {
            detail::throw_non_finite(node.x);
        }
        sum += node.w * fx;
    }
    return sum;
}

struct Box {
    double lo1, hi1, lo2, hi2;
};

template <class F>
double integrate_2d(F&& f, const Box& box, const QuadratureSpec& spec) {
    if (!(box.lo1 <= box.hi1) || !(box.lo2 <= box.hi2)) {
        throw DomainError("integrate_2d: empty box");
    }
    const auto outer = composite_rule(box.lo1, box.hi1, spec.subdivisions, spec.nodes_1d);
    const auto inner = composite_rule(box.lo2, box.hi2, spec.subdivisions, spec.nodes_1d);
    double sum = 0.0;
    for (const auto& x : outer) {
        double row = 0.0;
        for (const auto& y : inner) {
            const double fxy = f(x.x, y.x);
            if (!std::isfinite(fxy)) {
                detail::throw_non_finite(x.x);
            }
            row += y.w * fxy;
        }
        sum += x.w * row;
    }
    return sum;
}

double erfc(double x);

/// Modified Bessel function of the first kind, order 0 or 1. x >= 0.
double bessel_i(int order, double x);

/// 64-bit Mersenne twister with fixed-bit-pattern conversions to doubles.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1) from the top 53 bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    /// Uniform on (0, 1].
    double uniform_pos() { return 1.0 - uniform(); }

    std::uint64_t next() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

struct McSpec {
    std::uint64_t samples = 1'000'000;
    std::uint64_t seed = 20140601;
    int workers = 1;

    /// Fixed stream partitioning; independent of `workers`.
    static constexpr int kPartitions = 64;

    void validate() const;
};

struct McEstimate {
    double mean = 0.0;
    double std_err = 0.0;
};

/// One draw: fills `out` with the sampled values of every tracked quantity.
using McDraw = std::function<void(Rng&, std::span<double> out)>;

/// Sample mean and standard error of each of `n_outputs` quantities over i.i.d. draws.
/// Bit-identical for identical (seed, samples) whatever the worker count.
std::vector<McEstimate> mc_expectation(std::size_t n_outputs, const McDraw& draw, const McSpec& spec);

McEstimate mc_expectation(const std::function<double(Rng&)>& draw, const McSpec& spec);

}  // namespace cvsat
