#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace probrobust {

using Rng = std::mt19937_64;

[[nodiscard]] std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Mixes a base seed with a stream index; used for per-example and per-trial
/// seeds so that every stochastic step is a pure function of its inputs.
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept;
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t base, std::string_view tag, std::uint64_t index) noexcept;

[[nodiscard]] Rng make_rng(std::uint64_t seed);

/// Uniform double in [0, 1) built from the top 53 bits of one draw.
[[nodiscard]] double uniform01(Rng& rng);

/// n points in d dimensions, column-major (coordinate k of point j at
/// columns[k * n + j]); the layout the simd kernels consume.
struct PointBlock {
    std::size_t n = 0;
    std::size_t d = 0;
    std::vector<double> columns;

    [[nodiscard]] double at(std::size_t j, std::size_t k) const { return columns[k * n + j]; }
    [[nodiscard]] std::vector<double> point(std::size_t j) const;
    static PointBlock from_points(std::span<const std::vector<double>> points, std::size_t d);
};

/// ||v||_p for p >= 1; p = +infinity gives the max norm.
[[nodiscard]] double lp_norm(std::span<const double> v, double p);

/// Hoelder conjugate q with 1/p + 1/q = 1 (p = 1 gives +inf, p = inf gives 1).
[[nodiscard]] double dual_exponent(double p);

/// Uniform draws from the closed l_p ball of the given radius. Every returned
/// point satisfies lp_norm(point, p) <= radius exactly.
///   p = 2   : normalized Gaussian direction times radius * U^(1/d)
///   p = inf : independent uniform coordinates
///   p = 1   : signed exponential direction times radius * U^(1/d)
///   other p : signed generalized-Gaussian direction times radius * U^(1/d)
[[nodiscard]] PointBlock sample_lp_ball(std::size_t n, std::size_t d, double p, double radius, Rng& rng);

}  // namespace probrobust
