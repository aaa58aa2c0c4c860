#include "probrobust/random.hpp"

#include "probrobust/errors.hpp"

#include <cmath>
#include <limits>

namespace probrobust {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept {
    return splitmix64(splitmix64(base) ^ splitmix64(stream + 0x632BE59BD9B4E019ULL));
}

std::uint64_t derive_seed(std::uint64_t base, std::string_view tag, std::uint64_t index) noexcept {
    // FNV-1a over the tag keeps experiment streams apart.
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (const char c : tag) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    }
    return derive_seed(derive_seed(base, h), index);
}

Rng make_rng(std::uint64_t seed) {
    return Rng(splitmix64(seed));
}

double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::vector<double> PointBlock::point(std::size_t j) const {
    std::vector<double> p(d);
    for (std::size_t k = 0; k < d; ++k) p[k] = at(j, k);
    return p;
}

PointBlock PointBlock::from_points(std::span<const std::vector<double>> points, std::size_t d) {
    PointBlock block;
    block.n = points.size();
    block.d = d;
    block.columns.assign(block.n * d, 0.0);
    for (std::size_t j = 0; j < block.n; ++j) {
        if (points[j].size() != d) throw ValidationError("point dimension mismatch in block");
        for (std::size_t k = 0; k < d; ++k) block.columns[k * block.n + j] = points[j][k];
    }
    return block;
}

double lp_norm(std::span<const double> v, double p) {
    if (!(p >= 1.0)) throw ValidationError("norm order must be >= 1");
    double acc = 0.0;
    if (std::isinf(p)) {
        for (const double x : v) acc = std::max(acc, std::fabs(x));
        return acc;
    }
    if (p == 1.0) {
        for (const double x : v) acc += std::fabs(x);
        return acc;
    }
    if (p == 2.0) {
        for (const double x : v) acc += x * x;
        return std::sqrt(acc);
    }
    for (const double x : v) acc += std::pow(std::fabs(x), p);
    return std::pow(acc, 1.0 / p);
}

double dual_exponent(double p) {
    if (!(p >= 1.0)) throw ValidationError("norm order must be >= 1");
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    if (std::isinf(p)) return 1.0;
    return p / (p - 1.0);
}

PointBlock sample_lp_ball(std::size_t n, std::size_t d, double p, double radius, Rng& rng) {
    if (!(p >= 1.0)) throw ValidationError("norm order must be >= 1");
    if (!(radius > 0.0)) throw ValidationError("ball radius must be positive");
    if (d == 0) throw ValidationError("ball dimension must be positive");

    PointBlock block;
    block.n = n;
    block.d = d;
    block.columns.assign(n * d, 0.0);

    std::normal_distribution<double> normal(0.0, 1.0);
    std::exponential_distribution<double> exponential(1.0);
    std::gamma_distribution<double> gamma(1.0 / (std::isinf(p) ? 1.0 : p), 1.0);
    std::vector<double> point(d);

    for (std::size_t j = 0; j < n; ++j) {
        if (std::isinf(p)) {
            for (std::size_t k = 0; k < d; ++k) point[k] = (2.0 * uniform01(rng) - 1.0) * radius;
        } else {
            double norm = 0.0;
            do {
                for (std::size_t k = 0; k < d; ++k) {
                    if (p == 2.0) {
                        point[k] = normal(rng);
                    } else {
                        const double magnitude = p == 1.0 ? exponential(rng) : std::pow(gamma(rng), 1.0 / p);
                        point[k] = (rng() & 1u) ? magnitude : -magnitude;
                    }
                }
                norm = lp_norm(point, p);
            } while (!(norm > 0.0));
            const double scale = radius * std::pow(uniform01(rng), 1.0 / static_cast<double>(d)) / norm;
            for (std::size_t k = 0; k < d; ++k) point[k] *= scale;
        }
        // Rounding in the rescale can overshoot the sphere by an ulp or two.
        for (int guard = 0; guard < 64 && lp_norm(point, p) > radius; ++guard) {
            for (double& x : point) x *= 1.0 - 0x1.0p-50;
        }
        for (std::size_t k = 0; k < d; ++k) block.columns[k * n + j] = point[k];
    }
    return block;
}

}  // namespace probrobust
