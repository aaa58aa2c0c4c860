#include "probrobust/simd.hpp"

#include <cmath>

namespace probrobust::simd::scalar {

void shifted_dots(std::span<const double> columns, std::size_t n, std::span<const double> origin,
                  std::span<const double> w, std::span<double> out) {
    const std::size_t d = w.size();
    for (std::size_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            acc = acc + w[k] * (origin[k] + columns[k * n + j]);
        }
        out[j] = acc;
    }
}

std::size_t mark_mistakes(std::span<const double> scores, int label, std::span<std::uint8_t> flags) {
    std::size_t count = 0;
    for (std::size_t j = 0; j < scores.size(); ++j) {
        const bool positive = scores[j] >= 0.0;
        const bool mistake = label > 0 ? !positive : positive;
        if (!flags.empty()) flags[j] = mistake ? 1 : 0;
        count += mistake ? 1 : 0;
    }
    return count;
}

void accumulate(std::span<double> acc, std::span<const double> row, double scale) {
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] = acc[i] + scale * row[i];
}

void lp_norms(std::span<const double> columns, std::size_t n, std::size_t d, NormKind kind,
              std::span<double> out) {
    for (std::size_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            const double v = columns[k * n + j];
            switch (kind) {
                case NormKind::l1: acc = acc + std::fabs(v); break;
                case NormKind::l2: acc = acc + v * v; break;
                case NormKind::linf: {
                    const double a = std::fabs(v);
                    acc = acc > a ? acc : a;
                    break;
                }
            }
        }
        out[j] = kind == NormKind::l2 ? std::sqrt(acc) : acc;
    }
}

}  // namespace probrobust::simd::scalar
