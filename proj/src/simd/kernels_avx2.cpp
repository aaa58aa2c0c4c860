// Compiled with -mavx2 (and without -mfma). Only reached through the
// dispatcher after a CPUID check.

#include "probrobust/simd.hpp"

#include <immintrin.h>

#include <bit>
#include <cmath>

namespace probrobust::simd::avx2 {
namespace {

inline __m256d abs_pd(__m256d v) {
    return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v);
}

}  // namespace

void shifted_dots(std::span<const double> columns, std::size_t n, std::span<const double> origin,
                  std::span<const double> w, std::span<double> out) {
    const std::size_t d = w.size();
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        __m256d acc = _mm256_setzero_pd();
        for (std::size_t k = 0; k < d; ++k) {
            const __m256d c = _mm256_loadu_pd(columns.data() + k * n + j);
            const __m256d shifted = _mm256_add_pd(_mm256_set1_pd(origin[k]), c);
            acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_set1_pd(w[k]), shifted));
        }
        _mm256_storeu_pd(out.data() + j, acc);
    }
    for (; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t k = 0; k < d; ++k) acc = acc + w[k] * (origin[k] + columns[k * n + j]);
        out[j] = acc;
    }
}

std::size_t mark_mistakes(std::span<const double> scores, int label, std::span<std::uint8_t> flags) {
    const std::size_t n = scores.size();
    const __m256d zero = _mm256_setzero_pd();
    std::size_t count = 0;
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        const __m256d s = _mm256_loadu_pd(scores.data() + j);
        unsigned positive = static_cast<unsigned>(_mm256_movemask_pd(_mm256_cmp_pd(s, zero, _CMP_GE_OQ)));
        const unsigned mistakes = label > 0 ? (~positive & 0xFu) : positive;
        count += static_cast<std::size_t>(std::popcount(mistakes));
        if (!flags.empty()) {
            for (unsigned lane = 0; lane < 4; ++lane) flags[j + lane] = (mistakes >> lane) & 1u;
        }
    }
    for (; j < n; ++j) {
        const bool positive = scores[j] >= 0.0;
        const bool mistake = label > 0 ? !positive : positive;
        if (!flags.empty()) flags[j] = mistake ? 1 : 0;
        count += mistake ? 1 : 0;
    }
    return count;
}

void accumulate(std::span<double> acc, std::span<const double> row, double scale) {
    const std::size_t n = acc.size();
    const __m256d s = _mm256_set1_pd(scale);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d a = _mm256_loadu_pd(acc.data() + i);
        const __m256d r = _mm256_loadu_pd(row.data() + i);
        _mm256_storeu_pd(acc.data() + i, _mm256_add_pd(a, _mm256_mul_pd(s, r)));
    }
    for (; i < n; ++i) acc[i] = acc[i] + scale * row[i];
}

void lp_norms(std::span<const double> columns, std::size_t n, std::size_t d, NormKind kind,
              std::span<double> out) {
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        __m256d acc = _mm256_setzero_pd();
        for (std::size_t k = 0; k < d; ++k) {
            const __m256d v = _mm256_loadu_pd(columns.data() + k * n + j);
            switch (kind) {
                case NormKind::l1: acc = _mm256_add_pd(acc, abs_pd(v)); break;
                case NormKind::l2: acc = _mm256_add_pd(acc, _mm256_mul_pd(v, v)); break;
                // max_pd(a, b) returns b unless a > b, matching the scalar select.
                case NormKind::linf: acc = _mm256_max_pd(acc, abs_pd(v)); break;
            }
        }
        if (kind == NormKind::l2) acc = _mm256_sqrt_pd(acc);
        _mm256_storeu_pd(out.data() + j, acc);
    }
    for (; j < n; ++j) {
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

}  // namespace probrobust::simd::avx2
