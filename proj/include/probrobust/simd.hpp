#pragma once

// Data-parallel inner loops. Every kernel has a scalar reference
// implementation and an AVX2 variant that performs the same floating-point
// operations in the same order per output lane, so the two are bit-identical.
// The variant is picked once at runtime from CPUID; PROBROBUST_SIMD=scalar
// forces the reference path.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace probrobust::simd {

enum class Isa { scalar, avx2 };

enum class NormKind { l1, l2, linf };

[[nodiscard]] bool isa_supported(Isa isa) noexcept;
[[nodiscard]] Isa active_isa() noexcept;
/// Throws std::invalid_argument when the CPU lacks `isa`.
void set_isa(Isa isa);
[[nodiscard]] std::string_view isa_name(Isa isa) noexcept;

// Point blocks are column-major: coordinate k of point j lives at
// columns[k * n + j].

/// out[j] = sum_k w[k] * (origin[k] + columns[k*n + j]), summed in k order.
void shifted_dots(std::span<const double> columns, std::size_t n, std::span<const double> origin,
                  std::span<const double> w, std::span<double> out);

/// A score s predicts +1 when s >= 0 and -1 otherwise. Sets flags[j] to 1 where
/// the prediction differs from `label` (flags may be empty) and returns the
/// number of such lanes.
std::size_t mark_mistakes(std::span<const double> scores, int label, std::span<std::uint8_t> flags);

/// acc[i] += scale * row[i].
void accumulate(std::span<double> acc, std::span<const double> row, double scale);

/// Per-point l1, l2 or l-infinity norm of a column-major block.
void lp_norms(std::span<const double> columns, std::size_t n, std::size_t d, NormKind kind,
              std::span<double> out);

namespace scalar {
void shifted_dots(std::span<const double> columns, std::size_t n, std::span<const double> origin,
                  std::span<const double> w, std::span<double> out);
std::size_t mark_mistakes(std::span<const double> scores, int label, std::span<std::uint8_t> flags);
void accumulate(std::span<double> acc, std::span<const double> row, double scale);
void lp_norms(std::span<const double> columns, std::size_t n, std::size_t d, NormKind kind,
              std::span<double> out);
}  // namespace scalar

namespace avx2 {
void shifted_dots(std::span<const double> columns, std::size_t n, std::span<const double> origin,
                  std::span<const double> w, std::span<double> out);
std::size_t mark_mistakes(std::span<const double> scores, int label, std::span<std::uint8_t> flags);
void accumulate(std::span<double> acc, std::span<const double> row, double scale);
void lp_norms(std::span<const double> columns, std::size_t n, std::size_t d, NormKind kind,
              std::span<double> out);
}  // namespace avx2

}  // namespace probrobust::simd
