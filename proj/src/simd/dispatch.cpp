#include "probrobust/simd.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace probrobust::simd {
namespace {

Isa detect() noexcept {
    if (const char* forced = std::getenv("PROBROBUST_SIMD"); forced != nullptr && std::string(forced) == "scalar") {
        return Isa::scalar;
    }
    return isa_supported(Isa::avx2) ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& current() noexcept {
    static std::atomic<Isa> isa{detect()};
    return isa;
}

}  // namespace

bool isa_supported(Isa isa) noexcept {
    switch (isa) {
        case Isa::scalar: return true;
        case Isa::avx2:
#if defined(__x86_64__) || defined(__i386__)
            return __builtin_cpu_supports("avx2");
#else
            return false;
#endif
    }
    return false;
}

Isa active_isa() noexcept { return current().load(std::memory_order_relaxed); }

void set_isa(Isa isa) {
    if (!isa_supported(isa)) throw std::invalid_argument("instruction set not supported on this CPU");
    current().store(isa, std::memory_order_relaxed);
}

std::string_view isa_name(Isa isa) noexcept {
    return isa == Isa::avx2 ? "avx2" : "scalar";
}

void shifted_dots(std::span<const double> columns, std::size_t n, std::span<const double> origin,
                  std::span<const double> w, std::span<double> out) {
    if (active_isa() == Isa::avx2) return avx2::shifted_dots(columns, n, origin, w, out);
    scalar::shifted_dots(columns, n, origin, w, out);
}

std::size_t mark_mistakes(std::span<const double> scores, int label, std::span<std::uint8_t> flags) {
    if (active_isa() == Isa::avx2) return avx2::mark_mistakes(scores, label, flags);
    return scalar::mark_mistakes(scores, label, flags);
}

void accumulate(std::span<double> acc, std::span<const double> row, double scale) {
    if (active_isa() == Isa::avx2) return avx2::accumulate(acc, row, scale);
    scalar::accumulate(acc, row, scale);
}

void lp_norms(std::span<const double> columns, std::size_t n, std::size_t d, NormKind kind,
              std::span<double> out) {
    if (active_isa() == Isa::avx2) return avx2::lp_norms(columns, n, d, kind, out);
    scalar::lp_norms(columns, n, d, kind, out);
}

}  // namespace probrobust::simd
