#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace probrobust {

/// Exact fraction over 64-bit integers, always stored in lowest terms with a
/// positive denominator. Every operation checks for overflow and throws
/// RationalOverflow instead of wrapping.
class Rational {
public:
    constexpr Rational() = default;
    Rational(std::int64_t value);  // NOLINT(google-explicit-constructor)
    Rational(std::int64_t num, std::int64_t den);

    [[nodiscard]] std::int64_t num() const noexcept { return num_; }
    [[nodiscard]] std::int64_t den() const noexcept { return den_; }

    [[nodiscard]] double to_double() const noexcept;
    [[nodiscard]] std::string to_string() const;

    [[nodiscard]] bool is_zero() const noexcept { return num_ == 0; }
    [[nodiscard]] bool is_positive() const noexcept { return num_ > 0; }
    [[nodiscard]] bool is_negative() const noexcept { return num_ < 0; }

    Rational& operator+=(const Rational& rhs);
    Rational& operator-=(const Rational& rhs);
    Rational& operator*=(const Rational& rhs);
    Rational& operator/=(const Rational& rhs);

    friend Rational operator+(Rational lhs, const Rational& rhs) { return lhs += rhs; }
    friend Rational operator-(Rational lhs, const Rational& rhs) { return lhs -= rhs; }
    friend Rational operator*(Rational lhs, const Rational& rhs) { return lhs *= rhs; }
    friend Rational operator/(Rational lhs, const Rational& rhs) { return lhs /= rhs; }
    Rational operator-() const;

    friend bool operator==(const Rational& lhs, const Rational& rhs) noexcept {
        return lhs.num_ == rhs.num_ && lhs.den_ == rhs.den_;
    }
    friend std::strong_ordering operator<=>(const Rational& lhs, const Rational& rhs) noexcept;

    /// Parses `p/q`, an integer, or a plain decimal such as `0.25`. Decimals
    /// are converted digit by digit, never through a double, and rejected when
    /// the reduced denominator exceeds `max_decimal_den`.
    static Rational parse(std::string_view text, std::int64_t max_decimal_den = 1 << 16);

private:
    static Rational from_wide(__int128 num, __int128 den);

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

}  // namespace probrobust
