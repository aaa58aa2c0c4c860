#include "probrobust/rational.hpp"

#include "probrobust/errors.hpp"

#include <charconv>
#include <limits>

namespace probrobust {
namespace {

__int128 gcd128(__int128 a, __int128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        const __int128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

bool fits64(__int128 v) {
    return v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max();
}

std::int64_t parse_int(std::string_view text, std::string_view whole) {
    std::int64_t value = 0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || first == last) {
        throw ParseError("invalid rational literal '" + std::string(whole) + "'");
    }
    return value;
}

}  // namespace

Rational::Rational(std::int64_t value) : num_(value), den_(1) {}

Rational::Rational(std::int64_t num, std::int64_t den) {
    if (den == 0) throw ValidationError("rational with zero denominator");
    *this = from_wide(num, den);
}

Rational Rational::from_wide(__int128 num, __int128 den) {
    if (den == 0) throw ValidationError("rational with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const __int128 g = gcd128(num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    if (num == 0) den = 1;
    if (!fits64(num) || !fits64(den)) throw RationalOverflow("rational arithmetic overflowed 64 bits");
    Rational r;
    r.num_ = static_cast<std::int64_t>(num);
    r.den_ = static_cast<std::int64_t>(den);
    return r;
}

double Rational::to_double() const noexcept {
    return static_cast<double>(num_) / static_cast<double>(den_);
}

std::string Rational::to_string() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational& Rational::operator+=(const Rational& rhs) {
    *this = from_wide(static_cast<__int128>(num_) * rhs.den_ + static_cast<__int128>(rhs.num_) * den_,
                      static_cast<__int128>(den_) * rhs.den_);
    return *this;
}

Rational& Rational::operator-=(const Rational& rhs) {
    *this = from_wide(static_cast<__int128>(num_) * rhs.den_ - static_cast<__int128>(rhs.num_) * den_,
                      static_cast<__int128>(den_) * rhs.den_);
    return *this;
}

Rational& Rational::operator*=(const Rational& rhs) {
    *this = from_wide(static_cast<__int128>(num_) * rhs.num_, static_cast<__int128>(den_) * rhs.den_);
    return *this;
}

Rational& Rational::operator/=(const Rational& rhs) {
    if (rhs.num_ == 0) throw ValidationError("rational division by zero");
    *this = from_wide(static_cast<__int128>(num_) * rhs.den_, static_cast<__int128>(den_) * rhs.num_);
    return *this;
}

Rational Rational::operator-() const {
    return from_wide(-static_cast<__int128>(num_), den_);
}

std::strong_ordering operator<=>(const Rational& lhs, const Rational& rhs) noexcept {
    const __int128 a = static_cast<__int128>(lhs.num_) * rhs.den_;
    const __int128 b = static_cast<__int128>(rhs.num_) * lhs.den_;
    if (a < b) return std::strong_ordering::less;
    if (a > b) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

Rational Rational::parse(std::string_view text, std::int64_t max_decimal_den) {
    const std::string_view whole = text;
    while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
    while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
    if (text.empty()) throw ParseError("empty rational literal");

    if (const auto slash = text.find('/'); slash != std::string_view::npos) {
        const auto num = parse_int(text.substr(0, slash), whole);
        const auto den = parse_int(text.substr(slash + 1), whole);
        if (den == 0) throw ParseError("rational literal '" + std::string(whole) + "' has zero denominator");
        return Rational(num, den);
    }

    const auto dot = text.find('.');
    if (dot == std::string_view::npos) return Rational(parse_int(text, whole));

    bool negative = false;
    std::string_view body = text;
    if (body.front() == '-' || body.front() == '+') {
        negative = body.front() == '-';
        body.remove_prefix(1);
    }
    const auto int_part = body.substr(0, body.find('.'));
    const auto frac_part = body.substr(body.find('.') + 1);
    if ((int_part.empty() && frac_part.empty()) || frac_part.find_first_not_of("0123456789") != std::string_view::npos ||
        int_part.find_first_not_of("0123456789") != std::string_view::npos) {
        throw ParseError("invalid rational literal '" + std::string(whole) + "'");
    }
    if (frac_part.size() > 18) throw ParseError("decimal literal '" + std::string(whole) + "' has too many digits");

    __int128 num = 0;
    for (const char c : int_part) {
        num = num * 10 + (c - '0');
        if (!fits64(num)) throw RationalOverflow("decimal literal out of range");
    }
    __int128 den = 1;
    for (const char c : frac_part) {
        num = num * 10 + (c - '0');
        den *= 10;
        if (!fits64(num)) throw RationalOverflow("decimal literal out of range");
    }
    Rational r = from_wide(negative ? -num : num, den);
    if (r.den() > max_decimal_den) {
        throw ParseError("decimal literal '" + std::string(whole) +
                         "' is not exactly representable with denominator <= " + std::to_string(max_decimal_den));
    }
    return r;
}

}  // namespace probrobust
