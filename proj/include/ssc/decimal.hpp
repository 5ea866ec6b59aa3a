#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>

#include "ssc/error.hpp"

namespace ssc {

/// Exact fixed-point decimal: `units * 10^-scale`.
///
/// Every value carries its own scale. Literal text keeps the number of
/// fractional digits it was written with; evaluation rescales everything to
/// the working scale and rounds half-even wherever digits are lost.
class Decimal {
public:
    static constexpr int kMaxScale = 12;

    constexpr Decimal() = default;

    static Decimal from_units(std::int64_t units, int scale) {
        check_scale(scale);
        Decimal d;
        d.units_ = units;
        d.scale_ = scale;
        return d;
    }

    static Decimal from_int(std::int64_t value, int scale = 0) {
        return from_units(narrow(static_cast<__int128>(value) * pow10(scale)), scale);
    }

    /// Parses `[-]digits[.digits]`. No exponent, no separators.
    static Decimal parse(std::string_view text) {
        std::string_view s = text;
        bool negative = false;
        if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
            negative = s.front() == '-';
            s.remove_prefix(1);
        }
        if (s.empty()) {
            throw Error("BAD_DECIMAL", "invalid decimal '" + std::string(text) + "'");
        }
        __int128 units = 0;
        int scale = 0;
        bool seen_point = false;
        bool seen_digit = false;
        for (char c : s) {
            if (c == '.') {
                if (seen_point) {
                    throw Error("BAD_DECIMAL", "invalid decimal '" + std::string(text) + "'");
                }
                seen_point = true;
                continue;
            }
            if (c < '0' || c > '9') {
                throw Error("BAD_DECIMAL", "invalid decimal '" + std::string(text) + "'");
            }
            seen_digit = true;
            units = units * 10 + (c - '0');
            if (units > std::numeric_limits<std::int64_t>::max()) {
                throw Error("DECIMAL_OVERFLOW", "decimal out of range '" + std::string(text) + "'");
            }
            if (seen_point) {
                ++scale;
            }
        }
        if (!seen_digit || s.back() == '.' || s.front() == '.') {
            throw Error("BAD_DECIMAL", "invalid decimal '" + std::string(text) + "'");
        }
        if (scale > kMaxScale) {
            throw Error("BAD_DECIMAL", "too many fractional digits in '" + std::string(text) + "'");
        }
        return from_units(narrow(negative ? -units : units), scale);
    }

    std::int64_t units() const noexcept { return units_; }
    int scale() const noexcept { return scale_; }
    bool is_zero() const noexcept { return units_ == 0; }
    bool is_negative() const noexcept { return units_ < 0; }

    /// Same value at another scale, rounding half-even when digits drop.
    Decimal rescaled(int scale) const {
        check_scale(scale);
        if (scale >= scale_) {
            return from_units(narrow(static_cast<__int128>(units_) * pow10(scale - scale_)), scale);
        }
        return from_units(narrow(round_half_even(units_, pow10(scale_ - scale))), scale);
    }

    /// Canonical text with exactly `scale()` fractional digits.
    std::string to_string() const {
        __int128 u = units_;
        bool negative = u < 0;
        if (negative) {
            u = -u;
        }
        std::string digits = digits_of(u);
        if (scale_ > 0) {
            if (static_cast<int>(digits.size()) <= scale_) {
                digits.insert(0, static_cast<std::size_t>(scale_) + 1 - digits.size(), '0');
            }
            digits.insert(digits.size() - static_cast<std::size_t>(scale_), 1, '.');
        }
        return negative ? "-" + digits : digits;
    }

    /// Display form with thousands separators ("135,486.00").
    std::string to_display() const {
        std::string text = to_string();
        std::size_t start = text.front() == '-' ? 1 : 0;
        std::size_t point = text.find('.');
        std::size_t int_end = point == std::string::npos ? text.size() : point;
        std::string out = text.substr(0, start);
        std::size_t int_len = int_end - start;
        for (std::size_t i = 0; i < int_len; ++i) {
            if (i > 0 && (int_len - i) % 3 == 0) {
                out.push_back(',');
            }
            out.push_back(text[start + i]);
        }
        out += text.substr(int_end);
        return out;
    }

    friend std::strong_ordering operator<=>(const Decimal& a, const Decimal& b) {
        int scale = a.scale_ > b.scale_ ? a.scale_ : b.scale_;
        __int128 x = static_cast<__int128>(a.units_) * pow10(scale - a.scale_);
        __int128 y = static_cast<__int128>(b.units_) * pow10(scale - b.scale_);
        return x <=> y;
    }

    /// Numeric equality: 1.5 == 1.50.
    friend bool operator==(const Decimal& a, const Decimal& b) { return (a <=> b) == 0; }

    friend Decimal operator+(const Decimal& a, const Decimal& b) {
        int scale = a.scale_ > b.scale_ ? a.scale_ : b.scale_;
        return from_units(narrow(static_cast<__int128>(a.units_) * pow10(scale - a.scale_) +
                                 static_cast<__int128>(b.units_) * pow10(scale - b.scale_)),
                          scale);
    }

    friend Decimal operator-(const Decimal& a, const Decimal& b) {
        int scale = a.scale_ > b.scale_ ? a.scale_ : b.scale_;
        return from_units(narrow(static_cast<__int128>(a.units_) * pow10(scale - a.scale_) -
                                 static_cast<__int128>(b.units_) * pow10(scale - b.scale_)),
                          scale);
    }

    Decimal operator-() const { return from_units(narrow(-static_cast<__int128>(units_)), scale_); }

    /// Product rounded half-even to `scale`.
    static Decimal multiply(const Decimal& a, const Decimal& b, int scale) {
        check_scale(scale);
        __int128 product = static_cast<__int128>(a.units_) * b.units_;
        int product_scale = a.scale_ + b.scale_;
        if (product_scale >= scale) {
            return from_units(narrow(round_half_even(product, pow10(product_scale - scale))), scale);
        }
        return from_units(narrow(product * pow10(scale - product_scale)), scale);
    }

    /// Quotient rounded half-even to `scale`. Throws DIVIDE_BY_ZERO.
    static Decimal divide(const Decimal& a, const Decimal& b, int scale) {
        check_scale(scale);
        if (b.units_ == 0) {
            throw Error("DIVIDE_BY_ZERO", "division by zero");
        }
        // a/b at `scale` = a.units * 10^(scale + b.scale - a.scale) / b.units
        int shift = scale + b.scale_ - a.scale_;
        __int128 num = a.units_;
        __int128 den = b.units_;
        if (shift >= 0) {
            num *= pow10(shift);
        } else {
            den *= pow10(-shift);
        }
        return from_units(narrow(round_half_even(num, den)), scale);
    }

    static __int128 pow10(int n) {
        __int128 p = 1;
        for (int i = 0; i < n; ++i) {
            p *= 10;
        }
        return p;
    }

    /// Integer quotient num/den rounded half to even.
    static __int128 round_half_even(__int128 num, __int128 den) {
        if (den < 0) {
            num = -num;
            den = -den;
        }
        __int128 q = num / den;
        __int128 r = num % den;
        if (r == 0) {
            return q;
        }
        __int128 twice = (r < 0 ? -r : r) * 2;
        int sign = num < 0 ? -1 : 1;
        if (twice > den || (twice == den && (q % 2 != 0))) {
            q += sign;
        }
        return q;
    }

private:
    static void check_scale(int scale) {
        if (scale < 0 || scale > kMaxScale) {
            throw Error("BAD_SCALE", "decimal scale must be in [0, 12]");
        }
    }

    static std::int64_t narrow(__int128 v) {
        if (v > std::numeric_limits<std::int64_t>::max() ||
            v < std::numeric_limits<std::int64_t>::min()) {
            throw Error("DECIMAL_OVERFLOW", "decimal overflow");
        }
        return static_cast<std::int64_t>(v);
    }

    static std::string digits_of(__int128 u) {
        if (u == 0) {
            return "0";
        }
        std::string s;
        while (u > 0) {
            s.insert(s.begin(), static_cast<char>('0' + static_cast<int>(u % 10)));
            u /= 10;
        }
        return s;
    }

    std::int64_t units_ = 0;
    int scale_ = 0;
};

} // namespace ssc
