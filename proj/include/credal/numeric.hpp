#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

#include "credal/errors.hpp"

namespace credal {

inline constexpr double tau_feas = 1e-7;
inline constexpr double tau_num = 1e-9;
inline constexpr double tau_sign = 1e-10;

namespace detail {

inline double parse_plain_number(std::string_view s) {
    double v = 0.0;
    auto first = s.data();
    auto last = s.data() + s.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || first == last)
        throw InputError("not a number: '" + std::string(s) + "'");
    return v;
}

} // namespace detail

/// Parses "0.25", "1/4", "-3/8" or "1e-3".
inline double parse_probability(std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    auto slash = s.find('/');
    if (slash == std::string_view::npos) return detail::parse_plain_number(s);
    double num = detail::parse_plain_number(s.substr(0, slash));
    double den = detail::parse_plain_number(s.substr(slash + 1));
    if (den == 0.0) throw InputError("zero denominator in '" + std::string(s) + "'");
    return num / den;
}

/// Canonical text for a double: a small fraction when that reproduces the
/// value exactly, otherwise the shortest round-trip decimal.
inline std::string format_number(double v) {
    if (v == 0.0) return "0";
    if (std::isfinite(v)) {
        if (v == std::floor(v) && std::fabs(v) < 1e15) {
            char buf[32];
            auto [p, ec] = std::to_chars(buf, buf + sizeof buf, static_cast<long long>(v));
            return std::string(buf, p);
        }
        for (std::int64_t den = 2; den <= 1024; ++den) {
            double num = std::round(v * static_cast<double>(den));
            if (std::fabs(num) > 1e12) break;
            if (num / static_cast<double>(den) == v) {
                return std::to_string(static_cast<long long>(num)) + "/" + std::to_string(den);
            }
        }
    }
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

/// Human-facing decimal with 12 significant digits, so float noise such as
/// 0.25000000000000006 prints as 0.25.
inline std::string display_number(double v) {
    if (v == 0.0) return "0";
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
    return std::string(buf, p);
}

} // namespace credal
