#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ruaf {

// Exact rational threshold. The dropout property compares an integer count
// against fraction * (r - i); doing that in floating point flips the
// boundary cases (e.g. count == (r - i) / 3 exactly), so the comparison is
// kept in integer arithmetic.
struct Fraction {
    std::int64_t num = 1;
    std::int64_t den = 3;

    constexpr Fraction() = default;
    constexpr Fraction(std::int64_t n, std::int64_t d) : num(n), den(d) {}

    // true iff count <= (num/den) * span
    [[nodiscard]] bool leq_scaled(std::int64_t count, std::int64_t span) const {
        return count * den <= num * span;
    }

    [[nodiscard]] double value() const {
        return static_cast<double>(num) / static_cast<double>(den);
    }

    [[nodiscard]] bool valid() const {
        return num > 0 && den > 0 && num < den;
    }

    [[nodiscard]] std::string str() const {
        return std::to_string(num) + "/" + std::to_string(den);
    }

    friend bool operator==(const Fraction&, const Fraction&) = default;
};

// Accepts "p/q" or a decimal such as "0.25". Decimals are converted exactly
// (at most 9 fractional digits), so "0.3333" means 3333/10000, not 1/3.
Fraction parse_fraction(const std::string& text);

}  // namespace ruaf
