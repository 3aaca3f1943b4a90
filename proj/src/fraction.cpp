#include "ruaf/fraction.hpp"

#include <cctype>

namespace ruaf {

namespace {

std::int64_t parse_int(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("empty number in fraction");
    std::int64_t v = 0;
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c)))
            throw std::invalid_argument("bad digit in fraction: '" + s + "'");
        v = v * 10 + (c - '0');
        if (v > 2'000'000'000) throw std::invalid_argument("fraction term too large: '" + s + "'");
    }
    return v;
}

}  // namespace

Fraction parse_fraction(const std::string& text) {
    Fraction f;
    auto slash = text.find('/');
    auto dot = text.find('.');
    if (slash != std::string::npos) {
        f.num = parse_int(text.substr(0, slash));
        f.den = parse_int(text.substr(slash + 1));
    } else if (dot != std::string::npos) {
        const std::string whole = text.substr(0, dot);
        const std::string frac = text.substr(dot + 1);
        if (frac.size() > 9) throw std::invalid_argument("too many decimal digits: '" + text + "'");
        std::int64_t den = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
        f.num = parse_int(whole.empty() ? "0" : whole) * den + (frac.empty() ? 0 : parse_int(frac));
        f.den = den;
    } else {
        f.num = parse_int(text);
        f.den = 1;
    }
    const std::int64_t g = std::gcd(f.num, f.den);
    if (g > 1) {
        f.num /= g;
        f.den /= g;
    }
    if (!f.valid())
        throw std::invalid_argument("dropout fraction must be in (0,1): '" + text + "'");
    return f;
}

}  // namespace ruaf
