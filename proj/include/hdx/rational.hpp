#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace hdx {

// Exact rational for boundary values (epsilon parameters, reported
// eigenvalue targets). Desk-scale magnitudes only.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rational() = default;
    Rational(std::int64_t n) : num(n), den(1) {}
    Rational(std::int64_t n, std::int64_t d) : num(n), den(d) { normalize(); }

    void normalize() {
        if (den == 0) throw std::invalid_argument("rational: zero denominator");
        if (den < 0) { num = -num; den = -den; }
        std::int64_t g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) { num /= g; den /= g; }
    }

    static Rational parse(const std::string& s) {
        auto slash = s.find('/');
        if (slash == std::string::npos) return Rational(std::stoll(s));
        return Rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
    }
    std::string str() const {
        return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
    }
    double value() const { return double(num) / double(den); }

    friend Rational operator*(const Rational& a, const Rational& b) {
        return Rational(a.num * b.num, a.den * b.den);
    }
    friend Rational operator+(const Rational& a, const Rational& b) {
        return Rational(a.num * b.den + b.num * a.den, a.den * b.den);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        return Rational(a.num * b.den - b.num * a.den, a.den * b.den);
    }
    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num == b.num && a.den == b.den;
    }
    friend bool operator<(const Rational& a, const Rational& b) {
        return a.num * b.den < b.num * a.den;
    }
};

// eps*n as an exact integer; throws if not integral.
inline std::int64_t scaled_integer(const Rational& eps, std::int64_t n) {
    std::int64_t t = eps.num * n;
    if (t % eps.den != 0) throw std::invalid_argument("rational: " + eps.str() + "*" +
                                                      std::to_string(n) + " is not an integer");
    return t / eps.den;
}

} // namespace hdx
