#pragma once

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <string_view>

#include "quphox/rational.hpp"

namespace quphox {

/// Exact element of the cyclotomic field Q(zeta_8), zeta = exp(i*pi/4),
/// stored as c0 + c1*zeta + c2*zeta^2 + c3*zeta^3 with rational coefficients.
/// The reduction zeta^4 = -1 keeps every value in this canonical degree-<4
/// form, so equality is plain coefficient comparison.
///
/// The field contains i = zeta^2, sqrt(2) = zeta - zeta^3 and every phase
/// exp(i*k*pi/4) — the whole amplitude lattice the element toolbox produces.
class CycNum {
public:
    CycNum() = default; // zero
    CycNum(Rational c0, Rational c1, Rational c2, Rational c3)
        : c_{std::move(c0), std::move(c1), std::move(c2), std::move(c3)} {}

    static CycNum from_int(long long n) { return CycNum(Rational(n), 0, 0, 0); }
    static CycNum from_rational(Rational r) { return CycNum(std::move(r), 0, 0, 0); }
    /// exp(i*k*pi/4) for any integer k (reduced mod 8).
    static CycNum phase(int k);
    static CycNum i() { return CycNum(0, 0, 1, 0); }
    static CycNum sqrt2() { return CycNum(0, 1, 0, -1); }
    static CycNum inv_sqrt2() { return CycNum(0, Rational(1, 2), 0, Rational(-1, 2)); }

    const Rational& coeff(int idx) const { return c_.at(static_cast<size_t>(idx)); }

    bool is_zero() const;
    /// True iff the imaginary part vanishes (c2 = 0 and c1 = -c3).
    bool is_real() const;

    CycNum operator-() const;
    CycNum& operator+=(const CycNum& rhs);
    CycNum& operator-=(const CycNum& rhs);
    CycNum& operator*=(const CycNum& rhs);

    friend CycNum operator+(CycNum lhs, const CycNum& rhs) { return lhs += rhs; }
    friend CycNum operator-(CycNum lhs, const CycNum& rhs) { return lhs -= rhs; }
    friend CycNum operator*(const CycNum& lhs, const CycNum& rhs);

    bool operator==(const CycNum& rhs) const = default;

    /// Complex conjugate: zeta -> -zeta^3, zeta^2 -> -zeta^2, zeta^3 -> -zeta.
    CycNum conj() const;
    /// Exact multiplicative inverse; throws std::domain_error on zero.
    CycNum inverse() const;

    std::complex<double> to_complex() const;
    /// |z|^2 as an exact (real) field element.
    CycNum abs2() const { return *this * conj(); }

    /// Compact monomial rendering: "0", "1", "-ζ", "1/2 + 1/2ζ²", ...
    std::string to_string() const;
    static std::optional<CycNum> parse(std::string_view text);

private:
    std::array<Rational, 4> c_{Rational(0), Rational(0), Rational(0), Rational(0)};
};

} // namespace quphox
