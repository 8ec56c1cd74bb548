#include "quphox/cyclotomic.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace quphox {

namespace {

const std::string kSymbols[4] = {"", "ζ", "ζ²", "ζ³"};

} // namespace

CycNum CycNum::phase(int k) {
    int r = ((k % 8) + 8) % 8;
    CycNum out;
    Rational unit(r < 4 ? 1 : -1);
    out.c_[static_cast<size_t>(r % 4)] = unit;
    return out;
}

bool CycNum::is_zero() const {
    return c_[0].is_zero() && c_[1].is_zero() && c_[2].is_zero() && c_[3].is_zero();
}

bool CycNum::is_real() const {
    return c_[2].is_zero() && c_[1] == -c_[3];
}

CycNum CycNum::operator-() const {
    return CycNum(-c_[0], -c_[1], -c_[2], -c_[3]);
}

CycNum& CycNum::operator+=(const CycNum& rhs) {
    for (size_t k = 0; k < 4; ++k) c_[k] += rhs.c_[k];
    return *this;
}

CycNum& CycNum::operator-=(const CycNum& rhs) {
    for (size_t k = 0; k < 4; ++k) c_[k] -= rhs.c_[k];
    return *this;
}

CycNum operator*(const CycNum& lhs, const CycNum& rhs) {
    // Polynomial product reduced by zeta^4 = -1.
    std::array<Rational, 4> out{Rational(0), Rational(0), Rational(0), Rational(0)};
    for (size_t a = 0; a < 4; ++a) {
        if (lhs.c_[a].is_zero()) continue;
        for (size_t b = 0; b < 4; ++b) {
            if (rhs.c_[b].is_zero()) continue;
            Rational prod = lhs.c_[a] * rhs.c_[b];
            size_t pow = a + b;
            if (pow >= 4) {
                out[pow - 4] -= prod;
            } else {
                out[pow] += prod;
            }
        }
    }
    return CycNum(std::move(out[0]), std::move(out[1]), std::move(out[2]), std::move(out[3]));
}

CycNum& CycNum::operator*=(const CycNum& rhs) {
    *this = *this * rhs;
    return *this;
}

CycNum CycNum::conj() const {
    return CycNum(c_[0], -c_[3], -c_[2], -c_[1]);
}

CycNum CycNum::inverse() const {
    if (is_zero()) throw std::domain_error("CycNum: inverse of zero");
    // z * conj(z) is real: x + y*sqrt2 with x, y rational. Multiplying by its
    // sqrt2-conjugate x - y*sqrt2 lands in Q, where inversion is trivial.
    CycNum norm1 = *this * conj();
    Rational x = norm1.coeff(0);
    Rational y = norm1.coeff(1); // norm1 = x + y*(zeta - zeta^3)
    CycNum sqrt2_conj(x, -y, 0, y);
    Rational denom = x * x - Rational(2) * y * y;
    if (denom.is_zero()) throw std::domain_error("CycNum: inverse of zero norm");
    Rational inv_denom = Rational(1) / denom;
    return conj() * sqrt2_conj * CycNum::from_rational(inv_denom);
}

std::complex<double> CycNum::to_complex() const {
    static const double half_sqrt2 = std::sqrt(2.0) / 2.0;
    double re = c_[0].to_double() + (c_[1].to_double() - c_[3].to_double()) * half_sqrt2;
    double im = c_[2].to_double() + (c_[1].to_double() + c_[3].to_double()) * half_sqrt2;
    return {re, im};
}

std::string CycNum::to_string() const {
    if (is_zero()) return "0";
    std::string out;
    for (size_t k = 0; k < 4; ++k) {
        const Rational& coeff = c_[k];
        if (coeff.is_zero()) continue;
        Rational mag = coeff.sign() < 0 ? -coeff : coeff;
        if (out.empty()) {
            if (coeff.sign() < 0) out += "-";
        } else {
            out += coeff.sign() < 0 ? " - " : " + ";
        }
        bool unit = mag == Rational(1);
        if (!unit || k == 0) out += mag.to_string();
        out += kSymbols[k];
    }
    return out;
}

std::optional<CycNum> CycNum::parse(std::string_view text) {
    if (text.empty()) return std::nullopt;
    // Split into signed monomials on top-level " + " / " - ".
    struct Monomial {
        bool negative;
        std::string body;
    };
    std::vector<Monomial> monomials;
    size_t pos = 0;
    bool negative = false;
    if (text.substr(0, 1) == "-") {
        negative = true;
        pos = 1;
    }
    size_t start = pos;
    while (pos <= text.size()) {
        bool plus = text.compare(pos, 3, " + ") == 0;
        bool minus = text.compare(pos, 3, " - ") == 0;
        if (pos == text.size() || plus || minus) {
            if (pos == start) return std::nullopt;
            monomials.push_back({negative, std::string(text.substr(start, pos - start))});
            if (pos == text.size()) break;
            negative = minus;
            pos += 3;
            start = pos;
        } else {
            ++pos;
        }
    }

    CycNum result;
    for (const auto& m : monomials) {
        std::string_view body = m.body;
        int power = 0;
        for (int k = 3; k >= 1; --k) {
            const std::string& sym = kSymbols[static_cast<size_t>(k)];
            if (body.size() >= sym.size() &&
                body.substr(body.size() - sym.size()) == sym) {
                power = k;
                body.remove_suffix(sym.size());
                break;
            }
        }
        Rational coeff(1);
        if (!body.empty()) {
            auto parsed = Rational::parse(body);
            if (!parsed) return std::nullopt;
            coeff = *parsed;
        } else if (power == 0) {
            return std::nullopt; // bare sign with no digits or symbol
        }
        if (m.negative) coeff = -coeff;
        std::array<Rational, 4> add{Rational(0), Rational(0), Rational(0), Rational(0)};
        add[static_cast<size_t>(power)] = coeff;
        result += CycNum(add[0], add[1], add[2], add[3]);
    }
    return result;
}

} // namespace quphox
