#pragma once

#include "deform/rational.hpp"

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace deform {

struct NotAUnit : std::domain_error {
    NotAUnit() : std::domain_error("element is not a unit (constant term is zero)") {}
};

struct RingMismatch : std::invalid_argument {
    RingMismatch(int a, int b)
        : std::invalid_argument("truncation orders differ: " + std::to_string(a) + " vs " + std::to_string(b)) {}
};

// Element of Q[t]/(t^N); coefficient i multiplies t^i.
class RElement {
public:
    explicit RElement(int order) : coeffs_(check_order(order)) {}
    RElement(int order, const Rational& constant) : coeffs_(check_order(order)) { coeffs_[0] = constant; }
    explicit RElement(std::vector<Rational> coeffs);

    static RElement monomial(int order, int power, const Rational& c = 1);

    int order() const { return static_cast<int>(coeffs_.size()); }
    const Rational& operator[](int i) const { return coeffs_[static_cast<std::size_t>(i)]; }
    Rational& operator[](int i) { return coeffs_[static_cast<std::size_t>(i)]; }
    std::span<const Rational> coeffs() const { return coeffs_; }

    bool is_zero() const;
    bool in_maximal_ideal() const { return coeffs_[0].is_zero(); }
    bool is_unit() const { return !coeffs_[0].is_zero(); }

    RElement& operator+=(const RElement& rhs);
    RElement& operator-=(const RElement& rhs);
    RElement& operator*=(const Rational& s);
    friend RElement operator+(RElement a, const RElement& b) { return a += b; }
    friend RElement operator-(RElement a, const RElement& b) { return a -= b; }
    friend RElement operator*(const RElement& a, const RElement& b);
    friend RElement operator*(RElement a, const Rational& s) { return a *= s; }
    friend RElement operator*(const Rational& s, RElement a) { return a *= s; }
    RElement operator-() const;

    friend bool operator==(const RElement&, const RElement&) = default;

private:
    static std::size_t check_order(int order);
    std::vector<Rational> coeffs_;
};

enum class ROp { add, sub, mul, neg };

RElement r_arith(ROp op, const RElement& a, const RElement& b);
RElement r_invert(const RElement& a);
RElement base_reduce(const RElement& a, int target_order);

// Truncated exp and log; exp requires a in the maximal ideal, log requires a - 1 in it.
RElement r_exp(const RElement& a);
RElement r_log(const RElement& a);

}  // namespace deform
