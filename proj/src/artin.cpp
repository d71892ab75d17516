#include "deform/artin.hpp"

namespace deform {

std::size_t RElement::check_order(int order) {
    if (order < 1) throw std::invalid_argument("truncation order must be at least 1");
    return static_cast<std::size_t>(order);
}

RElement::RElement(std::vector<Rational> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) throw std::invalid_argument("truncation order must be at least 1");
}

RElement RElement::monomial(int order, int power, const Rational& c) {
    RElement r(order);
    if (power < order) r[power] = c;
    return r;
}

bool RElement::is_zero() const {
    for (const auto& c : coeffs_)
        if (!c.is_zero()) return false;
    return true;
}

RElement& RElement::operator+=(const RElement& rhs) {
    if (order() != rhs.order()) throw RingMismatch(order(), rhs.order());
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += rhs.coeffs_[i];
    return *this;
}

RElement& RElement::operator-=(const RElement& rhs) {
    if (order() != rhs.order()) throw RingMismatch(order(), rhs.order());
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= rhs.coeffs_[i];
    return *this;
}

RElement& RElement::operator*=(const Rational& s) {
    for (auto& c : coeffs_) c *= s;
    return *this;
}

RElement operator*(const RElement& a, const RElement& b) {
    if (a.order() != b.order()) throw RingMismatch(a.order(), b.order());
    RElement r(a.order());
    int n = a.order();
    for (int i = 0; i < n; ++i) {
        if (a[i].is_zero()) continue;
        for (int j = 0; i + j < n; ++j) r[i + j].add_product(a[i], b[j]);
    }
    return r;
}

RElement RElement::operator-() const {
    RElement r(*this);
    for (auto& c : r.coeffs_) c = -c;
    return r;
}

RElement r_arith(ROp op, const RElement& a, const RElement& b) {
    if (a.order() != b.order()) throw RingMismatch(a.order(), b.order());
    switch (op) {
        case ROp::add: return a + b;
        case ROp::sub: return a - b;
        case ROp::mul: return a * b;
        case ROp::neg: return -a;
    }
    throw std::invalid_argument("unknown ring operation");
}

RElement r_invert(const RElement& a) {
    if (!a.is_unit()) throw NotAUnit();
    int n = a.order();
    Rational inv0 = a[0].inverse();
    RElement b(n);
    b[0] = inv0;
    for (int k = 1; k < n; ++k) {
        Rational s;
        for (int i = 1; i <= k; ++i) s.add_product(a[i], b[k - i]);
        b[k] = -(s * inv0);
    }
    return b;
}

RElement base_reduce(const RElement& a, int target_order) {
    if (target_order < 1 || target_order > a.order())
        throw std::out_of_range("reduction order " + std::to_string(target_order) + " outside [1, " +
                                std::to_string(a.order()) + "]");
    return RElement(std::vector<Rational>(a.coeffs().begin(), a.coeffs().begin() + target_order));
}

RElement r_exp(const RElement& a) {
    if (!a.in_maximal_ideal()) throw std::domain_error("exp of an element outside the maximal ideal");
    RElement result(a.order(), 1), term(a.order(), 1);
    for (int k = 1; k < a.order(); ++k) {
        term = term * a * Rational(1, k);
        result += term;
    }
    return result;
}

RElement r_log(const RElement& a) {
    RElement x = a - RElement(a.order(), 1);
    if (!x.in_maximal_ideal()) throw std::domain_error("log of an element not congruent to 1");
    RElement result(a.order()), power(a.order(), 1);
    for (int k = 1; k < a.order(); ++k) {
        power = power * x;
        result += power * Rational(k % 2 == 1 ? 1 : -1, k);
    }
    return result;
}

}  // namespace deform
