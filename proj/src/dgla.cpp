#include "deform/dgla.hpp"

#include <sstream>
#include <stdexcept>

namespace deform {

RElement DglaElement::coefficient(int basis_index) const {
    RElement r(order_);
    for (int k = 0; k < order_; ++k) r[k] = layer(k)[static_cast<std::size_t>(basis_index)];
    return r;
}

void DglaElement::set_coefficient(int basis_index, const RElement& value) {
    if (value.order() != order_) throw RingMismatch(order_, value.order());
    for (int k = 0; k < order_; ++k) layer(k)[static_cast<std::size_t>(basis_index)] = value[k];
}

int DglaElement::valuation() const {
    for (int r = 0; r < order_; ++r)
        if (!deform::is_zero(layer(r))) return r;
    return order_;
}

void DglaElement::check_compatible(const DglaElement& rhs) const {
    if (degree_ != rhs.degree_ || dim_ != rhs.dim_) throw std::invalid_argument("degree mismatch in DGLA element sum");
    if (order_ != rhs.order_) throw RingMismatch(order_, rhs.order_);
}

DglaElement& DglaElement::operator+=(const DglaElement& rhs) {
    check_compatible(rhs);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += rhs.data_[i];
    return *this;
}

DglaElement& DglaElement::operator-=(const DglaElement& rhs) {
    check_compatible(rhs);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= rhs.data_[i];
    return *this;
}

DglaElement& DglaElement::operator*=(const Rational& s) {
    for (auto& x : data_) x *= s;
    return *this;
}

DglaElement DglaElement::operator-() const {
    DglaElement r(*this);
    for (auto& x : r.data_) x = -x;
    return r;
}

DglaElement DglaElement::shifted(int k) const {
    DglaElement r(degree_, dim_, order_);
    for (int s = 0; s + k < order_; ++s)
        std::copy(layer(s).begin(), layer(s).end(), r.layer(s + k).begin());
    return r;
}

DglaElement DglaElement::truncated(int order) const {
    DglaElement r(degree_, dim_, order_);
    for (int s = 0; s < std::min(order, order_); ++s) std::copy(layer(s).begin(), layer(s).end(), r.layer(s).begin());
    return r;
}

DglaElement bracket(const DglaModel& g, const DglaElement& a, const DglaElement& b) {
    if (a.order() != b.order()) throw RingMismatch(a.order(), b.order());
    int deg = a.degree() + b.degree();
    DglaElement out = DglaElement::zero(g, deg, a.order());
    if (out.dim() == 0) return out;
    int n = a.order();
    for (int r = 0; r < n; ++r) {
        auto ar = a.layer(r);
        if (is_zero(ar)) continue;
        for (int s = 0; r + s < n; ++s) {
            auto bs = b.layer(s);
            if (is_zero(bs)) continue;
            g.bracket_into(a.degree(), ar, b.degree(), bs, out.layer(r + s));
        }
    }
    return out;
}

DglaElement differential(const DglaModel& g, const DglaElement& a) {
    DglaElement out = DglaElement::zero(g, a.degree() + 1, a.order());
    if (out.dim() == 0 || a.dim() == 0) return out;
    for (int r = 0; r < a.order(); ++r) {
        if (is_zero(a.layer(r))) continue;
        g.differential_into(a.degree(), a.layer(r), out.layer(r));
    }
    return out;
}

DglaElement mc_residual(const DglaModel& g, const DglaElement& gamma) {
    if (gamma.degree() != 1) throw std::invalid_argument("Maurer-Cartan candidate must have degree 1");
    if (!gamma.in_maximal_ideal()) throw std::invalid_argument("Maurer-Cartan candidate must lie in the maximal ideal");
    DglaElement res = differential(g, gamma);
    DglaElement sq = bracket(g, gamma, gamma);
    sq *= Rational(1, 2);
    return res += sq;
}

bool is_mc(const DglaModel& g, const DglaElement& gamma) { return mc_residual(g, gamma).is_zero(); }

namespace {

void require_ideal(const DglaElement& x, int degree, const char* what) {
    if (x.degree() != degree) throw std::invalid_argument(std::string(what) + " has the wrong degree");
    if (!x.in_maximal_ideal()) throw std::invalid_argument(std::string(what) + " must lie in the maximal ideal");
}

}  // namespace

DglaElement gauge_act(const DglaModel& g, const GaugeTransform& x, const DglaElement& gamma, bool check) {
    require_ideal(x.log, 0, "gauge transform");
    if (check && !is_mc(g, gamma)) throw std::invalid_argument("gauge action on a non-Maurer-Cartan element");
    DglaElement term = differential(g, x.log) + bracket(g, gamma, x.log);
    DglaElement out = gamma;
    Rational fact = 1;
    for (int i = 0; i + 1 < gamma.order() && !term.is_zero(); ++i) {
        fact *= Rational(i + 1);
        DglaElement scaled = term;
        scaled *= fact.inverse();
        out -= scaled;
        term = bracket(g, x.log, term);
    }
    return out;
}

DglaElement ad_exp(const DglaModel& g, const DglaElement& x, const DglaElement& y) {
    require_ideal(x, 0, "exponent");
    DglaElement out = y, term = y;
    Rational fact = 1;
    for (int i = 1; i < y.order(); ++i) {
        term = bracket(g, x, term);
        if (term.is_zero()) break;
        fact *= Rational(i);
        DglaElement scaled = term;
        scaled *= fact.inverse();
        out += scaled;
    }
    return out;
}

DglaElement twisted_differential(const DglaModel& g, const DglaElement& gamma, const DglaElement& a) {
    return differential(g, a) + bracket(g, gamma, a);
}

bool check_conjugation(const DglaModel& g, const GaugeTransform& x, const DglaElement& gamma1,
                       const DglaElement& gamma2) {
    int n = gamma1.order();
    DglaElement minus_x = -x.log;
    for (int deg = g.min_degree(); deg <= g.max_degree(); ++deg) {
        for (int j = 0; j < g.dim(deg); ++j) {
            DglaElement v(deg, g.dim(deg), n);
            v.layer(0)[static_cast<std::size_t>(j)] = 1;
            DglaElement lhs = twisted_differential(g, gamma2, v);
            DglaElement rhs = ad_exp(g, x.log, twisted_differential(g, gamma1, ad_exp(g, minus_x, v)));
            if (!(lhs == rhs)) return false;
        }
    }
    return true;
}

DglaElement twisted_bracket(const DglaModel& g, const DglaElement& gamma, const DglaElement& a,
                            const DglaElement& b) {
    if (a.degree() != -1 || b.degree() != -1) throw std::invalid_argument("twisted bracket needs degree -1 inputs");
    return bracket(g, a, twisted_differential(g, gamma, b));
}

Rational dynkin_coefficient(unsigned word, int length) {
    auto letter = [&](int p) { return (word >> p) & 1u; };
    // sum over splittings into blocks X^r Y^s, r + s > 0
    std::function<void(int, int, Rational, Rational&)> walk = [&](int pos, int blocks, Rational weight, Rational& acc) {
        if (pos == length) {
            Rational c = weight * Rational(blocks % 2 == 1 ? 1 : -1, blocks);
            acc += c;
            return;
        }
        int xs = 0;
        while (pos + xs < length && letter(pos + xs) == 0) ++xs;
        for (int r = 0; r <= xs; ++r) {
            int ys_max = 0;
            if (r == xs)
                while (pos + r + ys_max < length && letter(pos + r + ys_max) == 1) ++ys_max;
            for (int s = (r == 0 ? 1 : 0); s <= ys_max; ++s)
                walk(pos + r + s, blocks + 1, weight * (factorial(r) * factorial(s)).inverse(), acc);
        }
    };
    Rational acc;
    walk(0, 0, Rational(1), acc);
    return acc * Rational(1, length);
}

namespace {

constexpr int kMaxBchLength = 5;

struct DynkinTable {
    // coeff[len][word]
    std::vector<std::vector<Rational>> coeff;
    DynkinTable() : coeff(kMaxBchLength + 1) {
        for (int len = 1; len <= kMaxBchLength; ++len) {
            coeff[static_cast<std::size_t>(len)].resize(static_cast<std::size_t>(1) << len);
            for (unsigned w = 0; w < (1u << len); ++w) coeff[static_cast<std::size_t>(len)][w] = dynkin_coefficient(w, len);
        }
    }
};

const DynkinTable& dynkin_table() {
    static const DynkinTable table;
    return table;
}

}  // namespace

DglaElement bch(const DglaElement& x, const DglaElement& y, const BracketFn& br) {
    if (x.degree() != y.degree() || x.dim() != y.dim()) throw std::invalid_argument("BCH inputs differ in degree");
    if (x.order() != y.order()) throw RingMismatch(x.order(), y.order());
    if (!x.in_maximal_ideal() || !y.in_maximal_ideal())
        throw std::invalid_argument("BCH inputs must lie in the maximal ideal");
    int max_len = x.order() - 1;
    if (max_len > kMaxBchLength) throw std::out_of_range("BCH table supports truncation orders up to 6");
    const auto& table = dynkin_table();
    DglaElement out = x + y;
    // Right-normed brackets, built by prepending letters to a suffix; the first letter is bit 0.
    std::function<void(const DglaElement&, unsigned, int)> grow = [&](const DglaElement& value, unsigned word, int len) {
        if (len == max_len) return;
        for (unsigned letter = 0; letter < 2; ++letter) {
            DglaElement next = br(letter ? y : x, value);
            if (next.is_zero()) continue;
            unsigned w = (word << 1) | letter;
            const Rational& c = table.coeff[static_cast<std::size_t>(len + 1)][w];
            if (!c.is_zero()) {
                DglaElement scaled = next;
                scaled *= c;
                out += scaled;
            }
            grow(next, w, len + 1);
        }
    };
    if (max_len >= 2) {
        grow(x, 0u, 1);
        grow(y, 1u, 1);
    }
    return out;
}

DglaElement bch_plain(const DglaModel& g, const DglaElement& x, const DglaElement& y) {
    return bch(x, y, [&g](const DglaElement& a, const DglaElement& b) { return bracket(g, a, b); });
}

DglaElement bch_twisted(const DglaModel& g, const DglaElement& gamma, const DglaElement& x, const DglaElement& y) {
    return bch(x, y, [&](const DglaElement& a, const DglaElement& b) { return twisted_bracket(g, gamma, a, b); });
}

GaugeTransform compose_gauge(const DglaModel& g, const GaugeTransform& outer, const GaugeTransform& inner) {
    return {bch_plain(g, outer.log, inner.log)};
}

TwoMorphismElt vertical_compose(const DglaModel& g, const TwoMorphismElt& outer, const TwoMorphismElt& inner) {
    if (!(outer.base_mc == inner.base_mc)) throw std::invalid_argument("2-morphisms over different bases");
    return {outer.base_mc, bch_twisted(g, outer.base_mc, outer.log, inner.log)};
}

GaugeTransform two_morphism_act(const DglaModel& g, const TwoMorphismElt& t, const GaugeTransform& x,
                                const DglaElement& target_mc) {
    if (!(t.base_mc == target_mc)) throw std::invalid_argument("2-morphism base differs from the target");
    require_ideal(t.log, -1, "2-morphism");
    return {bch_plain(g, twisted_differential(g, t.base_mc, t.log), x.log)};
}

TwoMorphismElt horizontal_compose(const DglaModel& g, const TwoMorphismElt& t23, const TwoMorphismElt& t12,
                                  const GaugeTransform& x23) {
    if (!(gauge_act(g, x23, t12.base_mc) == t23.base_mc))
        throw std::invalid_argument("horizontal composition: bases are not related by the 1-morphism");
    return {t23.base_mc, bch_twisted(g, t23.base_mc, t23.log, ad_exp(g, x23.log, t12.log))};
}

}  // namespace deform
