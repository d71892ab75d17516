#include "deform/cosimplicial_dgla.hpp"

#include <stdexcept>

namespace deform {

DglaElement push(const CosimplicialDgla& g, const MonotoneMap& f, const DglaElement& x) {
    const DglaModel& target = g.level(f.target);
    DglaElement out = DglaElement::zero(target, x.degree(), x.order());
    if (out.dim() == 0) return out;
    for (int r = 0; r < x.order(); ++r) {
        Vec v = g.push(f, x.degree(), x.layer(r));
        std::copy(v.begin(), v.end(), out.layer(r).begin());
    }
    return out;
}

DglaElement coface(const CosimplicialDgla& g, int i, int n, const DglaElement& x) {
    return push(g, MonotoneMap::face(n, i), x);
}

DglaElement codegeneracy(const CosimplicialDgla& g, int i, int n, const DglaElement& x) {
    return push(g, MonotoneMap::degeneracy(n, i), x);
}

DglaElement cosimplicial_differential(const CosimplicialDgla& g, int n, const DglaElement& x) {
    DglaElement out = DglaElement::zero(g.level(n + 1), x.degree(), x.order());
    for (int i = 0; i <= n + 1; ++i) {
        DglaElement term = coface(g, i, n, x);
        if (i % 2) out -= term;
        else out += term;
    }
    return out;
}

}  // namespace deform
