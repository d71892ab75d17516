#include "deform/hochschild_families.hpp"

#include <stdexcept>

namespace deform {

namespace {

Matrix unit_matrix(int n, int i, int j) {
    Matrix m(n, n);
    m(i, j) = 1;
    return m;
}

std::vector<Matrix> algebra_catalogue(int which) {
    Matrix id = Matrix::identity(3);
    Matrix nil = unit_matrix(3, 0, 1) + unit_matrix(3, 1, 2);
    switch (which) {
        case 0: return {id};
        case 1: return {id, unit_matrix(3, 0, 0)};                         // Q x Q
        case 2: return {id, unit_matrix(3, 0, 2)};                         // dual numbers
        case 3: return {id, unit_matrix(3, 0, 0), unit_matrix(3, 1, 1)};  // Q^3
        case 4: return {id, nil, nil * nil};                               // Q[x]/(x^3)
        case 5: return {id, unit_matrix(3, 0, 1), unit_matrix(3, 0, 2)};  // square-zero ideal of rank 2
        default: return {id, unit_matrix(3, 0, 0), unit_matrix(3, 0, 1)};  // upper triangular 2x2
    }
}

}  // namespace

FinAlgebra random_algebra(Rng& rng, int max_dim) {
    std::vector<Matrix> basis;
    do {
        basis = algebra_catalogue(rng.uniform(0, 6));
    } while (static_cast<int>(basis.size()) > max_dim);
    int d = static_cast<int>(basis.size());
    if (d == 1) return algebra_from_matrices(basis);
    Matrix p = rng.invertible(d - 1);
    std::vector<Matrix> changed{basis[0]};
    for (int i = 1; i < d; ++i) {
        Matrix b = basis[0];
        Rational shift = rng.rational(2, 1);
        for (int r = 0; r < 3; ++r) b(r, r) = shift;
        for (int j = 1; j < d; ++j) {
            Matrix term = basis[static_cast<std::size_t>(j)];
            for (int r = 0; r < 3; ++r)
                for (int c = 0; c < 3; ++c) term(r, c) = term(r, c) * p(j - 1, i - 1);
            b = b + term;
        }
        changed.push_back(b);
    }
    return algebra_from_matrices(changed);
}

DglaElement random_cochain(const HochschildDgla& g, Rng& rng, int arity, int order, int bound) {
    DglaElement x = DglaElement::zero(g, arity - 1, order);
    for (int r = 1; r < order; ++r)
        for (auto& c : x.layer(r))
            if (rng.coin(0.6)) c = rng.rational(bound, 2);
    return x;
}

GaugeTransform random_gauge(const HochschildDgla& g, Rng& rng, int order) {
    return {random_cochain(g, rng, 1, order)};
}

StarProduct planted_star_product(const HochschildDgla& g, Rng& rng, int order, bool associative) {
    if (g.max_degree() < 2) throw std::invalid_argument("planting needs arity cap >= 3");
    const FinAlgebra& a = g.algebra();
    int d = a.dim;
    DglaElement gamma = DglaElement::zero(g, 1, order);
    if (order == 2 && rng.coin()) {
        // any cocycle is Maurer-Cartan to first order
        auto cocycles = nullspace(differential_matrix(g, 1));
        for (const auto& z : cocycles) axpy(gamma.layer(1), rng.rational(2, 1), z);
    } else if (d == 2) {
        // Q[y]/(y^2 - b y - c) stays associative when c is deformed to c + f(t)
        for (int r = 1; r < order; ++r) gamma.layer(r)[static_cast<std::size_t>((1 * d + 1) * d + 0)] = rng.rational(2, 2);
    }
    gamma = gauge_act(g, random_gauge(g, rng, order), gamma);
    if (!associative && order > 1) {
        if (differential_matrix(g, 1).is_zero())
            throw std::invalid_argument("every bilinear deformation of this algebra is associative");
        int r = rng.uniform(1, order - 1);
        Vec c;
        do {
            c.assign(static_cast<std::size_t>(g.dim(1)), Rational());
            for (auto& x : c)
                if (rng.coin(0.5)) x = rng.rational(2, 1);
        } while (is_zero(differential_matrix(g, 1).apply(c)));
        axpy(gamma.layer(r), 1, c);
    }
    StarProduct s{a, order, {}};
    for (int r = 1; r < order; ++r) s.corrections.emplace_back(gamma.layer(r).begin(), gamma.layer(r).end());
    return s;
}

}  // namespace deform
