#include "deform/dgla_families.hpp"

#include <stdexcept>

namespace deform {

Dgla heisenberg() {
    Dgla g({{0, 3}});
    g.add_bracket_antisym(0, 0, 0, 1, 2, 1);
    return g;
}

Dgla sl2() {
    // basis h, e, f
    Dgla g({{0, 3}});
    g.add_bracket_antisym(0, 0, 0, 1, 1, 2);
    g.add_bracket_antisym(0, 0, 0, 2, 2, -2);
    g.add_bracket_antisym(0, 1, 0, 2, 0, 1);
    return g;
}

Dgla affine_line() {
    Dgla g({{0, 2}});
    g.add_bracket_antisym(0, 0, 0, 1, 1, 1);
    return g;
}

Dgla abelian_lie(int dim) { return Dgla({{0, dim}}); }

Dgla strictly_upper_triangular(int n) {
    std::vector<std::pair<int, int>> basis;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) basis.emplace_back(i, j);
    auto index = [&](int i, int j) {
        for (std::size_t k = 0; k < basis.size(); ++k)
            if (basis[k] == std::pair{i, j}) return static_cast<int>(k);
        throw std::logic_error("not a strictly upper triangular unit");
    };
    Dgla g({{0, static_cast<int>(basis.size())}});
    for (std::size_t a = 0; a < basis.size(); ++a)
        for (std::size_t b = 0; b < basis.size(); ++b) {
            auto [i, j] = basis[a];
            auto [k, l] = basis[b];
            if (j == k) g.add_bracket({int(a), int(b), index(i, l), 0, 0, 1});
            if (l == i) g.add_bracket({int(a), int(b), index(k, j), 0, 0, -1});
        }
    return g;
}

namespace {

std::vector<BracketConstant> lie_constants(const Dgla& lie) {
    std::vector<BracketConstant> out;
    for (const auto& b : lie.bracket_constants())
        if (b.deg_a == 0 && b.deg_b == 0) out.push_back(b);
    return out;
}

// Copies of L placed in degrees -1 (optional), 0 and 1, with brackets [x a, y b] = [x,y] ab.
Dgla tensor_with(const Dgla& lie, const Vec& m, bool with_eps) {
    int n = lie.dim(0);
    std::map<int, int> dims{{0, n}, {1, n}};
    if (with_eps) dims[-1] = n;
    Dgla g(dims);
    for (const auto& b : lie_constants(lie)) {
        g.add_bracket({b.i, b.j, b.k, 0, 0, b.c});
        g.add_bracket({b.i, b.j, b.k, 0, 1, b.c});
        g.add_bracket({b.i, b.j, b.k, 1, 0, b.c});
        if (with_eps) {
            g.add_bracket({b.i, b.j, b.k, 0, -1, b.c});
            g.add_bracket({b.i, b.j, b.k, -1, 0, b.c});
        }
    }
    Matrix d(n, n);
    for (const auto& b : lie_constants(lie)) d(b.k, b.j) += m[static_cast<std::size_t>(b.i)] * b.c;
    g.set_differential(0, d);
    return g;
}

struct MatrixBasisElement {
    int degree;
    Matrix value;
};

// DGLA spanned by homogeneous matrices under the graded commutator, with differential [mu, -].
Dgla matrix_dgla(const std::vector<MatrixBasisElement>& basis, const Matrix& mu) {
    std::map<int, std::vector<int>> by_degree;
    std::map<int, int> dims;
    for (std::size_t i = 0; i < basis.size(); ++i) by_degree[basis[i].degree].push_back(int(i));
    for (const auto& [deg, list] : by_degree) dims[deg] = int(list.size());
    Dgla g(dims);
    auto flatten = [](const Matrix& m) {
        Vec v;
        for (int i = 0; i < m.rows(); ++i)
            for (int j = 0; j < m.cols(); ++j) v.push_back(m(i, j));
        return v;
    };
    auto decompose = [&](int deg, const Matrix& value) {
        Vec target = flatten(value);
        if (!by_degree.count(deg)) {
            if (!is_zero(target)) throw std::logic_error("matrix family not closed");
            return Vec{};
        }
        std::vector<Vec> cols;
        for (int i : by_degree[deg]) cols.push_back(flatten(basis[static_cast<std::size_t>(i)].value));
        auto res = solve(Matrix::from_columns(cols, int(target.size())), target);
        if (!res.solution) throw std::logic_error("matrix family not closed");
        return *res.solution;
    };
    auto commutator = [](int da, const Matrix& a, int db, const Matrix& b) {
        Matrix ba = b * a;
        if ((da * db) % 2 == 0) return a * b - ba;
        return a * b + ba;
    };
    for (const auto& [da, la] : by_degree)
        for (const auto& [db, lb] : by_degree)
            for (std::size_t i = 0; i < la.size(); ++i)
                for (std::size_t j = 0; j < lb.size(); ++j) {
                    Vec c = decompose(da + db, commutator(da, basis[static_cast<std::size_t>(la[i])].value, db,
                                                          basis[static_cast<std::size_t>(lb[j])].value));
                    for (std::size_t k = 0; k < c.size(); ++k) g.add_bracket({int(i), int(j), int(k), da, db, c[k]});
                }
    for (const auto& [deg, list] : by_degree) {
        if (!by_degree.count(deg + 1)) continue;
        Matrix d(dims[deg + 1], dims[deg]);
        for (std::size_t j = 0; j < list.size(); ++j) {
            Vec c = decompose(deg + 1, commutator(1, mu, deg, basis[static_cast<std::size_t>(list[j])].value));
            d.set_column(int(j), c);
        }
        g.set_differential(deg, d);
    }
    return g;
}

Matrix unit2(int i, int j) {
    Matrix m(2, 2);
    m(i, j) = 1;
    return m;
}

}  // namespace

Dgla dual_numbers_extension(const Dgla& lie, const Vec& m) { return tensor_with(lie, m, false); }

Dgla shifted_extension(const Dgla& lie, const Vec& m) { return tensor_with(lie, m, true); }

Dgla gl11(const Rational& c) {
    Matrix mu = unit2(1, 0);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) mu(i, j) *= c;
    return matrix_dgla({{-1, unit2(0, 1)}, {0, unit2(0, 0)}, {0, unit2(1, 1)}, {1, unit2(1, 0)}}, mu);
}

Dgla quadric_family(const Rational& alpha, const Rational& r, const Rational& s) {
    Dgla g({{0, 1}, {1, 2}, {2, 1}});
    Rational beta = -alpha;
    g.add_bracket_antisym(0, 0, 1, 0, 0, alpha);
    g.add_bracket_antisym(0, 0, 1, 1, 1, beta);
    g.add_bracket_antisym(1, 0, 1, 1, 0, 1);
    Matrix d0(2, 1), d1(1, 2);
    d0(0, 0) = -s * alpha;
    d0(1, 0) = r * alpha;
    d1(0, 0) = r;
    d1(0, 1) = s;
    g.set_differential(0, d0);
    g.set_differential(1, d1);
    return g;
}

DglaElement random_element(const DglaModel& g, Rng& rng, int degree, int order, int bound) {
    DglaElement x = DglaElement::zero(g, degree, order);
    for (int r = 1; r < order; ++r)
        for (auto& v : x.layer(r)) v = rng.rational(bound, 2);
    return x;
}

namespace {

DglaElement to_new_basis(const DglaElement& old, const Matrix& p_inv) {
    DglaElement out(old.degree(), old.dim(), old.order());
    for (int r = 0; r < old.order(); ++r) {
        Vec v = p_inv.apply(old.layer(r));
        std::copy(v.begin(), v.end(), out.layer(r).begin());
    }
    return out;
}

}  // namespace

DglaInstance random_dgla_instance(Rng& rng) {
    int family = rng.uniform(0, 5);
    Dgla base;
    std::string name;
    // Maurer-Cartan sampler in the original basis; may be empty, then only gauge orbits of 0 are used.
    std::function<DglaElement(const Dgla&, Rng&, int)> seed;
    auto any_degree_one = [](const Dgla& g, Rng& r, int order) { return random_element(g, r, 1, order); };
    auto pick_lie = [&](Rng& r) -> std::pair<Dgla, std::string> {
        switch (r.uniform(0, 3)) {
            case 0: return {heisenberg(), "heisenberg"};
            case 1: return {sl2(), "sl2"};
            case 2: return {affine_line(), "affine"};
            default: return {abelian_lie(r.uniform(1, 3)), "abelian"};
        }
    };
    switch (family) {
        case 0: {
            // abelian complex with random differential of square zero
            int d0 = rng.uniform(1, 3), d1 = rng.uniform(1, 3), d2 = rng.uniform(1, 3);
            int dm = rng.uniform(0, 2);
            std::map<int, int> dims{{-1, dm}, {0, d0}, {1, d1}, {2, d2}};
            base = Dgla(dims);
            std::map<int, Matrix> maps;
            int prev_rank = 0;
            for (int deg : {-1, 0, 1}) {
                int src = dims[deg], dst = dims[deg + 1];
                if (src == 0 || dst == 0) {
                    prev_rank = 0;
                    continue;
                }
                // diagonal pattern on coordinates not hit from below keeps d^2 = 0
                Matrix m(dst, src);
                int k = rng.uniform(0, std::min(src - prev_rank, dst));
                for (int i = 0; i < k; ++i) m(i, prev_rank + i) = rng.nonzero_rational(2, 1);
                base.set_differential(deg, m);
                prev_rank = k;
            }
            name = "abelian_complex";
            seed = [](const Dgla& g, Rng& r, int order) {
                DglaElement x = DglaElement::zero(g, 1, order);
                auto ker = nullspace(differential_matrix(g, 1));
                for (int k = 1; k < order; ++k)
                    for (const auto& v : ker) axpy(x.layer(k), r.rational(2, 2), v);
                return x;
            };
            break;
        }
        case 1: {
            auto [lie, lname] = pick_lie(rng);
            Vec m(static_cast<std::size_t>(lie.dim(0)));
            for (auto& v : m) v = rng.rational(2, 1);
            base = dual_numbers_extension(lie, m);
            name = "dual_numbers_" + lname;
            seed = any_degree_one;
            break;
        }
        case 2: {
            auto [lie, lname] = pick_lie(rng);
            Vec m(static_cast<std::size_t>(lie.dim(0)));
            for (auto& v : m) v = rng.rational(2, 1);
            base = shifted_extension(lie, m);
            name = "shifted_" + lname;
            seed = any_degree_one;
            break;
        }
        case 3: {
            base = gl11(rng.rational(2, 1));
            name = "gl11";
            seed = any_degree_one;
            break;
        }
        case 4: {
            Rational alpha = rng.nonzero_rational(2, 1), r = rng.rational(2, 1), s = rng.nonzero_rational(2, 1);
            base = quadric_family(alpha, r, s);
            name = "quadric";
            seed = [r, s](const Dgla& g, Rng& rg, int order) {
                RElement u = rg.relement(order, true, 2);
                RElement v = -(u * RElement(order, r)) * r_invert(RElement(order, s) + u);
                DglaElement x = DglaElement::zero(g, 1, order);
                x.set_coefficient(0, u);
                x.set_coefficient(1, v);
                return x;
            };
            break;
        }
        default: {
            auto [lie, lname] = pick_lie(rng);
            base = lie;
            name = "lie_" + lname;
            break;
        }
    }
    std::map<int, Matrix> p, p_inv;
    for (const auto& [deg, n] : base.dims()) {
        p[deg] = rng.invertible(n);
        p_inv[deg] = *inverse(p[deg]);
    }
    Dgla g = base.change_basis(p);
    Matrix p1 = p_inv.count(1) ? p_inv[1] : Matrix();
    auto sampler = [base, seed, p1](Rng& r, int order) -> DglaElement {
        DglaElement gamma0 = seed ? seed(base, r, order) : DglaElement::zero(base, 1, order);
        return p1.rows() > 0 ? to_new_basis(gamma0, p1) : gamma0;
    };
    DglaInstance inst{name, g, {}};
    inst.random_mc = [g, sampler](Rng& r, int order) {
        DglaElement gamma = sampler(r, order);
        if (r.coin()) {
            GaugeTransform x{random_element(g, r, 0, order)};
            gamma = gauge_act(g, x, gamma, false);
        }
        return gamma;
    };
    return inst;
}

}  // namespace deform
