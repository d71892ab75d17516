#include "deform/hochschild.hpp"

#include <stdexcept>

namespace deform {

namespace {

std::size_t upow(int base, int exp) {
    std::size_t r = 1;
    for (int i = 0; i < exp; ++i) r *= static_cast<std::size_t>(base);
    return r;
}

bool odd(int x) { return (x % 2) != 0; }

// Matrix over Q[t]/(t^N), one matrix per power of t.
using Layers = std::vector<Matrix>;

Layers mat_mul(const Layers& a, const Layers& b, int order) {
    int d = a[0].rows();
    Layers out(static_cast<std::size_t>(order), Matrix(d, d));
    for (int r = 0; r < order; ++r)
        for (int s = 0; r + s < order; ++s) {
            if (a[static_cast<std::size_t>(r)].is_zero() || b[static_cast<std::size_t>(s)].is_zero()) continue;
            out[static_cast<std::size_t>(r + s)] = out[static_cast<std::size_t>(r + s)] +
                                                   a[static_cast<std::size_t>(r)] * b[static_cast<std::size_t>(s)];
        }
    return out;
}

}  // namespace

int ipow(int base, int exp) { return static_cast<int>(upow(base, exp)); }

Vec FinAlgebra::multiply(std::span<const Rational> a, std::span<const Rational> b) const {
    Vec out(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i) {
        if (a[static_cast<std::size_t>(i)].is_zero()) continue;
        for (int j = 0; j < dim; ++j) {
            if (b[static_cast<std::size_t>(j)].is_zero()) continue;
            Rational c = a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(j)];
            for (int k = 0; k < dim; ++k)
                if (!m(i, j, k).is_zero()) out[static_cast<std::size_t>(k)].add_product(c, m(i, j, k));
        }
    }
    return out;
}

FinAlgebra algebra_from_matrices(const std::vector<Matrix>& basis) {
    int d = static_cast<int>(basis.size());
    if (d == 0 || basis[0] != Matrix::identity(basis[0].rows()))
        throw std::invalid_argument("first basis matrix must be the identity");
    int n = basis[0].rows();
    std::vector<Vec> cols;
    for (const auto& b : basis) {
        Vec flat;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) flat.push_back(b(i, j));
        cols.push_back(std::move(flat));
    }
    Matrix coords = Matrix::from_columns(cols, n * n);
    FinAlgebra a;
    a.dim = d;
    a.unit = Vec(static_cast<std::size_t>(d));
    a.unit[0] = 1;
    a.mult = Vec(upow(d, 3));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            Matrix p = basis[static_cast<std::size_t>(i)] * basis[static_cast<std::size_t>(j)];
            Vec flat;
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c) flat.push_back(p(r, c));
            auto res = solve(coords, flat);
            if (!res.solution) throw std::invalid_argument("basis does not span a subalgebra");
            for (int k = 0; k < d; ++k)
                a.mult[static_cast<std::size_t>((i * d + j) * d + k)] = (*res.solution)[static_cast<std::size_t>(k)];
        }
    return a;
}

FinAlgebra algebra_q() { return algebra_from_matrices({Matrix::identity(1)}); }

FinAlgebra algebra_q_times_q() {
    Matrix e1(2, 2);
    e1(0, 0) = 1;
    return algebra_from_matrices({Matrix::identity(2), e1});
}

FinAlgebra algebra_dual_numbers() {
    Matrix x(2, 2);
    x(0, 1) = 1;
    return algebra_from_matrices({Matrix::identity(2), x});
}

FinAlgebra algebra_matrices2() {
    Matrix e11(2, 2), e12(2, 2), e21(2, 2);
    e11(0, 0) = 1;
    e12(0, 1) = 1;
    e21(1, 0) = 1;
    return algebra_from_matrices({Matrix::identity(2), e11, e12, e21});
}

std::vector<Violation> validate_algebra(const FinAlgebra& a) {
    std::vector<Violation> out;
    int d = a.dim;
    if (d <= 0 || a.unit.size() != static_cast<std::size_t>(d) || a.mult.size() != upow(d, 3)) {
        out.push_back({"shape", "dim, unit and mult sizes disagree"});
        return out;
    }
    for (int i = 0; i < d; ++i)
        if (a.unit[static_cast<std::size_t>(i)] != (i == 0 ? Rational(1) : Rational(0))) {
            out.push_back({"unit_basis", "unit must be basis element 0"});
            break;
        }
    auto basis = [d](int i) {
        Vec v(static_cast<std::size_t>(d));
        v[static_cast<std::size_t>(i)] = 1;
        return v;
    };
    for (int i = 0; i < d; ++i) {
        Vec e = basis(i);
        if (a.multiply(a.unit, e) != e || a.multiply(e, a.unit) != e) {
            out.push_back({"unit", "e" + std::to_string(i)});
            break;
        }
    }
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k) {
                Vec l = a.multiply(a.multiply(basis(i), basis(j)), basis(k));
                Vec r = a.multiply(basis(i), a.multiply(basis(j), basis(k)));
                if (l != r) {
                    out.push_back({"associativity", "(e" + std::to_string(i) + ",e" + std::to_string(j) + ",e" +
                                                        std::to_string(k) + ")"});
                    return out;
                }
            }
    return out;
}

void compose_at(int dim, int n1, std::span<const Rational> d, int n2, std::span<const Rational> e, int pos,
                const Rational& scale, std::span<Rational> out) {
    if (n1 == 0) return;
    const std::size_t dd = static_cast<std::size_t>(dim);
    const std::size_t n_pre = upow(dim, pos), n_mid = upow(dim, n2);
    const std::size_t block = upow(dim, n1 - 1 - pos) * dd;  // suffix indices and output index
    const std::size_t outer = n_pre * n_mid;
    const long long outer_ll = static_cast<long long>(outer);
#pragma omp parallel for schedule(static) if (outer * block * dd > 4096)
    for (long long pm = 0; pm < outer_ll; ++pm) {
        std::size_t pre = static_cast<std::size_t>(pm) / n_mid, mid = static_cast<std::size_t>(pm) % n_mid;
        Rational* o = out.data() + static_cast<std::size_t>(pm) * block;
        for (std::size_t c = 0; c < dd; ++c) {
            const Rational& ec = e[mid * dd + c];
            if (ec.is_zero()) continue;
            Rational coeff = ec * scale;
            const Rational* src = d.data() + (pre * dd + c) * block;
            for (std::size_t s = 0; s < block; ++s)
                if (!src[s].is_zero()) o[s].add_product(coeff, src[s]);
        }
    }
}

void compose_at_serial(int dim, int n1, std::span<const Rational> d, int n2, std::span<const Rational> e, int pos,
                       const Rational& scale, std::span<Rational> out) {
    if (n1 == 0) return;
    int n = n1 + n2 - 1;
    std::vector<int> idx(static_cast<std::size_t>(n));
    std::vector<int> inner(static_cast<std::size_t>(n2)), outer_idx(static_cast<std::size_t>(n1));
    std::size_t total = upow(dim, n);
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rest = flat;
        for (int p = n - 1; p >= 0; --p) {
            idx[static_cast<std::size_t>(p)] = static_cast<int>(rest % static_cast<std::size_t>(dim));
            rest /= static_cast<std::size_t>(dim);
        }
        for (int p = 0; p < n2; ++p) inner[static_cast<std::size_t>(p)] = idx[static_cast<std::size_t>(pos + p)];
        for (int p = 0; p < n1; ++p)
            if (p < pos) outer_idx[static_cast<std::size_t>(p)] = idx[static_cast<std::size_t>(p)];
            else if (p > pos) outer_idx[static_cast<std::size_t>(p)] = idx[static_cast<std::size_t>(p + n2 - 1)];
        for (int k = 0; k < dim; ++k) {
            Rational acc;
            for (int c = 0; c < dim; ++c) {
                outer_idx[static_cast<std::size_t>(pos)] = c;
                acc.add_product(e[cochain_offset(dim, inner, c)], d[cochain_offset(dim, outer_idx, k)]);
            }
            out[cochain_offset(dim, idx, k)].add_product(scale, acc);
        }
    }
}

void gerstenhaber_into(int dim, int n1, std::span<const Rational> d1, int n2, std::span<const Rational> d2,
                       std::span<Rational> out, bool parallel) {
    auto comp = parallel ? compose_at : compose_at_serial;
    for (int p = 0; p < n1; ++p) comp(dim, n1, d1, n2, d2, p, odd(p * (n2 - 1)) ? Rational(-1) : Rational(1), out);
    bool swap_sign = odd((n1 - 1) * (n2 - 1));
    for (int p = 0; p < n2; ++p) {
        bool neg = odd(p * (n1 - 1)) != !swap_sign;
        comp(dim, n2, d2, n1, d1, p, neg ? Rational(-1) : Rational(1), out);
    }
}

std::size_t cochain_offset(int dim, std::span<const int> idx, int k) {
    std::size_t off = 0;
    for (int i : idx) off = off * static_cast<std::size_t>(dim) + static_cast<std::size_t>(i);
    return off * static_cast<std::size_t>(dim) + static_cast<std::size_t>(k);
}

HochschildDgla::HochschildDgla(FinAlgebra a, int arity_cap) : alg_(std::move(a)), arity_cap_(arity_cap) {
    if (arity_cap_ < 0) throw std::invalid_argument("arity cap must be non-negative");
    if (auto v = validate_algebra(alg_); !v.empty())
        throw std::invalid_argument("invalid algebra: " + v.front().axiom + " " + v.front().witness);
}

int HochschildDgla::dim(int degree) const {
    if (degree < -1 || degree > max_degree()) return 0;
    return ipow(alg_.dim, degree + 2);
}

void HochschildDgla::bracket_into(int da, std::span<const Rational> a, int db, std::span<const Rational> b,
                                  std::span<Rational> out) const {
    if (out.empty()) return;
    gerstenhaber_into(alg_.dim, da + 1, a, db + 1, b, out);
}

void HochschildDgla::differential_into(int degree, std::span<const Rational> a, std::span<Rational> out) const {
    if (out.empty()) return;
    gerstenhaber_into(alg_.dim, 2, alg_.mult, degree + 1, a, out);
}

DglaElement hochschild_diff(const HochschildDgla& g, const DglaElement& d) {
    if (d.degree() + 1 > g.max_degree()) throw std::invalid_argument("arity cap exceeded by the coboundary");
    return differential(g, d);
}

DglaElement gerstenhaber_bracket(const HochschildDgla& g, const DglaElement& d1, const DglaElement& d2) {
    if (d1.degree() + d2.degree() > g.max_degree()) throw std::invalid_argument("arity cap exceeded by the bracket");
    return bracket(g, d1, d2);
}

namespace {

template <class F>
void for_each_entry(int dim, int arity, F&& f) {
    std::vector<int> idx(static_cast<std::size_t>(arity));
    std::size_t total = upow(dim, arity);
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rest = flat;
        for (int p = arity - 1; p >= 0; --p) {
            idx[static_cast<std::size_t>(p)] = static_cast<int>(rest % static_cast<std::size_t>(dim));
            rest /= static_cast<std::size_t>(dim);
        }
        f(std::span<const int>(idx), flat * static_cast<std::size_t>(dim));
    }
}

bool touches_unit(std::span<const int> idx) {
    for (int i : idx)
        if (i == 0) return true;
    return false;
}

}  // namespace

DglaElement normalize_project(const HochschildDgla& g, const DglaElement& d) {
    DglaElement out = d;
    int dim = g.algebra().dim;
    for (int r = 0; r < d.order(); ++r) {
        auto layer = out.layer(r);
        for_each_entry(dim, d.degree() + 1, [&](std::span<const int> idx, std::size_t base) {
            if (!touches_unit(idx))
                return;
            for (int k = 0; k < dim; ++k) layer[base + static_cast<std::size_t>(k)] = 0;
        });
    }
    return out;
}

bool is_normalized(const HochschildDgla& g, const DglaElement& d) { return normalize_project(g, d) == d; }

Vec standard_coboundary(const FinAlgebra& a, int arity, std::span<const Rational> d) {
    int dim = a.dim, n = arity;
    Vec out(upow(dim, n + 2));
    std::vector<int> sub(static_cast<std::size_t>(n));
    auto value = [&](std::span<const int> idx) {  // D(e_idx) as a vector
        Vec v(static_cast<std::size_t>(dim));
        std::size_t off = cochain_offset(dim, idx, 0);
        for (int k = 0; k < dim; ++k) v[static_cast<std::size_t>(k)] = d[off + static_cast<std::size_t>(k)];
        return v;
    };
    auto basis = [dim](int i) {
        Vec v(static_cast<std::size_t>(dim));
        v[static_cast<std::size_t>(i)] = 1;
        return v;
    };
    for_each_entry(dim, n + 1, [&](std::span<const int> idx, std::size_t base) {
        Vec acc(static_cast<std::size_t>(dim));
        auto add = [&](const Vec& v, bool neg) { axpy(acc, neg ? Rational(-1) : Rational(1), v); };
        // a0 D(a1..an)
        add(a.multiply(basis(idx[0]), value(idx.subspan(1))), false);
        // sum (-1)^i D(.., a_{i-1} a_i, ..)
        for (int i = 1; i <= n; ++i) {
            for (int c = 0; c < dim; ++c) {
                const Rational& mc = a.m(idx[static_cast<std::size_t>(i - 1)], idx[static_cast<std::size_t>(i)], c);
                if (mc.is_zero()) continue;
                int w = 0;
                for (int p = 0; p <= n; ++p) {
                    if (p == i) continue;
                    sub[static_cast<std::size_t>(w++)] = p == i - 1 ? c : idx[static_cast<std::size_t>(p)];
                }
                axpy(acc, odd(i) ? -mc : mc, value(sub));
            }
        }
        // (-1)^{n+1} D(a0..a_{n-1}) a_n
        add(a.multiply(value(idx.subspan(0, static_cast<std::size_t>(n))), basis(idx[static_cast<std::size_t>(n)])),
            odd(n + 1));
        for (int k = 0; k < dim; ++k) out[base + static_cast<std::size_t>(k)] = acc[static_cast<std::size_t>(k)];
    });
    return out;
}

std::optional<AssociativityWitness> associativity_defect(const StarProduct& s) {
    const FinAlgebra& a = s.algebra;
    int d = a.dim, order = s.order;
    // coefficient of t^r of e_i * e_j along e_k
    auto coef = [&](int r, int i, int j, int k) -> const Rational& {
        if (r == 0) return a.m(i, j, k);
        return s.corrections[static_cast<std::size_t>(r - 1)][static_cast<std::size_t>((i * d + j) * d + k)];
    };
    auto star = [&](const std::vector<Vec>& x, const std::vector<Vec>& y) {
        std::vector<Vec> out(static_cast<std::size_t>(order), Vec(static_cast<std::size_t>(d)));
        for (int p = 0; p < order; ++p)
            for (int q = 0; p + q < order; ++q)
                for (int r = 0; p + q + r < order; ++r)
                    for (int i = 0; i < d; ++i) {
                        const Rational& xi = x[static_cast<std::size_t>(p)][static_cast<std::size_t>(i)];
                        if (xi.is_zero()) continue;
                        for (int j = 0; j < d; ++j) {
                            const Rational& yj = y[static_cast<std::size_t>(q)][static_cast<std::size_t>(j)];
                            if (yj.is_zero()) continue;
                            Rational xy = xi * yj;
                            for (int k = 0; k < d; ++k)
                                out[static_cast<std::size_t>(p + q + r)][static_cast<std::size_t>(k)].add_product(
                                    xy, coef(r, i, j, k));
                        }
                    }
        return out;
    };
    auto basis = [&](int i) {
        std::vector<Vec> v(static_cast<std::size_t>(order), Vec(static_cast<std::size_t>(d)));
        v[0][static_cast<std::size_t>(i)] = 1;
        return v;
    };
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k) {
                auto l = star(star(basis(i), basis(j)), basis(k));
                auto r = star(basis(i), star(basis(j), basis(k)));
                if (l == r) continue;
                // report the first output coordinate that differs
                for (int c = 0; c < d; ++c) {
                    RElement diff(order);
                    for (int p = 0; p < order; ++p)
                        diff[p] = l[static_cast<std::size_t>(p)][static_cast<std::size_t>(c)] -
                                  r[static_cast<std::size_t>(p)][static_cast<std::size_t>(c)];
                    if (!diff.is_zero()) return AssociativityWitness{i, j, k, diff};
                }
            }
    return std::nullopt;
}

DglaElement mu_from_star(const HochschildDgla& g, const StarProduct& s) {
    if (g.max_degree() < 1) throw std::invalid_argument("arity cap below 2");
    if (s.order < 1 || s.corrections.size() != static_cast<std::size_t>(s.order - 1))
        throw std::invalid_argument("star product needs N - 1 corrections");
    DglaElement mu = DglaElement::zero(g, 1, s.order);
    for (int r = 1; r < s.order; ++r) {
        const Vec& b = s.corrections[static_cast<std::size_t>(r - 1)];
        if (b.size() != static_cast<std::size_t>(mu.dim())) throw std::invalid_argument("correction has the wrong shape");
        std::copy(b.begin(), b.end(), mu.layer(r).begin());
    }
    return mu;
}

StarProduct star_from_mc(const HochschildDgla& g, const DglaElement& gamma) {
    if (gamma.degree() != 1) throw std::invalid_argument("star products come from arity-2 cochains");
    if (!is_mc(g, gamma)) throw std::invalid_argument("element is not Maurer-Cartan");
    StarProduct s{g.algebra(), gamma.order(), {}};
    for (int r = 1; r < gamma.order(); ++r) s.corrections.emplace_back(gamma.layer(r).begin(), gamma.layer(r).end());
    return s;
}

GaugeTransform def_morphism_to_gauge(const HochschildDgla& g, const AlgebraMorphism& phi) {
    int d = g.algebra().dim, order = phi.order;
    if (phi.layers.size() != static_cast<std::size_t>(order)) throw std::invalid_argument("morphism needs N layers");
    if (phi.layers[0] != Matrix::identity(d)) throw std::invalid_argument("morphism does not reduce to the identity");
    Layers nil = phi.layers;
    nil[0] = Matrix(d, d);
    // log(1 + P) = sum_{k >= 1} (-1)^{k+1} P^k / k
    Layers acc(static_cast<std::size_t>(order), Matrix(d, d)), power = nil;
    for (int k = 1; k < order; ++k) {
        Rational c(k % 2 == 1 ? 1 : -1, k);
        for (int r = 0; r < order; ++r)
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j)
                    acc[static_cast<std::size_t>(r)](i, j).add_product(c, power[static_cast<std::size_t>(r)](i, j));
        power = mat_mul(power, nil, order);
    }
    GaugeTransform x{DglaElement::zero(g, 0, order)};
    for (int r = 0; r < order; ++r)
        for (int i = 0; i < d; ++i)
            for (int k = 0; k < d; ++k)
                x.log.layer(r)[static_cast<std::size_t>(i * d + k)] = acc[static_cast<std::size_t>(r)](k, i);
    return x;
}

DglaElement star_multiply(const StarProduct& s, const DglaElement& a, const DglaElement& b) {
    int d = s.algebra.dim, order = s.order;
    if (a.order() != order || b.order() != order) throw RingMismatch(a.order(), order);
    DglaElement out(-1, d, order);
    for (int p = 0; p < order; ++p)
        for (int q = 0; p + q < order; ++q)
            for (int r = 0; p + q + r < order; ++r) {
                const Vec& m = r == 0 ? s.algebra.mult : s.corrections[static_cast<std::size_t>(r - 1)];
                for (int i = 0; i < d; ++i) {
                    const Rational& ai = a.layer(p)[static_cast<std::size_t>(i)];
                    if (ai.is_zero()) continue;
                    for (int j = 0; j < d; ++j) {
                        const Rational& bj = b.layer(q)[static_cast<std::size_t>(j)];
                        if (bj.is_zero()) continue;
                        Rational ab = ai * bj;
                        for (int k = 0; k < d; ++k)
                            out.layer(p + q + r)[static_cast<std::size_t>(k)].add_product(
                                ab, m[static_cast<std::size_t>((i * d + j) * d + k)]);
                    }
                }
            }
    return out;
}

TwoMorphismElt def_2morphism_to_two(const HochschildDgla& g, const StarProduct& target, const DglaElement& b) {
    int d = g.algebra().dim;
    if (b.degree() != -1 || b.dim() != d || b.order() != target.order)
        throw std::invalid_argument("2-morphism must be an element of A over the same ring");
    DglaElement unit(-1, d, target.order);
    std::copy(g.algebra().unit.begin(), g.algebra().unit.end(), unit.layer(0).begin());
    for (int i = 0; i < d; ++i) {
        DglaElement e(-1, d, target.order);
        e.layer(0)[static_cast<std::size_t>(i)] = 1;
        if (star_multiply(target, unit, e) != e || star_multiply(target, e, unit) != e)
            throw std::invalid_argument("e0 is not the unit of the target product");
    }
    DglaElement nil = b - unit;
    if (!nil.in_maximal_ideal()) throw std::invalid_argument("2-morphism does not reduce to the unit");
    DglaElement log(-1, d, target.order), power = nil;
    for (int k = 1; k < target.order; ++k) {
        DglaElement term = power;
        term *= Rational(k % 2 == 1 ? 1 : -1, k);
        log += term;
        power = star_multiply(target, power, nil);
    }
    // b : phi => psi means psi = b^{-1} phi b, which is the action of -log b
    return {mu_from_star(g, target), -log};
}

HochschildDims hochschild_cohomology(const FinAlgebra& a, int n_max) {
    if (n_max < 0) throw std::invalid_argument("n_max must be non-negative");
    int d = a.dim;
    long double largest = 1;
    for (int i = 0; i < 2 * n_max + 3; ++i) largest *= d;
    if (largest > 1e6L) throw std::invalid_argument("size guard: coboundary matrices exceed 10^6 entries");
    if (auto v = validate_algebra(a); !v.empty()) throw std::invalid_argument("invalid algebra: " + v.front().axiom);

    // rank of delta_n : C^n -> C^{n+1}, restricted to normalized coordinates when asked
    auto coboundary_rank = [&](int n, bool normalized) {
        std::size_t cols = upow(d, n + 1);
        std::vector<std::size_t> keep_cols, keep_rows;
        auto keep = [&](int arity, std::vector<std::size_t>& dst) {
            for_each_entry(d, arity, [&](std::span<const int> idx, std::size_t base) {
                if (normalized && touches_unit(idx)) return;
                for (int k = 0; k < d; ++k) dst.push_back(base + static_cast<std::size_t>(k));
            });
        };
        keep(n, keep_cols);
        keep(n + 1, keep_rows);
        Matrix m(static_cast<int>(keep_rows.size()), static_cast<int>(keep_cols.size()));
        Vec e(cols);
        for (std::size_t c = 0; c < keep_cols.size(); ++c) {
            e[keep_cols[c]] = 1;
            Vec img = standard_coboundary(a, n, e);
            e[keep_cols[c]] = 0;
            for (std::size_t r = 0; r < keep_rows.size(); ++r)
                m(static_cast<int>(r), static_cast<int>(c)) = img[keep_rows[r]];
        }
        return std::pair{rank_parallel(m), static_cast<int>(keep_cols.size())};
    };
    HochschildDims out;
    for (bool normalized : {false, true}) {
        auto& dst = normalized ? out.normalized : out.full;
        int prev_rank = 0;
        for (int n = 0; n <= n_max; ++n) {
            auto [rk, dim_n] = coboundary_rank(n, normalized);
            dst.push_back(dim_n - rk - prev_rank);
            prev_rank = rk;
        }
    }
    return out;
}

}  // namespace deform
