#include "deform/stacks.hpp"

#include <algorithm>
#include <sstream>

namespace deform {

namespace {

MonotoneMap vertex(int n, int v) { return MonotoneMap::constant(0, n, v); }
MonotoneMap edge(int n, int a, int b) { return MonotoneMap{1, n, {a, b}}; }

DglaElement face(const CosimplicialDgla& g, int i, int n, const DglaElement& x) { return coface(g, i, n, x); }

DglaElement zero(const CosimplicialDgla& g, int level, int degree, int order) {
    return DglaElement::zero(g.level(level), degree, order);
}

void require_shape(const CosimplicialDgla& g, const DglaElement& x, int level, int degree, int order, const char* what) {
    if (x.degree() != degree || x.dim() != g.level(level).dim_or_zero(degree) || x.order() != order)
        throw std::invalid_argument(std::string(what) + " has the wrong level, degree or order");
}

std::optional<std::string> difference(const CosimplicialDgla& g, int level, const DglaElement& a, const DglaElement& b) {
    for (int r = 0; r < a.order(); ++r)
        for (int i = 0; i < a.dim(); ++i)
            if (a.layer(r)[static_cast<std::size_t>(i)] != b.layer(r)[static_cast<std::size_t>(i)])
                return "order " + std::to_string(r) + " at " + g.locate(level, a.degree(), i);
    return std::nullopt;
}

std::optional<std::string> nonzero(const CosimplicialDgla& g, int level, const DglaElement& a) {
    return difference(g, level, a, DglaElement(a.degree(), a.dim(), a.order()));
}

void expect_equal(std::vector<Violation>& out, const char* axiom, const CosimplicialDgla& g, int level,
                  const DglaElement& a, const DglaElement& b) {
    if (auto w = difference(g, level, a, b)) out.push_back({axiom, *w});
}

void expect_zero(std::vector<Violation>& out, const char* axiom, const CosimplicialDgla& g, int level, const DglaElement& a) {
    if (auto w = nonzero(g, level, a)) out.push_back({axiom, *w});
}

// The composite 2-morphism outer o inner, twisted by base.
DglaElement vcomp(const CosimplicialDgla& g, int level, const DglaElement& base, const DglaElement& outer,
                  const DglaElement& inner) {
    return bch_twisted(g.level(level), base, outer, inner);
}

// y = exp(d_base t) x for a 2-morphism t: x => y.
DglaElement act(const CosimplicialDgla& g, int level, const DglaElement& base, const DglaElement& t, const DglaElement& x) {
    return bch_plain(g.level(level), twisted_differential(g.level(level), base, t), x);
}

DglaElement gauge(const CosimplicialDgla& g, int level, const DglaElement& outer, const DglaElement& inner) {
    return bch_plain(g.level(level), outer, inner);
}

// Left side of the 1-morphism equation at level 2; target.gamma1 enters only through b01.
DglaElement one_morphism_lhs(const CosimplicialDgla& g, const GStack& source, const DglaElement& target_gamma0,
                             const DglaElement& target_gamma1, const DglaElement& j1, const DglaElement& j2) {
    const DglaModel& l2 = g.level(2);
    DglaElement base = push(g, vertex(2, 0), target_gamma0);
    DglaElement j0 = push(g, vertex(2, 0), j1);
    DglaElement b01 = face(g, 2, 1, target_gamma1);
    DglaElement right = ad_exp(l2, b01, face(g, 0, 1, j2));
    DglaElement middle = vcomp(g, 2, base, face(g, 2, 1, j2), right);
    return vcomp(g, 2, base, ad_exp(l2, j0, source.gamma2), middle);
}

void check_ideal(std::vector<Violation>& out, const DglaElement& x, const char* what) {
    if (!x.in_maximal_ideal()) out.push_back({std::string(what) + " in the maximal ideal", "order 0 layer is nonzero"});
}

}  // namespace

GStack trivial_gstack(const CosimplicialDgla& g, int order) {
    return {zero(g, 0, 1, order), zero(g, 1, 0, order), zero(g, 2, -1, order)};
}

GStack strict_gstack(const CosimplicialDgla& g, const DglaElement& gamma0) {
    require_shape(g, gamma0, 0, 1, gamma0.order(), "gamma0");
    return {gamma0, zero(g, 1, 0, gamma0.order()), zero(g, 2, -1, gamma0.order())};
}

bool is_strict(const CosimplicialDgla& g, const GStack& s) {
    return s.gamma1.is_zero() && s.gamma2.is_zero() && face(g, 0, 0, s.gamma0) == face(g, 1, 0, s.gamma0);
}

std::vector<Violation> validate_gstack(const CosimplicialDgla& g, const GStack& s) {
    if (g.top() < 3) throw std::invalid_argument("validating a stack needs levels up to 3");
    const int order = s.order();
    require_shape(g, s.gamma0, 0, 1, order, "gamma0");
    require_shape(g, s.gamma1, 1, 0, order, "gamma1");
    require_shape(g, s.gamma2, 2, -1, order, "gamma2");
    std::vector<Violation> out;
    expect_zero(out, "gamma0 Maurer-Cartan", g, 0, mc_residual(g.level(0), s.gamma0));
    check_ideal(out, s.gamma1, "gamma1");
    check_ideal(out, s.gamma2, "gamma2");
    if (!out.empty()) return out;

    DglaElement v0 = face(g, 1, 0, s.gamma0), v1 = face(g, 0, 0, s.gamma0);
    expect_equal(out, "gamma1 maps d0 gamma0 to d1 gamma0", g, 1, gauge_act(g.level(1), {s.gamma1}, v1, false), v0);
    expect_zero(out, "s0 gamma1 = Id", g, 0, codegeneracy(g, 0, 1, s.gamma1));

    DglaElement base2 = push(g, vertex(2, 0), s.gamma0);
    DglaElement composite = gauge(g, 2, face(g, 2, 1, s.gamma1), face(g, 0, 1, s.gamma1));
    expect_equal(out, "gamma2 source and target", g, 2, act(g, 2, base2, s.gamma2, composite), face(g, 1, 1, s.gamma1));
    expect_zero(out, "s0 gamma2 = Id", g, 1, codegeneracy(g, 0, 2, s.gamma2));
    expect_zero(out, "s1 gamma2 = Id", g, 1, codegeneracy(g, 1, 2, s.gamma2));

    DglaElement base3 = push(g, vertex(3, 0), s.gamma0);
    DglaElement g01 = push(g, edge(3, 0, 1), s.gamma1);
    DglaElement lhs = vcomp(g, 3, base3, face(g, 2, 2, s.gamma2), ad_exp(g.level(3), g01, face(g, 0, 2, s.gamma2)));
    DglaElement rhs = vcomp(g, 3, base3, face(g, 1, 2, s.gamma2), face(g, 3, 2, s.gamma2));
    expect_equal(out, "gamma2 cocycle", g, 3, lhs, rhs);
    return out;
}

std::vector<Violation> validate_one_morphism(const CosimplicialDgla& g, const GStack& source, const GStack& target,
                                             const StackOneMorphism& j) {
    const int order = source.order();
    require_shape(g, j.j1, 0, 0, order, "j1");
    require_shape(g, j.j2, 1, -1, order, "j2");
    if (target.order() != order) throw RingMismatch(order, target.order());
    std::vector<Violation> out;
    check_ideal(out, j.j1, "j1");
    check_ideal(out, j.j2, "j2");
    if (!out.empty()) return out;
    expect_equal(out, "j1 maps source gamma0 to target gamma0", g, 0, gauge_act(g.level(0), {j.j1}, source.gamma0, false),
                 target.gamma0);

    DglaElement base1 = face(g, 1, 0, target.gamma0);
    DglaElement from = gauge(g, 1, target.gamma1, face(g, 0, 0, j.j1));
    DglaElement to = gauge(g, 1, face(g, 1, 0, j.j1), source.gamma1);
    expect_equal(out, "j2 source and target", g, 1, act(g, 1, base1, j.j2, from), to);
    expect_zero(out, "s0 j2 = Id", g, 0, codegeneracy(g, 0, 1, j.j2));

    DglaElement base2 = push(g, vertex(2, 0), target.gamma0);
    DglaElement lhs = one_morphism_lhs(g, source, target.gamma0, target.gamma1, j.j1, j.j2);
    DglaElement rhs = vcomp(g, 2, base2, face(g, 1, 1, j.j2), target.gamma2);
    expect_equal(out, "1-morphism compatibility", g, 2, lhs, rhs);
    return out;
}

std::vector<Violation> validate_two_morphism(const CosimplicialDgla& g, const GStack& target, const StackOneMorphism& from,
                                             const StackOneMorphism& to, const StackTwoMorphism& phi) {
    require_shape(g, phi.phi, 0, -1, target.order(), "phi");
    std::vector<Violation> out;
    check_ideal(out, phi.phi, "phi");
    if (!out.empty()) return out;
    expect_equal(out, "phi source and target", g, 0, act(g, 0, target.gamma0, phi.phi, from.j1), to.j1);
    DglaElement base1 = face(g, 1, 0, target.gamma0);
    DglaElement lhs = vcomp(g, 1, base1, to.j2, ad_exp(g.level(1), target.gamma1, face(g, 0, 0, phi.phi)));
    DglaElement rhs = vcomp(g, 1, base1, face(g, 1, 0, phi.phi), from.j2);
    expect_equal(out, "2-morphism compatibility", g, 1, lhs, rhs);
    return out;
}

StackOneMorphism identity_one_morphism(const CosimplicialDgla& g, const GStack& s) {
    return {zero(g, 0, 0, s.order()), zero(g, 1, -1, s.order())};
}

StackOneMorphism compose_1morphisms(const CosimplicialDgla& g, const GStack& s1, const GStack& s2, const GStack& s3,
                                    const StackOneMorphism& j, const StackOneMorphism& d) {
    if (!(gauge_act(g.level(0), {j.j1}, s1.gamma0, false) == s2.gamma0) ||
        !(gauge_act(g.level(0), {d.j1}, s2.gamma0, false) == s3.gamma0))
        throw std::invalid_argument("1-morphisms do not compose: endpoints differ");
    StackOneMorphism out;
    out.j1 = gauge(g, 0, d.j1, j.j1);
    DglaElement base1 = face(g, 1, 0, s3.gamma0);
    out.j2 = vcomp(g, 1, base1, ad_exp(g.level(1), face(g, 1, 0, d.j1), j.j2), d.j2);
    if (auto v = validate_one_morphism(g, s1, s3, out); !v.empty())
        throw std::logic_error("composite 1-morphism fails " + v.front().axiom + " " + v.front().witness);
    return out;
}

GStack transport(const CosimplicialDgla& g, const GStack& s, const DglaElement& j1, const DglaElement& j2) {
    const int order = s.order();
    require_shape(g, j1, 0, 0, order, "j1");
    require_shape(g, j2, 1, -1, order, "j2");
    GStack u;
    u.gamma0 = gauge_act(g.level(0), {j1}, s.gamma0, false);
    DglaElement base1 = face(g, 1, 0, u.gamma0);
    DglaElement to = gauge(g, 1, face(g, 1, 0, j1), s.gamma1);
    DglaElement from = act(g, 1, base1, -j2, to);
    u.gamma1 = gauge(g, 1, from, -face(g, 0, 0, j1));
    DglaElement base2 = push(g, vertex(2, 0), u.gamma0);
    u.gamma2 = vcomp(g, 2, base2, -face(g, 1, 1, j2), one_morphism_lhs(g, s, u.gamma0, u.gamma1, j1, j2));
    return u;
}

StackTwoMorphism identity_two_morphism(const CosimplicialDgla& g, int order) { return {zero(g, 0, -1, order)}; }

StackOneMorphism two_morphism_target(const CosimplicialDgla& g, const GStack& target, const StackOneMorphism& j,
                                     const StackTwoMorphism& phi) {
    StackOneMorphism k;
    k.j1 = act(g, 0, target.gamma0, phi.phi, j.j1);
    DglaElement base1 = face(g, 1, 0, target.gamma0);
    DglaElement whiskered = ad_exp(g.level(1), target.gamma1, face(g, 0, 0, phi.phi));
    k.j2 = vcomp(g, 1, base1, vcomp(g, 1, base1, face(g, 1, 0, phi.phi), j.j2), -whiskered);
    return k;
}

StackTwoMorphism compose_2morphisms(const CosimplicialDgla& g, const GStack& target, const StackTwoMorphism& outer,
                                    const StackTwoMorphism& inner) {
    return {vcomp(g, 0, target.gamma0, outer.phi, inner.phi)};
}

DglaElement random_normalized(const CosimplicialDgla& g, int level, int degree, int order, Rng& rng) {
    DglaElement out = zero(g, level, degree, order);
    const int dim = out.dim();
    std::vector<Vec> basis;
    if (level == 0) {
        for (int i = 0; i < dim; ++i) {
            basis.emplace_back(static_cast<std::size_t>(dim));
            basis.back()[static_cast<std::size_t>(i)] = 1;
        }
    } else {
        Matrix s(level * g.level(level - 1).dim_or_zero(degree), dim);
        Vec unit(static_cast<std::size_t>(dim));
        for (int c = 0; c < dim; ++c) {
            unit[static_cast<std::size_t>(c)] = 1;
            for (int i = 0; i < level; ++i) {
                Vec v = g.push(MonotoneMap::degeneracy(level, i), degree, unit);
                for (std::size_t r = 0; r < v.size(); ++r) s(i * static_cast<int>(v.size()) + static_cast<int>(r), c) = v[r];
            }
            unit[static_cast<std::size_t>(c)] = 0;
        }
        basis = nullspace(s);
    }
    for (int r = 1; r < order; ++r)
        for (const Vec& b : basis) axpy(out.layer(r), rng.rational(2, 2), b);
    return out;
}

RandomStack random_gstack(const CosimplicialDgla& g, int order, Rng& rng) {
    GStack trivial = trivial_gstack(g, order);
    StackOneMorphism j{random_normalized(g, 0, 0, order, rng), random_normalized(g, 1, -1, order, rng)};
    return {transport(g, trivial, j.j1, j.j2), j};
}

// ---------------------------------------------------------------- cosimplicial equations

const Matrix& CosimplicialSolver::system(int n, int degree) const {
    auto key = std::make_pair(n, degree);
    if (auto it = systems_.find(key); it != systems_.end()) return it->second;
    const int cols = g_.level(n).dim_or_zero(degree), rows_d = g_.level(n + 1).dim_or_zero(degree);
    const int rows_s = n > 0 ? n * g_.level(n - 1).dim_or_zero(degree) : 0;
    Matrix m(rows_d + rows_s, cols);
    Vec unit(static_cast<std::size_t>(cols));
    for (int c = 0; c < cols; ++c) {
        unit[static_cast<std::size_t>(c)] = 1;
        for (int i = 0; i <= n + 1; ++i) {
            Vec v = g_.push(MonotoneMap::face(n, i), degree, unit);
            for (int r = 0; r < rows_d; ++r)
                if (!v[static_cast<std::size_t>(r)].is_zero()) m(r, c) += i % 2 ? -v[static_cast<std::size_t>(r)] : v[static_cast<std::size_t>(r)];
        }
        for (int i = 0; i < n; ++i) {
            Vec v = g_.push(MonotoneMap::degeneracy(n, i), degree, unit);
            const int off = rows_d + i * g_.level(n - 1).dim_or_zero(degree);
            for (std::size_t r = 0; r < v.size(); ++r) m(off + static_cast<int>(r), c) = v[r];
        }
        unit[static_cast<std::size_t>(c)] = 0;
    }
    return systems_.emplace(key, std::move(m)).first->second;
}

Vec CosimplicialSolver::solve(int n, int degree, std::span<const Rational> target) const {
    const Matrix& a = system(n, degree);
    if (target.size() != static_cast<std::size_t>(g_.level(n + 1).dim_or_zero(degree)))
        throw std::invalid_argument("target has the wrong size for level " + std::to_string(n + 1));
    Vec b(static_cast<std::size_t>(a.rows()));
    std::copy(target.begin(), target.end(), b.begin());
    SolveResult r = deform::solve(a, b);
    if (!r.solution)
        throw CosimplicialSolveError("no normalized solution at level " + std::to_string(n) + " degree " + std::to_string(degree),
                                     r.certificate);
    return *r.solution;
}

Vec cosimplicial_solve(const CosimplicialDgla& g, int n, int degree, std::span<const Rational> target) {
    return CosimplicialSolver(g).solve(n, degree, target);
}

std::vector<int> cosimplicial_cohomology(const CosimplicialDgla& g, int degree, int p_max) {
    // rank of delta: level p -> p + 1, for p = 0..p_max
    std::vector<int> ranks;
    for (int p = 0; p <= p_max; ++p) {
        const int cols = g.level(p).dim_or_zero(degree);
        SparseRank rank;
        Vec unit(static_cast<std::size_t>(cols));
        for (int c = 0; c < cols; ++c) {
            unit[static_cast<std::size_t>(c)] = 1;
            Vec col(static_cast<std::size_t>(g.level(p + 1).dim_or_zero(degree)));
            for (int i = 0; i <= p + 1; ++i) axpy(col, i % 2 ? Rational(-1) : Rational(1), g.push(MonotoneMap::face(p, i), degree, unit));
            SparseRank::Row row;
            for (std::size_t r = 0; r < col.size(); ++r)
                if (!col[r].is_zero()) row.emplace_back(static_cast<int>(r), col[r]);
            rank.insert(std::move(row));
            unit[static_cast<std::size_t>(c)] = 0;
        }
        ranks.push_back(rank.rank());
    }
    std::vector<int> out;
    for (int p = 0; p <= p_max; ++p) out.push_back(g.level(p).dim_or_zero(degree) - ranks[static_cast<std::size_t>(p)] - (p ? ranks[static_cast<std::size_t>(p - 1)] : 0));
    return out;
}

// ---------------------------------------------------------------- strictification

int StrictifyResult::rounds(int phase) const {
    return static_cast<int>(std::count_if(trace.begin(), trace.end(), [phase](const StrictifyStep& s) { return s.phase == phase; }));
}

StrictifyResult strictify(const CosimplicialDgla& g, const GStack& s) {
    if (auto v = validate_gstack(g, s); !v.empty())
        throw std::invalid_argument("not a stack: " + v.front().axiom + " " + v.front().witness);
    CosimplicialSolver solver(g);
    StrictifyResult result{s, identity_one_morphism(g, s), {}};
    auto l1 = [](std::span<const Rational> v) {
        Rational acc;
        for (const auto& x : v) acc += x.sign() < 0 ? -x : x;
        return acc;
    };
    auto support = [](const Vec& v) { return static_cast<int>(std::count_if(v.begin(), v.end(), [](const Rational& x) { return !x.is_zero(); })); };
    auto step = [&](int phase, int n, int degree, const DglaElement& defect, auto make_morphism) {
        const int r = defect.valuation();
        const Rational residual = l1(defect.layer(r));
        Vec x;
        try {
            x = solver.solve(n, degree, defect.layer(r));
        } catch (const CosimplicialSolveError& e) {
            throw CosimplicialSolveError("strictification phase " + std::to_string(phase) + " order " + std::to_string(r) + ": " + e.what(),
                                         e.certificate);
        }
        StackOneMorphism m = make_morphism(r, x);
        GStack next = transport(g, result.strict, m.j1, m.j2);
        result.morphism = compose_1morphisms(g, s, result.strict, next, result.morphism, m);
        result.strict = std::move(next);
        result.trace.push_back({phase, r, residual, support(x)});
    };
    // Phase 1: gamma2 = exp(c); psi = -b with delta b = c at the lowest order of c.
    while (!result.strict.gamma2.is_zero()) {
        const int before = result.strict.gamma2.valuation();
        step(1, 1, -1, result.strict.gamma2, [&](int r, const Vec& b) {
            StackOneMorphism m = identity_one_morphism(g, s);
            std::transform(b.begin(), b.end(), m.j2.layer(r).begin(), [](const Rational& v) { return -v; });
            return m;
        });
        if (result.strict.gamma2.valuation() <= before) throw std::logic_error("phase 1 did not raise the order of gamma2");
    }
    // Phase 2: gamma1 = exp(a); j1 = x with d0 x - d1 x = a at the lowest order of a.
    while (!result.strict.gamma1.is_zero()) {
        const int before = result.strict.gamma1.valuation();
        step(2, 0, 0, result.strict.gamma1, [&](int r, const Vec& x) {
            StackOneMorphism m = identity_one_morphism(g, s);
            std::copy(x.begin(), x.end(), m.j1.layer(r).begin());
            return m;
        });
        if (result.strict.gamma1.valuation() <= before) throw std::logic_error("phase 2 did not raise the order of gamma1");
    }
    if (auto v = validate_gstack(g, result.strict); !v.empty())
        throw std::logic_error("strictified stack fails " + v.front().axiom + " " + v.front().witness);
    if (!is_strict(g, result.strict)) throw std::logic_error("strictified stack is not strict");
    if (auto v = validate_one_morphism(g, s, result.strict, result.morphism); !v.empty())
        throw std::logic_error("strictifying 1-morphism fails " + v.front().axiom + " " + v.front().witness);
    return result;
}

// ---------------------------------------------------------------- equalizer

EqualizerDgla::EqualizerDgla(const CosimplicialDgla& g) : ambient_(g.level(0)) {
    min_ = ambient_.min_degree();
    max_ = ambient_.max_degree();
    for (int deg = min_; deg <= max_; ++deg) {
        const int cols = ambient_.dim(deg), rows = g.level(1).dim_or_zero(deg);
        Matrix e(rows, cols);
        Vec unit(static_cast<std::size_t>(cols));
        for (int c = 0; c < cols; ++c) {
            unit[static_cast<std::size_t>(c)] = 1;
            Vec a = g.push(MonotoneMap::face(0, 0), deg, unit), b = g.push(MonotoneMap::face(0, 1), deg, unit);
            for (int r = 0; r < rows; ++r) e(r, c) = a[static_cast<std::size_t>(r)] - b[static_cast<std::size_t>(r)];
            unit[static_cast<std::size_t>(c)] = 0;
        }
        Block blk;
        auto kernel = nullspace(e);
        blk.basis = Matrix::from_columns(kernel, cols);
        blk.pivots = rref(blk.basis.transpose()).pivots;
        Matrix square(static_cast<int>(kernel.size()), static_cast<int>(kernel.size()));
        for (std::size_t i = 0; i < blk.pivots.size(); ++i)
            for (std::size_t k = 0; k < kernel.size(); ++k) square(static_cast<int>(i), static_cast<int>(k)) = blk.basis(blk.pivots[i], static_cast<int>(k));
        auto inv = inverse(square);
        if (!inv) throw std::logic_error("kernel basis has no invertible pivot square");
        blk.pivot_inverse = *inv;
        blocks_.emplace(deg, std::move(blk));
    }
}

const EqualizerDgla::Block& EqualizerDgla::block(int degree) const {
    auto it = blocks_.find(degree);
    if (it == blocks_.end()) throw std::out_of_range("degree outside the equalizer");
    return it->second;
}

int EqualizerDgla::dim(int degree) const { return block(degree).basis.cols(); }

Vec EqualizerDgla::embed(int degree, std::span<const Rational> coords) const { return block(degree).basis.apply(coords); }

Vec EqualizerDgla::coordinates(int degree, std::span<const Rational> v) const {
    const Block& b = block(degree);
    Vec picked;
    for (int p : b.pivots) picked.push_back(v[static_cast<std::size_t>(p)]);
    Vec c = b.pivot_inverse.apply(picked);
    Vec back = b.basis.apply(c);
    if (!std::equal(back.begin(), back.end(), v.begin(), v.end())) throw std::invalid_argument("vector is not in the equalizer");
    return c;
}

DglaElement EqualizerDgla::embed(const DglaElement& x) const {
    DglaElement out = DglaElement::zero(ambient_, x.degree(), x.order());
    for (int r = 0; r < x.order(); ++r) {
        Vec v = embed(x.degree(), x.layer(r));
        std::copy(v.begin(), v.end(), out.layer(r).begin());
    }
    return out;
}

DglaElement EqualizerDgla::coordinates(const DglaElement& x) const {
    DglaElement out = DglaElement::zero(*this, x.degree(), x.order());
    for (int r = 0; r < x.order(); ++r) {
        Vec v = coordinates(x.degree(), x.layer(r));
        std::copy(v.begin(), v.end(), out.layer(r).begin());
    }
    return out;
}

void EqualizerDgla::bracket_into(int da, std::span<const Rational> a, int db, std::span<const Rational> b,
                                 std::span<Rational> out) const {
    const int dc = da + db;
    if (dc > max_ || out.empty()) return;
    Vec full(static_cast<std::size_t>(ambient_.dim(dc)));
    ambient_.bracket_into(da, embed(da, a), db, embed(db, b), full);
    axpy(out, 1, coordinates(dc, full));
}

void EqualizerDgla::differential_into(int degree, std::span<const Rational> a, std::span<Rational> out) const {
    if (degree + 1 > max_ || out.empty()) return;
    Vec full(static_cast<std::size_t>(ambient_.dim(degree + 1)));
    ambient_.differential_into(degree, embed(degree, a), full);
    axpy(out, 1, coordinates(degree + 1, full));
}

DglaElement strict_to_mc(const CosimplicialDgla& g, const EqualizerDgla& eq, const GStack& s) {
    if (!is_strict(g, s)) throw std::invalid_argument("stack is not strict");
    DglaElement x = eq.coordinates(s.gamma0);
    if (!is_mc(eq, x)) throw std::invalid_argument("gamma0 is not Maurer-Cartan");
    return x;
}

GStack mc_to_strict(const CosimplicialDgla& g, const EqualizerDgla& eq, const DglaElement& x) {
    if (!is_mc(eq, x)) throw std::invalid_argument("element is not Maurer-Cartan in the equalizer");
    return strict_gstack(g, eq.embed(x));
}

// ---------------------------------------------------------------- deformations of descent data

GStack star_to_gstack(const CosimplicialG& g, const DeformationDatum& d) {
    if (!(d.datum.a012 == g.datum().a012) || !(d.datum.a01 == g.datum().a01))
        throw std::invalid_argument("deformation belongs to another descent datum");
    require_shape(g, d.star, 0, 1, d.star.order(), "star");
    DglaElement a = face(g, 0, 0, d.star), b = face(g, 1, 0, d.star);
    for (int r = 0; r < a.order(); ++r)
        for (int i = 0; i < a.dim(); ++i)
            if (a.layer(r)[static_cast<std::size_t>(i)] != b.layer(r)[static_cast<std::size_t>(i)])
                throw std::invalid_argument("f_* mu^p differs from f^# mu^q at order " + std::to_string(r) + ", " + g.locate(1, 1, i));
    if (auto w = nonzero(g, 0, mc_residual(g.level(0), d.star))) throw std::invalid_argument("star product is not associative: " + *w);
    return strict_gstack(g, d.star);
}

DeformationDatum gstack_to_star(const CosimplicialG& g, const GStack& s) {
    if (!is_strict(g, s)) throw std::invalid_argument("stack is not strict");
    return {g.datum(), s.gamma0};
}

DeformationDatum constant_deformation(const CosimplicialG& g, const StarProduct& star) {
    const LocalDglaProduct& l0 = g.product(0);
    const int dim = star.algebra.dim;
    if (dim != g.datum().fiber.dim || !(star.algebra.mult == g.datum().fiber.mult))
        throw std::invalid_argument("star product lives on another fiber");
    DglaElement x = DglaElement::zero(l0, 1, star.order);
    const std::size_t t = static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim);
    for (int blk = 0; blk < l0.blocks(); ++blk) {
        const CellTwist& tw = l0.twist(blk);
        if (!(tw == CellTwist::trivial(tw.p()))) throw std::invalid_argument("constant deformations need a trivial twist");
        const std::size_t off = l0.block_offset(1, blk), size = l0.block_dim(1, blk);
        for (int r = 1; r < star.order; ++r) {
            const Vec& b = star.corrections[static_cast<std::size_t>(r - 1)];
            for (std::size_t k = 0; k < size; k += t) std::copy(b.begin(), b.end(), x.layer(r).begin() + static_cast<std::ptrdiff_t>(off + k));
        }
    }
    return {g.datum(), x};
}

DglaElement object_zero_component(const CosimplicialG& g, const DglaElement& gamma0, int cell) {
    const LocalDglaProduct& l0 = g.product(0);
    const int blk = g.first_block(0, g.simplex_index(DeltaSimplex::point(0))) + cell;
    const int degree = gamma0.degree();
    const std::size_t off = l0.block_offset(degree, blk), size = l0.block_dim(degree, blk);
    DglaElement out(degree, static_cast<int>(size), gamma0.order());
    for (int r = 0; r < gamma0.order(); ++r)
        std::copy_n(gamma0.layer(r).begin() + static_cast<std::ptrdiff_t>(off), size, out.layer(r).begin());
    return out;
}

// ---------------------------------------------------------------- classification

FirstOrderClasses classify_first_order(const CosimplicialDgla& g) {
    EqualizerDgla eq(g);
    FirstOrderClasses out;
    for (const Vec& c : cohomology_basis(eq, 1)) out.representatives.push_back(eq.embed(1, c));
    out.count = static_cast<int>(out.representatives.size());
    return out;
}

Vec mc_obstruction(const DglaModel& g, const DglaElement& x, int r) {
    DglaElement res = mc_residual(g, x);
    auto layer = res.layer(r);
    return Vec(layer.begin(), layer.end());
}

std::vector<int> total_cohomology(const CosimplicialDgla& g, int n_max) {
    const DglaModel& l0 = g.level(0);
    const int qmin = l0.min_degree(), qmax = l0.max_degree();
    // Tot^n = sum over p + q = n, p <= top
    auto pieces = [&](int n) {
        std::vector<std::pair<int, int>> out;  // (p, q)
        for (int q = qmin; q <= std::min(qmax, n); ++q)
            if (int p = n - q; p >= 0 && p <= g.top()) out.emplace_back(p, q);
        return out;
    };
    auto offsets = [&](int n) {
        std::map<std::pair<int, int>, int> off;
        int total = 0;
        for (auto pq : pieces(n)) {
            off[pq] = total;
            total += g.level(pq.first).dim_or_zero(pq.second);
        }
        return std::make_pair(off, total);
    };
    // ranks[n - qmin] is the rank of Tot^n -> Tot^{n+1}
    std::vector<int> ranks, dims;
    for (int n = qmin; n <= n_max; ++n) {
        auto [src_off, src_dim] = offsets(n);
        auto [dst_off, dst_dim] = offsets(n + 1);
        dims.push_back(src_dim);
        SparseRank rank;
        for (auto [pq, base] : src_off) {
            auto [p, q] = pq;
            if (p + 1 > g.top()) throw std::out_of_range("total complex needs level " + std::to_string(p + 1));
            const int cols = g.level(p).dim_or_zero(q);
            Vec unit(static_cast<std::size_t>(cols));
            for (int c = 0; c < cols; ++c) {
                unit[static_cast<std::size_t>(c)] = 1;
                std::map<int, Rational> col;
                for (int i = 0; i <= p + 1; ++i) {
                    Vec v = g.push(MonotoneMap::face(p, i), q, unit);
                    const int off = dst_off.at({p + 1, q});
                    for (std::size_t r = 0; r < v.size(); ++r)
                        if (!v[r].is_zero()) col[off + static_cast<int>(r)] += i % 2 ? -v[r] : v[r];
                }
                if (q + 1 <= qmax) {
                    Vec dv(static_cast<std::size_t>(g.level(p).dim(q + 1)));
                    g.level(p).differential_into(q, unit, dv);
                    const int off = dst_off.at({p, q + 1});
                    for (std::size_t r = 0; r < dv.size(); ++r)
                        if (!dv[r].is_zero()) col[off + static_cast<int>(r)] += p % 2 ? -dv[r] : dv[r];
                }
                SparseRank::Row row;
                for (auto& [k, v] : col)
                    if (!v.is_zero()) row.emplace_back(k, v);
                rank.insert(std::move(row));
                unit[static_cast<std::size_t>(c)] = 0;
            }
        }
        ranks.push_back(rank.rank());
    }
    std::vector<int> out;
    for (int n = 0; n <= n_max; ++n) {
        const auto i = static_cast<std::size_t>(n - qmin);
        out.push_back(dims[i] - ranks[i] - (i ? ranks[i - 1] : 0));
    }
    return out;
}

}  // namespace deform
