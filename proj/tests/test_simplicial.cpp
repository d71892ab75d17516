#include <doctest.h>

#include "deform/simplicial.hpp"

#include <optional>

using namespace deform;

namespace {

MonotoneMap mm(int source, int target, std::initializer_list<int> values) { return {source, target, SmallInts(values)}; }

Vec random_vec(Rng& rng, int n) {
    Vec v(static_cast<std::size_t>(n));
    for (auto& x : v) x = rng.rational(3, 2);
    return v;
}

Vec minus(Vec a, const Vec& b) {
    axpy(a, -1, b);
    return a;
}

}  // namespace

TEST_CASE("faces and degeneracies satisfy the simplicial identities") {
    for (int n = 0; n <= 4; ++n) {
        for (int i = 0; i <= n + 1; ++i)
            for (int j = i + 1; j <= n + 2; ++j)
                CHECK(compose(MonotoneMap::face(n + 1, j), MonotoneMap::face(n, i)) ==
                      compose(MonotoneMap::face(n + 1, i), MonotoneMap::face(n, j - 1)));
        for (int i = 0; i < n; ++i) {
            // s_i d_i = s_i d_{i+1} = id
            CHECK(compose(MonotoneMap::degeneracy(n + 1, i), MonotoneMap::face(n, i)).is_identity());
            CHECK(compose(MonotoneMap::degeneracy(n + 1, i), MonotoneMap::face(n, i + 1)).is_identity());
        }
    }
    CHECK(all_monotone_maps(1, 2).size() == 6);
    CHECK_THROWS(validate_monotone(mm(1, 2, {2, 1})));
}

TEST_CASE("simplices: truncation, concatenation and upsilon") {
    DeltaSimplex lam({0, 1, 2}, {MonotoneMap::face(0, 0), MonotoneMap::face(1, 1)});
    CHECK(lam.map(0, 2) == mm(0, 2, {2}));
    // k -> lambda(k 2)(top of lambda(k)): 0 -> 2, 1 -> d_1(1) = 2, 2 -> 2
    CHECK(upsilon(lam) == mm(2, 2, {2, 2, 2}));
    CHECK(upsilon(DeltaSimplex::point(3)) == mm(0, 3, {3}));
    DeltaSimplex ids({2, 2, 2}, {MonotoneMap::identity(2), MonotoneMap::identity(2)});
    CHECK(upsilon(ids) == mm(2, 2, {2, 2, 2}));
    DeltaSimplex lam2({0, 1, 1}, {MonotoneMap::face(0, 1), MonotoneMap::identity(1)});
    CHECK(upsilon(lam2) == mm(2, 1, {0, 1, 1}));

    CHECK(concat(lam, DeltaSimplex::point(2)) == lam);
    CHECK(concat(DeltaSimplex::point(0), lam) == lam);
    DeltaSimplex a = DeltaSimplex::arrow(MonotoneMap::face(0, 1)), b = DeltaSimplex::arrow(MonotoneMap::face(1, 0));
    DeltaSimplex ab = concat(a, b);
    CHECK(ab.dim() == 2);
    CHECK(ab.map(0, 2) == compose(MonotoneMap::face(1, 0), MonotoneMap::face(0, 1)));
    CHECK(ab.truncate(1, 2) == b);
    CHECK_THROWS(concat(b, a));

    Rng rng(30);
    for (int it = 0; it < 50; ++it) {
        auto random_simplex = [&](int start, int n) {
            std::vector<int> objs{start};
            std::vector<MonotoneMap> arrs;
            for (int k = 0; k < n; ++k) {
                int q = rng.uniform(0, 3);
                auto maps = all_monotone_maps(objs.back(), q);
                arrs.push_back(maps[static_cast<std::size_t>(rng.uniform(0, static_cast<int>(maps.size()) - 1))]);
                objs.push_back(q);
            }
            return DeltaSimplex(objs, arrs);
        };
        DeltaSimplex x = random_simplex(rng.uniform(0, 3), rng.uniform(0, 2));
        DeltaSimplex y = random_simplex(x.object(x.dim()), rng.uniform(0, 2));
        DeltaSimplex z = random_simplex(y.object(y.dim()), rng.uniform(0, 2));
        CHECK(concat(concat(x, y), z) == concat(x, concat(y, z)));
        DeltaSimplex xy = concat(x, y);
        DeltaSimplex x2 = random_simplex(x.object(0), x.dim());
        if (x2.objects() == x.objects()) {
            DeltaSimplex swapped = xy;
            swapped.replace_head(x2);
            CHECK(swapped == concat(x2, y));
        } else {
            CHECK_THROWS(DeltaSimplex(xy).replace_head(x2));
        }
        // mixed arrow: lambda2(0 (k-n1)) o lambda1(i n1)
        for (int i = 0; i <= x.dim(); ++i)
            for (int k = x.dim(); k <= xy.dim(); ++k)
                CHECK(xy.map(i, k) == compose(y.map(0, k - x.dim()), x.map(i, x.dim())));
    }
}

TEST_CASE("cosimplicial spaces are functors") {
    Rng rng(31);
    CHECK(CosimplicialVS::constant(2, 3).validate().empty());
    for (int it = 0; it < 12; ++it) {
        CosimplicialVS v = it % 2 ? random_cosimplicial(rng, 3, 3) : random_cosimplicial_pieces(rng, 3, 2);
        auto bad = v.validate();
        CHECK(bad.empty());
        if (!bad.empty()) MESSAGE(bad.front().witness);
        for (int m = 0; m <= 3; ++m)
            CHECK(v.map(MonotoneMap::identity(m)) == Matrix::identity(v.dim(m)));
    }
    // a broken coface is detected
    CosimplicialVS c = CosimplicialVS::constant(1, 2);
    std::vector<std::vector<Matrix>> cof{{Matrix::identity(1), Matrix::identity(1)},
                                         {Matrix::identity(1), Matrix::identity(1), Matrix::identity(1)}};
    cof[1][2](0, 0) = 2;
    std::vector<std::vector<Matrix>> codeg{{}, {Matrix::identity(1)}, {Matrix::identity(1), Matrix::identity(1)}};
    CHECK_FALSE(CosimplicialVS({1, 1, 1}, cof, codeg).validate().empty());
}

TEST_CASE("cochain complex, normalization and cohomology") {
    CosimplicialVS c = CosimplicialVS::constant(1, 3);
    CHECK(cochain_differential_matrix(c, 0).is_zero());
    Rng rng(32);
    for (int it = 0; it < 20; ++it) {
        CosimplicialVS v = it % 2 ? random_cosimplicial(rng, 3, 3) : random_cosimplicial_pieces(rng, 3, 2);
        for (int n = 0; n + 2 <= 3; ++n) CHECK((cochain_differential_matrix(v, n + 1) * cochain_differential_matrix(v, n)).is_zero());
        CHECK(normalized_basis(v, 0).size() == static_cast<std::size_t>(v.dim(0)));
        for (int n = 0; n <= 3; ++n) {
            Matrix p = normalized_projection(v, n);
            CHECK(p * p == p);
            Vec x = random_vec(rng, v.dim(n));
            CHECK(is_normalized_cochain(v, n, p.apply(x)));
            if (n >= 1)  // degenerate images project to zero
                CHECK(is_zero(p.apply(v.coface(n - 1, rng.uniform(1, n)).apply(random_vec(rng, v.dim(n - 1))))));
        }
        auto h = cosimplicial_cohomology(v);
        CHECK(h.full == h.normalized);
    }
}

TEST_CASE("Dold-Kan spaces have the cohomology of their normalized complex") {
    Matrix d0(1, 1);
    d0(0, 0) = 1;
    // N = (Q -> Q) is acyclic; N = Q in degree 1 alone has H^1 = 1
    CosimplicialVS acyclic = CosimplicialVS::from_normalized({1, 1}, {d0}, 3);
    CHECK(acyclic.validate().empty());
    CHECK(cosimplicial_cohomology(acyclic).full == std::vector<int>{0, 0, 0});
    CosimplicialVS circle = CosimplicialVS::from_normalized({0, 1}, {Matrix(1, 0)}, 3);
    CHECK(circle.dims() == std::vector<int>{0, 1, 2, 3});
    CHECK(cosimplicial_cohomology(circle).full == std::vector<int>{0, 1, 0});
}

TEST_CASE("hat structure maps") {
    Rng rng(33);
    CosimplicialVS v = random_cosimplicial_pieces(rng, 3, 1);
    HatCochain f = random_hat_cochain(v, 0, 3, 7);
    // identity
    HatCochain g = hat_structure(MonotoneMap::identity(0), f);
    for_each_simplex(0, 3, [&](const DeltaSimplex& l) { CHECK(g(l) == f(l)); });
    // d_0 from [0] to [1]: (d_0)_* f (lambda) = V(lambda(01)) f(lambda(1)) ... the factorization 0 -> 1 -> 1
    HatCochain d0 = hat_structure(MonotoneMap::face(0, 0), f);
    HatCochain d1 = hat_structure(MonotoneMap::face(0, 1), f);
    for_each_simplex(1, 2, [&](const DeltaSimplex& l) {
        CHECK(d0(l) == f(DeltaSimplex::point(l.object(1))));
        CHECK(d1(l) == v.map(l.map(0, 1)).apply(f(DeltaSimplex::point(l.object(0)))));
    });
    // functoriality on sampled composable pairs
    HatCochain f1 = random_hat_cochain(v, 1, 3, 8);
    for (int it = 0; it < 10; ++it) {
        auto maps12 = all_monotone_maps(1, 2);
        auto maps23 = all_monotone_maps(2, 3);
        MonotoneMap phi = maps12[static_cast<std::size_t>(rng.uniform(0, static_cast<int>(maps12.size()) - 1))];
        MonotoneMap psi = maps23[static_cast<std::size_t>(rng.uniform(0, static_cast<int>(maps23.size()) - 1))];
        HatCochain lhs = hat_structure(compose(psi, phi), f1), rhs = hat_structure(psi, hat_structure(phi, f1));
        int checked = 0;
        for_each_simplex(3, 2, [&](const DeltaSimplex& l) {
            if (checked++ % 7 == 0) CHECK(lhs(l) == rhs(l));
        });
    }
}

TEST_CASE("iota and pi") {
    Rng rng(34);
    CosimplicialVS c = CosimplicialVS::constant(2, 3);
    Vec x{1, Rational(-2, 3)};
    HatCochain ix = iota(c, 1, x, 3);
    for_each_simplex(1, 3, [&](const DeltaSimplex& l) { CHECK(ix(l) == x); });

    CosimplicialVS v = random_cosimplicial_pieces(rng, 3, 2);
    // n = 0: iota(x)(point q) is the structure map of the top vertex
    Vec x0 = random_vec(rng, v.dim(0));
    HatCochain i0 = iota(v, 0, x0, 3);
    for (int q = 0; q <= 3; ++q) CHECK(i0(DeltaSimplex::point(q)) == v.map(MonotoneMap::constant(0, q, q)).apply(x0));
    // n = 1: pi(f) = -(f(d_0) - f(d_1))
    HatCochain f = random_hat_cochain(v, 1, 3, 9);
    Vec expected = minus(f(DeltaSimplex::arrow(MonotoneMap::face(0, 1))), f(DeltaSimplex::arrow(MonotoneMap::face(0, 0))));
    CHECK(pi(f) == expected);
    CHECK(pi(random_hat_cochain(v, 0, 3, 10)) == random_hat_cochain(v, 0, 3, 10)(DeltaSimplex::point(0)));

    for (int it = 0; it < 10; ++it) {
        CosimplicialVS w = it % 2 ? random_cosimplicial(rng, 3, 3) : random_cosimplicial_pieces(rng, 3, 2);
        for (int n = 0; n <= 3; ++n) {
            Vec y = normalized_projection(w, n).apply(random_vec(rng, w.dim(n)));
            CHECK(pi(iota(w, n, y, 3)) == y);
        }
        // chain maps
        for (int n = 0; n <= 1; ++n) {
            Vec y = random_vec(rng, w.dim(n));
            HatCochain lhs = hat_differential(iota(w, n, y, 2)), rhs = iota(w, n + 1, cochain_differential(w, n, y), 2);
            for_each_simplex(n + 1, 2, [&](const DeltaSimplex& l) { CHECK(lhs(l) == rhs(l)); });
            HatCochain g = random_hat_cochain(w, n, 3, 11 + static_cast<std::uint64_t>(n));
            CHECK(pi(hat_differential(g)) == cochain_differential(w, n, pi(g)));
        }
    }
}

TEST_CASE("hat differential squares to zero") {
    Rng rng(35);
    CosimplicialVS v = random_cosimplicial_pieces(rng, 3, 2);
    HatCochain f = random_hat_cochain(v, 0, 3, 12);
    HatCochain dd = hat_differential(hat_differential(f));
    for_each_simplex(2, 2, [&](const DeltaSimplex& l) { CHECK(is_zero(dd(l))); });
}

namespace {

// Number of n-simplices (objects <= cap, every stride-th one) where (iota pi - Id) f != s (d h + h d) f.
int homotopy_failures(const CosimplicialVS& v, int n, int cap, std::uint64_t seed, HomotopySigns signs, int stride = 1) {
    HatCochain f = random_hat_cochain(v, n, 3, seed);
    HatCochain ip = iota(v, n, pi(f), 3);
    HatCochain hd = homotopy_h(hat_differential(f), signs);
    std::optional<HatCochain> dh;
    if (n >= 1) dh.emplace(hat_differential(homotopy_h(f, signs)));
    int bad = 0, seen = 0;
    for_each_simplex(n, cap, [&](const DeltaSimplex& l) {
        if (seen++ % stride) return;
        Vec lhs = minus(ip(l), f(l));
        Vec rhs = hd(l);
        if (dh) axpy(rhs, 1, (*dh)(l));
        for (auto& x : rhs) x *= kHomotopySign;
        bad += lhs != rhs;
    });
    return bad;
}

}  // namespace

TEST_CASE("homotopy identity with the frozen sign") {
    Rng rng(36);
    CHECK_THROWS(homotopy_h(random_hat_cochain(CosimplicialVS::constant(1, 3), 0, 3, 1)));
    for (int it = 0; it < 4; ++it) {
        CosimplicialVS v = it % 2 ? random_cosimplicial(rng, 3, 3) : random_cosimplicial_pieces(rng, 3, 2);
        for (int n = 0; n <= 2; ++n)
            CHECK(homotopy_failures(v, n, 3, 100 + static_cast<std::uint64_t>(it * 10 + n), HomotopySigns::corrected) == 0);
        CHECK(homotopy_failures(v, 3, 3, 200 + static_cast<std::uint64_t>(it), HomotopySigns::corrected, 997) == 0);
    }
}

TEST_CASE("unstored evaluation agrees with the memo") {
    Rng rng(38);
    CosimplicialVS v = random_cosimplicial(rng, 3, 3);
    HatCochain f = random_hat_cochain(v, 2, 2, 9);
    HatCochain hd = homotopy_h(hat_differential(f));
    int n = 0;
    for_each_simplex(2, 2, [&](const DeltaSimplex& l) {
        if (n++ % 2) CHECK(hd(l) == hd.compute(l));
        else CHECK(hd.compute(l) == hd(l));
    });
}

TEST_CASE("homotopy without the extra sign fails from degree 2") {
    Rng rng(37);
    CosimplicialVS v = random_cosimplicial_pieces(rng, 3, 2);
    CHECK(homotopy_failures(v, 0, 3, 5, HomotopySigns::uncorrected) == 0);
    CHECK(homotopy_failures(v, 1, 3, 6, HomotopySigns::uncorrected) == 0);
    CHECK(homotopy_failures(v, 2, 2, 7, HomotopySigns::uncorrected) > 0);
}
