#include <doctest.h>

#include "deform/linalg.hpp"
#include "deform/random.hpp"

using namespace deform;

namespace {

Matrix low_rank(Rng& rng, int rows, int cols, int r) {
    return rng.matrix(rows, r) * rng.matrix(r, cols);
}

}  // namespace

TEST_CASE("rank, nullspace and inverse") {
    Rng rng(3);
    for (int it = 0; it < 100; ++it) {
        int rows = rng.uniform(1, 7), cols = rng.uniform(1, 7), r = rng.uniform(1, 4);
        Matrix m = low_rank(rng, rows, cols, r);
        int rk = rank(m);
        CHECK(rk <= r);
        CHECK(rank_parallel(m) == rk);
        auto ns = nullspace(m);
        CHECK(int(ns.size()) == cols - rk);
        for (const auto& v : ns) CHECK(is_zero(m.apply(v)));
        Matrix p = rng.invertible(rows);
        auto inv = inverse(p);
        REQUIRE(inv);
        CHECK(*inv * p == Matrix::identity(rows));
    }
    CHECK_FALSE(inverse(Matrix(2, 2)));
}

TEST_CASE("solve returns a solution or a certificate") {
    Rng rng(4);
    for (int it = 0; it < 200; ++it) {
        int rows = rng.uniform(1, 6), cols = rng.uniform(1, 6);
        Matrix a = low_rank(rng, rows, cols, rng.uniform(1, 3));
        Vec b(static_cast<std::size_t>(rows));
        for (auto& x : b) x = rng.rational(3, 2);
        SolveResult res = solve(a, b);
        if (res.solution) {
            CHECK(a.apply(*res.solution) == b);
        } else {
            Vec ya = a.transpose().apply(res.certificate);
            CHECK(is_zero(ya));
            Rational yb;
            for (std::size_t i = 0; i < b.size(); ++i) yb.add_product(res.certificate[i], b[i]);
            CHECK_FALSE(yb.is_zero());
        }
    }
}

TEST_CASE("sparse rank matches dense rank") {
    Rng rng(8);
    for (int it = 0; it < 60; ++it) {
        int rows = rng.uniform(1, 9), cols = rng.uniform(1, 9);
        Matrix m = low_rank(rng, rows, cols, rng.uniform(1, 5));
        SparseRank sr;
        for (int i = 0; i < rows; ++i) {
            SparseRank::Row row;
            for (int j = 0; j < cols; ++j)
                if (!m(i, j).is_zero()) row.emplace_back(j, m(i, j));
            sr.insert(row);
        }
        CHECK(sr.rank() == rank(m));
    }
}

TEST_CASE("smith form and integer solving") {
    Rng rng(9);
    using Z = std::vector<std::vector<mpz_class>>;
    for (int it = 0; it < 150; ++it) {
        int rows = rng.uniform(1, 5), cols = rng.uniform(1, 5);
        Z a(static_cast<std::size_t>(rows), std::vector<mpz_class>(static_cast<std::size_t>(cols)));
        for (auto& row : a)
            for (auto& x : row) x = rng.uniform(-4, 4);
        SmithForm s = smith_form(a);
        // U A V = D, D diagonal with the divisibility chain
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) {
                mpz_class v = 0;
                for (int k = 0; k < rows; ++k)
                    for (int l = 0; l < cols; ++l) v += s.u[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] * a[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)] * s.v[static_cast<std::size_t>(l)][static_cast<std::size_t>(j)];
                CHECK(v == s.d[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
                if (i != j) CHECK(v == 0);
            }
        for (int i = 0; i + 1 < std::min(rows, cols); ++i) {
            const mpz_class& x = s.d[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)];
            const mpz_class& y = s.d[static_cast<std::size_t>(i + 1)][static_cast<std::size_t>(i + 1)];
            if (x != 0) CHECK(y % x == 0);
            else CHECK(y == 0);
        }
        std::vector<mpz_class> b(static_cast<std::size_t>(rows));
        for (auto& x : b) x = rng.uniform(-5, 5);
        auto res = solve_integer(a, b);
        if (res.solution) {
            for (int i = 0; i < rows; ++i) {
                mpz_class v = 0;
                for (int j = 0; j < cols; ++j) v += a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * (*res.solution)[static_cast<std::size_t>(j)];
                CHECK(v == b[static_cast<std::size_t>(i)]);
            }
        } else {
            mpz_class yb = 0;
            for (int i = 0; i < rows; ++i) yb += res.certificate[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(i)];
            for (int j = 0; j < cols; ++j) {
                mpz_class v = 0;
                for (int i = 0; i < rows; ++i) v += res.certificate[static_cast<std::size_t>(i)] * a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                if (res.modulus == 0) CHECK(v == 0);
                else CHECK(v % res.modulus == 0);
            }
            if (res.modulus == 0) CHECK(yb != 0);
            else CHECK(yb % res.modulus != 0);
        }
    }
}

TEST_CASE("gf2 solving") {
    Rng rng(10);
    for (int it = 0; it < 150; ++it) {
        int rows = rng.uniform(1, 6), cols = rng.uniform(1, 6);
        std::vector<std::vector<std::uint8_t>> a(static_cast<std::size_t>(rows), std::vector<std::uint8_t>(static_cast<std::size_t>(cols)));
        for (auto& row : a)
            for (auto& x : row) x = std::uint8_t(rng.uniform(0, 1));
        std::vector<std::uint8_t> b(static_cast<std::size_t>(rows));
        for (auto& x : b) x = std::uint8_t(rng.uniform(0, 1));
        auto res = solve_gf2(a, b);
        if (res.solution) {
            for (int i = 0; i < rows; ++i) {
                int v = 0;
                for (int j = 0; j < cols; ++j) v ^= a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] & (*res.solution)[static_cast<std::size_t>(j)];
                CHECK(v == b[static_cast<std::size_t>(i)]);
            }
        } else {
            int yb = 0;
            for (int i = 0; i < rows; ++i) yb ^= res.certificate[static_cast<std::size_t>(i)] & b[static_cast<std::size_t>(i)];
            CHECK(yb == 1);
            for (int j = 0; j < cols; ++j) {
                int v = 0;
                for (int i = 0; i < rows; ++i) v ^= res.certificate[static_cast<std::size_t>(i)] & a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                CHECK(v == 0);
            }
        }
    }
}
