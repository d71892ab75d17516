#include "deform/random.hpp"

namespace deform {

int Rng::uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }

bool Rng::coin(double p) { return std::bernoulli_distribution(p)(engine_); }

Rational Rng::rational(int bound, int max_den) { return Rational(uniform(-bound, bound), uniform(1, max_den)); }

Rational Rng::nonzero_rational(int bound, int max_den) {
    int n = uniform(1, bound);
    return Rational(coin() ? n : -n, uniform(1, max_den));
}

RElement Rng::relement(int order, bool in_ideal, int bound) {
    RElement r(order);
    for (int i = in_ideal ? 1 : 0; i < order; ++i) r[i] = rational(bound);
    return r;
}

Matrix Rng::matrix(int rows, int cols, int bound) {
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = rational(bound);
    return m;
}

Matrix Rng::invertible(int n) {
    Matrix lower = Matrix::identity(n), upper = Matrix::identity(n), diag(n, n);
    for (int i = 0; i < n; ++i) {
        diag(i, i) = nonzero_rational(2, 1);
        for (int j = 0; j < i; ++j) {
            lower(i, j) = rational(2, 1);
            upper(j, i) = rational(2, 1);
        }
    }
    return lower * diag * upper;
}

}  // namespace deform
