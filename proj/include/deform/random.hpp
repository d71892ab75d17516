#pragma once

#include "deform/artin.hpp"
#include "deform/linalg.hpp"

#include <cstdint>
#include <random>

namespace deform {

// Seeded generator for property tests and randomized fixtures.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    int uniform(int lo, int hi);  // inclusive
    bool coin(double p = 0.5);
    // Small rational: numerator in [-bound, bound], denominator in [1, max_den].
    Rational rational(int bound = 3, int max_den = 2);
    Rational nonzero_rational(int bound = 3, int max_den = 2);
    // Element of Q[t]/(t^order); the constant term is zero when in_ideal is set.
    RElement relement(int order, bool in_ideal, int bound = 3);
    Matrix matrix(int rows, int cols, int bound = 3);
    // Random invertible matrix: a product of unipotent triangular factors and a diagonal.
    Matrix invertible(int n);
    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

}  // namespace deform
