#pragma once

#include "deform/hochschild.hpp"
#include "deform/random.hpp"

namespace deform {

// Subalgebra of 3x3 matrices of dimension <= max_dim, in a random basis with e0 = 1.
FinAlgebra random_algebra(Rng& rng, int max_dim);

// Random cochain of the given arity with coefficients in the maximal ideal.
DglaElement random_cochain(const HochschildDgla& g, Rng& rng, int arity, int order, int bound = 2);

// Random gauge transform: phi = exp(X) for a random arity-1 cochain X.
GaugeTransform random_gauge(const HochschildDgla& g, Rng& rng, int order);

// Star product on g.algebra() over Q[t]/(t^order). Associative instances are gauge
// transforms of a known deformation; broken ones add t^r c with dc != 0.
StarProduct planted_star_product(const HochschildDgla& g, Rng& rng, int order, bool associative);

}  // namespace deform
