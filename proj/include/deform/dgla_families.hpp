#pragma once

#include "deform/dgla.hpp"
#include "deform/random.hpp"

#include <functional>
#include <string>

namespace deform {

// Lie algebras concentrated in degree 0.
Dgla heisenberg();                     // [x,y] = z
Dgla sl2();                            // [h,e] = 2e, [h,f] = -2f, [e,f] = h
Dgla affine_line();                    // [x,y] = y
Dgla abelian_lie(int dim);
Dgla strictly_upper_triangular(int n);  // nilpotent of class n-1, basis E_ij (i<j) in row order

// L tensor <1, e> with |e| = 1, differential ad(m e).
Dgla dual_numbers_extension(const Dgla& lie, const Vec& m);
// L tensor <eps, 1, e> with |eps| = -1, |e| = 1, eps e = 0, differential ad(m e).
Dgla shifted_extension(const Dgla& lie, const Vec& m);
// Endomorphisms of Q v0 + Q v1 with v1 odd, graded commutator, differential [c E10, -].
Dgla gl11(const Rational& c);
// g^0 = <x>, g^1 = <a,b>, g^2 = <c>; quadratic Maurer-Cartan locus u r + v s + u v = 0.
Dgla quadric_family(const Rational& alpha, const Rational& r, const Rational& s);

// A DGLA together with a sampler of Maurer-Cartan elements over Q[t]/(t^order).
struct DglaInstance {
    std::string family;
    Dgla g;
    std::function<DglaElement(Rng&, int order)> random_mc;
};

// Random instance with at most 3 basis elements per degree, in a randomly changed basis.
DglaInstance random_dgla_instance(Rng& rng);

// Random element of degree `degree` with coefficients in the maximal ideal.
DglaElement random_element(const DglaModel& g, Rng& rng, int degree, int order, int bound = 2);

}  // namespace deform
