#pragma once

#include "deform/dgla.hpp"

#include <optional>
#include <string>
#include <vector>

namespace deform {

// Finite-dimensional unital associative algebra; basis element 0 is the unit.
// mult[(i * dim + j) * dim + k] is the coefficient of e_k in e_i e_j.
struct FinAlgebra {
    int dim = 0;
    Vec unit;
    Vec mult;

    const Rational& m(int i, int j, int k) const {
        return mult[static_cast<std::size_t>((i * dim + j) * dim + k)];
    }
    Vec multiply(std::span<const Rational> a, std::span<const Rational> b) const;
};

FinAlgebra algebra_q();
FinAlgebra algebra_q_times_q();      // e0 = (1,1), e1 = (1,0)
FinAlgebra algebra_dual_numbers();   // Q[x]/(x^2), basis 1, x
FinAlgebra algebra_matrices2();      // M_2(Q), basis I, E11, E12, E21
FinAlgebra algebra_from_matrices(const std::vector<Matrix>& basis);  // basis[0] must be the identity

// Associativity and unit violations on basis triples.
std::vector<Violation> validate_algebra(const FinAlgebra& a);

int ipow(int base, int exp);

// C^n(A), shifted so that arity n sits in degree n - 1; arities 0..arity_cap.
class HochschildDgla final : public DglaModel {
public:
    HochschildDgla(FinAlgebra a, int arity_cap);
    int min_degree() const override { return -1; }
    int max_degree() const override { return arity_cap_ - 1; }
    int dim(int degree) const override;
    void bracket_into(int da, std::span<const Rational> a, int db, std::span<const Rational> b,
                      std::span<Rational> out) const override;
    // delta D = [m, D]
    void differential_into(int degree, std::span<const Rational> a, std::span<Rational> out) const override;

    const FinAlgebra& algebra() const { return alg_; }
    int arity_cap() const { return arity_cap_; }
    // The product as an arity-2 cochain over Q.
    const Vec& product_cochain() const { return alg_.mult; }

private:
    FinAlgebra alg_;
    int arity_cap_;
};

// out += scale * (D o_pos E), pos is the 0-based slot of D receiving E.
// Parallel over the leading indices; the serial variant decodes every multi-index.
void compose_at(int dim, int n1, std::span<const Rational> d, int n2, std::span<const Rational> e, int pos,
                const Rational& scale, std::span<Rational> out);
void compose_at_serial(int dim, int n1, std::span<const Rational> d, int n2, std::span<const Rational> e, int pos,
                       const Rational& scale, std::span<Rational> out);
// out += [D1, D2] (Gerstenhaber bracket of arity n1 and n2 cochains).
void gerstenhaber_into(int dim, int n1, std::span<const Rational> d1, int n2, std::span<const Rational> d2,
                       std::span<Rational> out, bool parallel = true);

// Hochschild cochains over Q[t]/(t^N) are DGLA elements of degree arity - 1.
DglaElement hochschild_diff(const HochschildDgla& g, const DglaElement& d);
DglaElement gerstenhaber_bracket(const HochschildDgla& g, const DglaElement& d1, const DglaElement& d2);
DglaElement normalize_project(const HochschildDgla& g, const DglaElement& d);
bool is_normalized(const HochschildDgla& g, const DglaElement& d);
// Entry of D(e_{idx...}) along e_k; idx has length arity.
std::size_t cochain_offset(int dim, std::span<const int> idx, int k);

// Standard Hochschild coboundary on Q-valued cochains, written out term by term.
Vec standard_coboundary(const FinAlgebra& a, int arity, std::span<const Rational> d);

struct StarProduct {
    FinAlgebra algebra;
    int order = 1;               // N
    std::vector<Vec> corrections;  // B_1 .. B_{N-1}, arity-2 tensors
};

struct AssociativityWitness {
    int i = 0, j = 0, k = 0;
    RElement defect{1};
};
// Direct expansion of (a*b)*c - a*(b*c) on basis triples mod t^N; empty when associative.
std::optional<AssociativityWitness> associativity_defect(const StarProduct& s);

DglaElement mu_from_star(const HochschildDgla& g, const StarProduct& s);
StarProduct star_from_mc(const HochschildDgla& g, const DglaElement& gamma);

// phi = Id + sum_r t^r phi_r given by its layers phi_r (d x d matrices, phi[0] = Id).
struct AlgebraMorphism {
    int order = 1;
    std::vector<Matrix> layers;
};
GaugeTransform def_morphism_to_gauge(const HochschildDgla& g, const AlgebraMorphism& phi);
// b = 1 + (element of A tensor m_R), as a degree -1 element whose exponential in the twisted group realizes it.
TwoMorphismElt def_2morphism_to_two(const HochschildDgla& g, const StarProduct& target, const DglaElement& b);
// Product of the star product on A tensor R.
DglaElement star_multiply(const StarProduct& s, const DglaElement& a, const DglaElement& b);

struct HochschildDims {
    std::vector<int> full;        // HH^n for n = 0..n_max
    std::vector<int> normalized;  // same from the normalized complex
};
HochschildDims hochschild_cohomology(const FinAlgebra& a, int n_max);

}  // namespace deform
