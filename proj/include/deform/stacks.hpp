#pragma once

#include "deform/cosimplicial_dgla.hpp"
#include "deform/descent.hpp"
#include "deform/hochschild.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace deform {

// A G-stack over G tensor m, m = tQ[t]/(t^N).
// gamma1 is the log of a gauge transformation in G^1 from d0 gamma0 to d1 gamma0;
// gamma2 is the log of a 2-morphism in G^2 from d2 gamma1 o d0 gamma1 to d1 gamma1,
// twisted by gamma0 at vertex 0.
struct GStack {
    DglaElement gamma0;  // level 0, degree 1
    DglaElement gamma1;  // level 1, degree 0
    DglaElement gamma2;  // level 2, degree -1

    int order() const { return gamma0.order(); }
    friend bool operator==(const GStack&, const GStack&) = default;
};

// j1: gauge in G^0 from source gamma0 to target gamma0.
// j2: 2-morphism in G^1 from target.gamma1 o d0 j1 to d1 j1 o source.gamma1.
struct StackOneMorphism {
    DglaElement j1;  // level 0, degree 0
    DglaElement j2;  // level 1, degree -1
    friend bool operator==(const StackOneMorphism&, const StackOneMorphism&) = default;
};

// 2-morphism in G^0 between the j1 parts of two parallel 1-morphisms.
struct StackTwoMorphism {
    DglaElement phi;  // level 0, degree -1
    friend bool operator==(const StackTwoMorphism&, const StackTwoMorphism&) = default;
};

GStack trivial_gstack(const CosimplicialDgla& g, int order);
// gamma0 with gamma1 = gamma2 = 0; strictness is not checked.
GStack strict_gstack(const CosimplicialDgla& g, const DglaElement& gamma0);
bool is_strict(const CosimplicialDgla& g, const GStack& s);

// Needs levels up to 3.
std::vector<Violation> validate_gstack(const CosimplicialDgla& g, const GStack& s);
std::vector<Violation> validate_one_morphism(const CosimplicialDgla& g, const GStack& source, const GStack& target,
                                             const StackOneMorphism& j);
std::vector<Violation> validate_two_morphism(const CosimplicialDgla& g, const GStack& target, const StackOneMorphism& from,
                                             const StackOneMorphism& to, const StackTwoMorphism& phi);

StackOneMorphism identity_one_morphism(const CosimplicialDgla& g, const GStack& s);
// d o j for j: s1 -> s2 and d: s2 -> s3; the composite is checked against its endpoints.
StackOneMorphism compose_1morphisms(const CosimplicialDgla& g, const GStack& s1, const GStack& s2, const GStack& s3,
                                    const StackOneMorphism& j, const StackOneMorphism& d);
// The unique stack u making (j1, j2) a 1-morphism s -> u.
GStack transport(const CosimplicialDgla& g, const GStack& s, const DglaElement& j1, const DglaElement& j2);

StackTwoMorphism identity_two_morphism(const CosimplicialDgla& g, int order);
// The 1-morphism k making phi: j -> k a 2-morphism, for j into target.
StackOneMorphism two_morphism_target(const CosimplicialDgla& g, const GStack& target, const StackOneMorphism& j,
                                     const StackTwoMorphism& phi);
// outer o inner for inner: a -> b, outer: b -> c, all 1-morphisms into target.
StackTwoMorphism compose_2morphisms(const CosimplicialDgla& g, const GStack& target, const StackTwoMorphism& outer,
                                    const StackTwoMorphism& inner);

// Random element of G^level in the joint kernel of the codegeneracies, coefficients in the maximal ideal.
DglaElement random_normalized(const CosimplicialDgla& g, int level, int degree, int order, Rng& rng);
// A valid stack obtained from the trivial one along a random 1-morphism.
struct RandomStack {
    GStack stack;
    StackOneMorphism from_trivial;
};
RandomStack random_gstack(const CosimplicialDgla& g, int order, Rng& rng);

// Raised when a cosimplicial equation has no normalized solution.
struct CosimplicialSolveError : std::runtime_error {
    CosimplicialSolveError(const std::string& what, Vec certificate)
        : std::runtime_error(what), certificate(std::move(certificate)) {}
    Vec certificate;  // y with y^T [delta; codegeneracies] = 0 and y^T (target, 0) != 0
};

// Normalized x at level n with delta x = target at level n + 1, free variables set to zero.
// Matrices are built once per (level, degree).
class CosimplicialSolver {
public:
    explicit CosimplicialSolver(const CosimplicialDgla& g) : g_(g) {}
    Vec solve(int n, int degree, std::span<const Rational> target) const;
    // delta: level n -> n + 1 and the stacked codegeneracies level n -> n - 1.
    const Matrix& system(int n, int degree) const;

private:
    const CosimplicialDgla& g_;
    mutable std::map<std::pair<int, int>, Matrix> systems_;
};

Vec cosimplicial_solve(const CosimplicialDgla& g, int n, int degree, std::span<const Rational> target);
// H^p of the cosimplicial space G^{*, degree} for p <= p_max; levels up to p_max + 1.
std::vector<int> cosimplicial_cohomology(const CosimplicialDgla& g, int degree, int p_max);

struct StrictifyStep {
    int phase = 1;  // 1 kills gamma2, 2 kills gamma1
    int order = 0;  // power of t being removed
    Rational residual_l1;  // sum of |entries| of the removed layer
    int support = 0;       // nonzero entries of the solved cochain
};

struct StrictifyResult {
    GStack strict;
    StackOneMorphism morphism;  // input -> strict
    std::vector<StrictifyStep> trace;
    int rounds(int phase) const;
};

StrictifyResult strictify(const CosimplicialDgla& g, const GStack& s);

// The equalizer ker(d0 - d1: G^0 -> G^1) as a DGLA, in a basis of kernel vectors.
class EqualizerDgla final : public DglaModel {
public:
    explicit EqualizerDgla(const CosimplicialDgla& g);
    int min_degree() const override { return min_; }
    int max_degree() const override { return max_; }
    int dim(int degree) const override;
    void bracket_into(int da, std::span<const Rational> a, int db, std::span<const Rational> b,
                      std::span<Rational> out) const override;
    void differential_into(int degree, std::span<const Rational> a, std::span<Rational> out) const override;

    Vec embed(int degree, std::span<const Rational> coords) const;
    // Throws when v is not in the kernel.
    Vec coordinates(int degree, std::span<const Rational> v) const;
    DglaElement embed(const DglaElement& x) const;
    DglaElement coordinates(const DglaElement& x) const;
    const DglaModel& ambient() const { return ambient_; }

private:
    struct Block {
        Matrix basis;            // ambient x k
        std::vector<int> pivots;  // k rows of basis forming an invertible square
        Matrix pivot_inverse;
    };
    const Block& block(int degree) const;
    const DglaModel& ambient_;
    int min_ = 0, max_ = -1;
    std::map<int, Block> blocks_;
};

// gamma0 of a strict stack as an MC element of the equalizer.
DglaElement strict_to_mc(const CosimplicialDgla& g, const EqualizerDgla& eq, const GStack& s);
GStack mc_to_strict(const CosimplicialDgla& g, const EqualizerDgla& eq, const DglaElement& x);

// Deformation of a descent datum by a compatible family of star products mu^p,
// p <= D_cap, stored as one element of G^0.
struct DeformationDatum {
    DescentDatum datum;
    DglaElement star;  // level 0, degree 1
};

// Strict stack gamma0 = star; throws naming the arrow [p] -> [q] where compatibility fails.
GStack star_to_gstack(const CosimplicialG& g, const DeformationDatum& d);
DeformationDatum gstack_to_star(const CosimplicialG& g, const GStack& s);
// The same correction tensors at every cell and path; needs all twists equal to 1.
DeformationDatum constant_deformation(const CosimplicialG& g, const StarProduct& star);
// The component of gamma0 on the object [0], cell c, as an element of the Hochschild DGLA of the fiber.
DglaElement object_zero_component(const CosimplicialG& g, const DglaElement& gamma0, int cell);

struct FirstOrderClasses {
    int count = 0;
    std::vector<Vec> representatives;  // in G^0 coordinates, degree 1
};
// H^1 of the equalizer: isomorphism classes of deformations over Q[t]/(t^2).
FirstOrderClasses classify_first_order(const CosimplicialDgla& g);
// Layer r of the MC residual of x; the obstruction to extending x past order r.
Vec mc_obstruction(const DglaModel& g, const DglaElement& x, int r);
// H^n of Tot(G^{p,q}) for n <= n_max, computed by sparse ranks and independent of the equalizer.
std::vector<int> total_cohomology(const CosimplicialDgla& g, int n_max);

}  // namespace deform
