#pragma once

#include "deform/artin.hpp"
#include "deform/linalg.hpp"

#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace deform {

// A finite-dimensional graded Lie algebra with differential, seen through its
// action on coordinate vectors over Q. Implementations accumulate into `out`.
class DglaModel {
public:
    virtual ~DglaModel() = default;
    virtual int min_degree() const = 0;
    virtual int max_degree() const = 0;
    virtual int dim(int degree) const = 0;
    // out += [a, b]; a has degree da, b has degree db, out has degree da + db.
    virtual void bracket_into(int da, std::span<const Rational> a, int db, std::span<const Rational> b,
                              std::span<Rational> out) const = 0;
    // out += d a; out has degree + 1.
    virtual void differential_into(int degree, std::span<const Rational> a, std::span<Rational> out) const = 0;

    int dim_or_zero(int degree) const {
        return degree < min_degree() || degree > max_degree() ? 0 : dim(degree);
    }
};

// Element of g^degree tensored with Q[t]/(t^N), stored order by order:
// entries [r*dim, (r+1)*dim) hold the coefficient of t^r.
class DglaElement {
public:
    DglaElement() = default;
    DglaElement(int degree, int dim, int order)
        : degree_(degree), dim_(dim), order_(order), data_(static_cast<std::size_t>(dim) * static_cast<std::size_t>(order)) {}
    static DglaElement zero(const DglaModel& g, int degree, int order) {
        return {degree, g.dim_or_zero(degree), order};
    }

    int degree() const { return degree_; }
    int dim() const { return dim_; }
    int order() const { return order_; }
    std::span<Rational> layer(int r) { return {data_.data() + static_cast<std::size_t>(r) * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)}; }
    std::span<const Rational> layer(int r) const {
        return {data_.data() + static_cast<std::size_t>(r) * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
    }
    std::span<const Rational> raw() const { return data_; }
    std::span<Rational> raw() { return data_; }

    RElement coefficient(int basis_index) const;
    void set_coefficient(int basis_index, const RElement& value);

    bool is_zero() const { return deform::is_zero(data_); }
    bool in_maximal_ideal() const { return deform::is_zero(layer(0)); }
    int valuation() const;  // smallest r with a nonzero layer, or order() when zero

    DglaElement& operator+=(const DglaElement& rhs);
    DglaElement& operator-=(const DglaElement& rhs);
    DglaElement& operator*=(const Rational& s);
    friend DglaElement operator+(DglaElement a, const DglaElement& b) { return a += b; }
    friend DglaElement operator-(DglaElement a, const DglaElement& b) { return a -= b; }
    friend DglaElement operator*(const Rational& s, DglaElement a) { return a *= s; }
    DglaElement operator-() const;
    // Multiplication by t^k, dropping what falls past the truncation.
    DglaElement shifted(int k) const;
    // Keep only the layers below `order`.
    DglaElement truncated(int order) const;

    friend bool operator==(const DglaElement&, const DglaElement&) = default;

private:
    void check_compatible(const DglaElement& rhs) const;
    int degree_ = 0;
    int dim_ = 0;
    int order_ = 1;
    std::vector<Rational> data_;
};

// R-bilinear extensions of the bracket and R-linear differential.
DglaElement bracket(const DglaModel& g, const DglaElement& a, const DglaElement& b);
DglaElement differential(const DglaModel& g, const DglaElement& a);

struct GaugeTransform {
    DglaElement log;  // degree 0, coefficients in the maximal ideal
};

struct TwoMorphismElt {
    DglaElement base_mc;  // the Maurer-Cartan element twisting the bracket
    DglaElement log;      // degree -1, coefficients in the maximal ideal
};

using BracketFn = std::function<DglaElement(const DglaElement&, const DglaElement&)>;

DglaElement mc_residual(const DglaModel& g, const DglaElement& gamma);
bool is_mc(const DglaModel& g, const DglaElement& gamma);

// exp(X) acting on a Maurer-Cartan element. Throws if gamma is not MC unless check is false.
DglaElement gauge_act(const DglaModel& g, const GaugeTransform& x, const DglaElement& gamma, bool check = true);

// e^{ad X} y
DglaElement ad_exp(const DglaModel& g, const DglaElement& x, const DglaElement& y);

// d + ad gamma
DglaElement twisted_differential(const DglaModel& g, const DglaElement& gamma, const DglaElement& a);

bool check_conjugation(const DglaModel& g, const GaugeTransform& x, const DglaElement& gamma1,
                       const DglaElement& gamma2);

// [a, db + [gamma, b]] on degree -1 elements.
DglaElement twisted_bracket(const DglaModel& g, const DglaElement& gamma, const DglaElement& a,
                            const DglaElement& b);

// log(exp X exp Y) by the Dynkin series for an arbitrary Lie bracket.
DglaElement bch(const DglaElement& x, const DglaElement& y, const BracketFn& br);
DglaElement bch_plain(const DglaModel& g, const DglaElement& x, const DglaElement& y);
DglaElement bch_twisted(const DglaModel& g, const DglaElement& gamma, const DglaElement& x, const DglaElement& y);

GaugeTransform compose_gauge(const DglaModel& g, const GaugeTransform& outer, const GaugeTransform& inner);
TwoMorphismElt vertical_compose(const DglaModel& g, const TwoMorphismElt& outer, const TwoMorphismElt& inner);
GaugeTransform two_morphism_act(const DglaModel& g, const TwoMorphismElt& t, const GaugeTransform& x,
                                const DglaElement& target_mc);
// t23 * t12 where t23 starts at the 1-morphism x23: gamma2 -> gamma3.
TwoMorphismElt horizontal_compose(const DglaModel& g, const TwoMorphismElt& t23, const TwoMorphismElt& t12,
                                  const GaugeTransform& x23);

// Dynkin coefficient of a word over {X, Y} (bit i set means letter i is Y).
Rational dynkin_coefficient(unsigned word, int length);

// Concrete DGLA given by structure constants.
struct BracketConstant {
    int i = 0, j = 0, k = 0, deg_a = 0, deg_b = 0;
    Rational c;
};

class Dgla final : public DglaModel {
public:
    Dgla() = default;
    // Dimensions by degree; missing degrees between min and max are zero.
    explicit Dgla(std::map<int, int> dims);
    Dgla(std::initializer_list<std::pair<const int, int>> dims) : Dgla(std::map<int, int>(dims)) {}

    void set_differential(int degree, Matrix block);  // block: dim(degree+1) x dim(degree)
    void add_bracket(const BracketConstant& b);
    // Adds c at (i, j) and the graded-antisymmetric partner at (j, i).
    void add_bracket_antisym(int deg_a, int i, int deg_b, int j, int k, const Rational& c);

    int min_degree() const override { return min_; }
    int max_degree() const override { return max_; }
    int dim(int degree) const override;
    void bracket_into(int da, std::span<const Rational> a, int db, std::span<const Rational> b,
                      std::span<Rational> out) const override;
    void differential_into(int degree, std::span<const Rational> a, std::span<Rational> out) const override;

    const std::map<int, int>& dims() const { return dims_; }
    const std::map<int, Matrix>& differential_blocks() const { return diff_; }
    std::vector<BracketConstant> bracket_constants() const;

    // Same algebra after the basis change e'_j = sum_i P[i][j] e_i in each degree.
    Dgla change_basis(const std::map<int, Matrix>& p) const;

private:
    std::map<int, int> dims_;
    int min_ = 0, max_ = -1;
    std::map<int, Matrix> diff_;
    std::map<std::pair<int, int>, std::vector<BracketConstant>> brackets_;
};

// Materialized structure constants of any model (for reports and basis changes).
Dgla materialize(const DglaModel& g);

std::vector<Violation> validate_dgla(const DglaModel& g);

// Basis of ker(d: g^1 -> g^2) / im(d: g^0 -> g^1), as representatives in g^1.
std::vector<Vec> enumerate_first_order_classes(const DglaModel& g);
// Same for any degree.
std::vector<Vec> cohomology_basis(const DglaModel& g, int degree);
Matrix differential_matrix(const DglaModel& g, int degree);

}  // namespace deform
