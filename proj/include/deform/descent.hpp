#pragma once

#include "deform/cosimplicial_dgla.hpp"
#include "deform/hochschild.hpp"
#include "deform/simplicial.hpp"

#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace deform {

// Finite poset with the Alexandrov topology: open sets are down-sets.
class FiniteSpace {
public:
    FiniteSpace() = default;
    // `less` lists generating relations x < y; the order is their reflexive-transitive closure.
    FiniteSpace(std::vector<std::string> names, const std::vector<std::pair<std::string, std::string>>& less);

    static FiniteSpace discrete(int n);
    static FiniteSpace pseudocircle();                      // a, b < c, d
    // Two new points above everything.
    static FiniteSpace suspension(const FiniteSpace& x, const std::string& north = "e", const std::string& south = "f");
    static FiniteSpace sphere_model();                      // suspension of the pseudocircle
    static FiniteSpace tetrahedron_boundary();              // proper faces of a 3-simplex, larger faces lower

    int size() const { return static_cast<int>(names_.size()); }
    const std::string& name(int x) const { return names_[static_cast<std::size_t>(x)]; }
    const std::vector<std::string>& names() const { return names_; }
    int index(const std::string& name) const;
    bool leq(int x, int y) const { return leq_[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)] != 0; }
    std::vector<int> down_set(int x) const;
    std::vector<int> maximal_points() const;
    // Pairs x < y with nothing strictly between.
    std::vector<std::pair<int, int>> covering_relations() const;
    bool is_open(std::span<const int> set) const;
    // Connected components of a subspace, each sorted, ordered by smallest point.
    std::vector<std::vector<int>> components(std::span<const int> set) const;

private:
    std::vector<std::string> names_;
    std::vector<std::vector<char>> leq_;
};

struct Cover {
    FiniteSpace space;
    std::vector<std::vector<int>> members;  // sorted point lists

    int size() const { return static_cast<int>(members.size()); }
    // U_{i0} n ... n U_{ip}
    std::vector<int> intersection(std::span<const int> indices) const;
};

std::vector<Violation> validate_cover(const Cover& c);
// {U_x : x maximal}
Cover maximal_cover(const FiniteSpace& x);
Cover pseudocircle_cover();
// Vertex stars on the tetrahedron boundary; the nerve is the boundary of a 3-simplex.
Cover sphere_cover();

struct NervePoint {
    int point = 0;
    std::vector<int> indices;

    int level() const { return static_cast<int>(indices.size()) - 1; }
    friend bool operator==(const NervePoint&, const NervePoint&) = default;
    friend auto operator<=>(const NervePoint&, const NervePoint&) = default;
};

// "x|i0,i1,..."
std::string nerve_key(const FiniteSpace& x, const NervePoint& pt);
NervePoint parse_nerve_key(const FiniteSpace& x, const std::string& key);
// All (x; i0..ip) with x in U_{i0..ip}, ordered by point, then indices.
std::vector<NervePoint> build_nerve(const Cover& c, int p);
// (x; I) -> (x; I o f) for f: [p] -> [q].
NervePoint nerve_pullback(const MonotoneMap& f, const NervePoint& pt);

// A connected component of some U_I; locally constant data have one value per cell.
struct NerveCell {
    std::vector<int> indices;
    std::vector<int> points;
};

// Cells of each nerve level, built on demand and kept.
class Nerve {
public:
    explicit Nerve(Cover c);
    Nerve(const Nerve&) = delete;
    Nerve& operator=(const Nerve&) = delete;

    const Cover& cover() const { return cover_; }
    const std::vector<NerveCell>& cells(int p) const;
    int cell_of(const NervePoint& pt) const;
    // Cell map N_q -> N_p along f: [p] -> [q]; entry c is the image of level-q cell c.
    const std::vector<int>& pullback_table(const MonotoneMap& f) const;
    int pull_cell(const MonotoneMap& f, int cell) const { return pullback_table(f)[static_cast<std::size_t>(cell)]; }

private:
    struct Level {
        std::vector<NerveCell> cells;
        std::vector<std::vector<int>> cell_of;  // [index tuple][point] -> cell or -1
    };
    const Level& level(int p) const;
    static std::size_t tuple_index(std::span<const int> indices, int m);

    Cover cover_;
    mutable std::recursive_mutex mutex_;
    mutable std::map<int, Level> levels_;
    mutable std::map<MonotoneMap, std::vector<int>> pullbacks_;
};

// Sheaf on a finite space: F(U_x) per point and restrictions F(U_y) -> F(U_x) for x < y.
struct SheafData {
    std::vector<int> stalk_dims;
    std::map<std::pair<int, int>, Matrix> restrictions;
};

SheafData constant_sheaf(const FiniteSpace& x, int dim = 1);
std::vector<Violation> validate_sheaf(const FiniteSpace& x, const SheafData& f);
// Basis (as columns) of the compatible families inside the product of F(U_x), x in `open`.
Matrix sections(const FiniteSpace& x, const SheafData& f, std::span<const int> open);
// Differential of the ordered Cech complex at level p, written on the product of stalks over the U_I.
Matrix cech_differential(const Cover& c, const SheafData& f, int p);
// Dimensions of H^0..H^n_max.
std::vector<int> cech_cohomology(const Cover& c, const SheafData& f, int n_max);

using NerveFunction = std::map<NervePoint, RElement>;

// The line bundles A_01 are stored trivialized: a01 is the frame, a012 the pairing in the
// standard basis, and the unit is a012(x; i, i, i)^{-1}.
struct DescentDatum {
    Cover cover;
    int order = 1;
    FinAlgebra fiber = algebra_q();
    NerveFunction a01;
    NerveFunction a012;
    NerveFunction unit;
};

NerveFunction constant_function(const Cover& c, int level, const RElement& value);
DescentDatum make_descent_datum(Cover c, int order, NerveFunction a01, NerveFunction a012,
                                FinAlgebra fiber = algebra_q());
DescentDatum trivial_datum(Cover c, int order = 1, FinAlgebra fiber = algebra_q());
// (d phi)(x; i0..i_{p+1}) = prod_i phi(x; face i)^{(-1)^i} for phi on nerve level p.
NerveFunction multiplicative_coboundary(const Cover& c, const NerveFunction& phi, int level);
// -1 where the three indices are a permutation of `charts`, 1 elsewhere.
NerveFunction sign_cocycle(const Cover& c, int order, std::array<int, 3> charts);
std::vector<Violation> validate_descent_datum(const DescentDatum& d);
// The pairing in the a01 frame: a012 * d(a01).
NerveFunction effective_cocycle(const DescentDatum& d);

struct ClassObstruction {
    std::string part;     // "sign", "prime p" or "log t^r"
    Vec functional;       // y over level-2 cells with y^T d = 0 (mod modulus)
    Rational modulus;     // 2 for the sign part, 0 otherwise
    Rational value;       // y^T c, nonzero (mod modulus)
};

struct TwistedFormClass {
    bool trivial = false;
    NerveFunction cocycle;                        // the effective cocycle
    std::optional<NerveFunction> trivialization;  // phi on level 1 with d phi = cocycle
    std::vector<ClassObstruction> obstructions;
};

// Class in H^2(U; R^x), split as R^x = {+-1} x (primes) x (1 + m).
TwistedFormClass twisted_form_class(const DescentDatum& d);

// Pairing values on one level-p cell: tw(a, b, c) = a012(x; K_a, K_b, K_c).
class CellTwist {
public:
    CellTwist() = default;
    CellTwist(int p, std::vector<Rational> values) : p_(p), values_(std::move(values)) {}
    static CellTwist trivial(int p);
    static CellTwist of(const DescentDatum& d, std::span<const int> indices, int point);

    int p() const { return p_; }
    const Rational& operator()(int a, int b, int c) const {
        return values_[static_cast<std::size_t>((a * (p_ + 1) + b) * (p_ + 1) + c)];
    }
    friend bool operator==(const CellTwist&, const CellTwist&) = default;
    friend auto operator<=>(const CellTwist&, const CellTwist&) = default;

private:
    int p_ = 0;
    std::vector<Rational> values_;
};

// Mat^p on each level-p cell. Basis (a * (p + 1) + b) * d + r is e_ab tensor the r-th fiber vector.
struct MatrixAlgebraP {
    int p = 0;
    FinAlgebra fiber;
    std::vector<NerveCell> cells;
    std::vector<CellTwist> twists;

    int dim() const { return (p + 1) * (p + 1) * fiber.dim; }
    Vec multiplication(int cell) const;
    Vec unit(int cell) const;
};

Vec matrix_multiplication(const CellTwist& tw, const FinAlgebra& fiber);
Vec matrix_unit(const CellTwist& tw, const FinAlgebra& fiber);
// Requires order 1: the algebras are over Q and deformations live in the coefficients.
MatrixAlgebraP matrix_algebra(const DescentDatum& d, const Nerve& nerve, int p);
std::vector<Violation> validate_matrix_algebra(const MatrixAlgebraP& a);

// f^#Mat^q for f: [p] -> [q]: on each level-q cell the blocks e_{f(a) f(b)}, in the basis of Mat^p,
// with the canonical isomorphism from Mat^p on the pulled-back cell.
struct RestrictedAlgebra {
    MonotoneMap f;
    std::vector<Vec> multiplication;  // per level-q cell
    std::vector<int> source_cell;     // the pulled-back level-p cell
    std::vector<Matrix> iso;          // Mat^p(source_cell) -> f^#Mat^q(cell)
};
RestrictedAlgebra comb_restrict_algebra(const MonotoneMap& f, const MatrixAlgebraP& source,
                                        const MatrixAlgebraP& target, const Nerve& nerve);

// Local cochains on Mat^p tensor J of dimension d: an arity-k cochain has one J-tensor
// (d^{k+1} entries) per path P in [p]^{k+1}, the path read as a number in base p + 1.
std::size_t local_dim(int p, int d, int arity);
std::vector<int> path_of(int p, int arity, std::size_t index);
std::size_t path_index(int p, std::span<const int> path);
// s(P) = |Im P| - 1
int path_filtration(std::span<const int> path);

// out += [a, b] computed path by path.
void local_bracket_into(int p, int d, int n1, std::span<const Rational> a, int n2, std::span<const Rational> b,
                        std::span<Rational> out);
// The product of Mat^p as a local arity-2 cochain.
Vec local_product(const CellTwist& tw, const FinAlgebra& fiber);
// The same cochain as a plain Hochschild cochain of Mat^p tensor J, and back.
Vec embed_local(int p, int d, int arity, std::span<const Rational> x);
// Throws when x has a component outside the composable paths.
Vec extract_local(int p, int d, int arity, std::span<const Rational> x);
// (f^# x)^P = x^{f o P} for f: [p] -> [q] and x local on Mat^q.
Vec comb_restrict_cochain(const MonotoneMap& f, int d, int arity, std::span<const Rational> x);
// Components with s(P) >= s, or with s(P) == s when `graded`.
Vec filtration_project(int p, int d, int arity, std::span<const Rational> x, int s, bool graded = false);
// cotr(D)(a_1 j_1, ..., a_n j_n) = a_1...a_n D(j_1, ..., j_n) for D normalized on a commutative fiber.
Vec cotrace(const CellTwist& tw, const FinAlgebra& fiber, int arity, std::span<const Rational> d);

// Product over blocks of local Hochschild DGLAs; one block per (simplex, cell).
class LocalDglaProduct final : public DglaModel {
public:
    LocalDglaProduct(FinAlgebra fiber, int arity_cap, std::vector<CellTwist> twists);
    int min_degree() const override { return -1; }
    int max_degree() const override { return arity_cap_ - 1; }
    int dim(int degree) const override;
    void bracket_into(int da, std::span<const Rational> a, int db, std::span<const Rational> b,
                      std::span<Rational> out) const override;
    void differential_into(int degree, std::span<const Rational> a, std::span<Rational> out) const override;

    int blocks() const { return static_cast<int>(twists_.size()); }
    const CellTwist& twist(int block) const { return twists_[static_cast<std::size_t>(block)]; }
    std::size_t block_offset(int degree, int block) const;
    std::size_t block_dim(int degree, int block) const;
    const FinAlgebra& fiber() const { return fiber_; }
    int arity_cap() const { return arity_cap_; }

private:
    FinAlgebra fiber_;
    int arity_cap_;
    std::vector<CellTwist> twists_;
    std::vector<std::vector<std::size_t>> offsets_;  // [degree + 1][block], one past the end included
    std::map<CellTwist, Vec> products_;
};

struct GCaps {
    int n_cap = 3;      // cosimplicial levels 0..n_cap
    int d_cap = 1;      // simplices with objects <= d_cap
    int arity_cap = 3;  // Hochschild arities 0..arity_cap
};

// G(A)^n = product over n-simplices lambda of sections over N_{lambda(n)} of local cochains
// on Mat^{lambda(0)}, truncated to objects <= d_cap.
class CosimplicialG final : public CosimplicialDgla {
public:
    CosimplicialG(DescentDatum datum, GCaps caps);

    int top() const override { return caps_.n_cap; }
    const DglaModel& level(int n) const override { return product(n); }
    const LocalDglaProduct& product(int n) const;
    Vec push(const MonotoneMap& f, int degree, std::span<const Rational> x) const override;
    std::string locate(int n, int degree, int coordinate) const override;

    const std::vector<DeltaSimplex>& simplices(int n) const;
    int simplex_index(const DeltaSimplex& lambda) const;
    // Blocks of level n belonging to simplex s are [first_block(n, s), first_block(n, s + 1)).
    int first_block(int n, int s) const;
    // The factor G^lambda alone.
    LocalDglaProduct factor(const DeltaSimplex& lambda) const;

    const DescentDatum& datum() const { return datum_; }
    const Nerve& nerve() const { return *nerve_; }
    std::shared_ptr<const Nerve> shared_nerve() const { return nerve_; }
    const GCaps& caps() const { return caps_; }

private:
    struct LevelData {
        std::vector<DeltaSimplex> simplices;
        std::map<std::vector<int>, int> index;
        std::vector<int> first_block;
        std::unique_ptr<LocalDglaProduct> model;
    };
    const LevelData& level_data(int n) const;
    std::vector<CellTwist> twists_of(const DeltaSimplex& lambda) const;
    const std::vector<std::size_t>& gather(const MonotoneMap& f, int degree) const;

    DescentDatum datum_;
    GCaps caps_;
    std::shared_ptr<const Nerve> nerve_;
    mutable std::recursive_mutex mutex_;
    mutable std::map<int, LevelData> levels_;
    mutable std::map<std::pair<MonotoneMap, int>, std::vector<std::size_t>> gathers_;
};

// Entries of a component at lambda: cells of level lambda(n) times local cochains on Mat^{lambda(0)}.
std::size_t g_component_dim(const Nerve& nerve, int d, const DeltaSimplex& lambda, int arity);
// For f: [m] -> [n], entry j of (f_* x)_lambda is entry result[j] of x at lambda o f.
std::vector<std::size_t> transport_indices(const Nerve& nerve, int d, int arity, const DeltaSimplex& lambda,
                                           const MonotoneMap& f);

// An element of the fixed-arity cosimplicial space G^{n, arity}, evaluated per simplex on demand.
class GCochain {
public:
    using Eval = std::function<Vec(const DeltaSimplex&)>;
    GCochain(std::shared_ptr<const Nerve> nerve, int fiber_dim, int degree, int arity, int object_cap, Eval eval);

    int degree() const { return degree_; }
    int arity() const { return arity_; }
    int fiber_dim() const { return fiber_dim_; }
    int object_cap() const { return object_cap_; }
    const std::shared_ptr<const Nerve>& nerve() const { return nerve_; }
    Vec operator()(const DeltaSimplex& lambda) const;

private:
    std::shared_ptr<const Nerve> nerve_;
    int fiber_dim_, degree_, arity_, object_cap_;
    struct Memo {
        Eval eval;
        std::mutex mutex;
        std::map<std::vector<int>, Vec> values;
    };
    std::shared_ptr<Memo> memo_;
};

// Random entries on the components with s(P) >= min_filtration, zero elsewhere.
GCochain random_g_cochain(std::shared_ptr<const Nerve> nerve, int fiber_dim, int degree, int arity, int object_cap,
                          std::uint64_t seed, int min_filtration = 0);
GCochain g_differential(const GCochain& x);
// h^n(D)_mu = sum over e, I of e_* D^I_{mu^e}; defined for n >= 1.
GCochain acyclicity_homotopy(const GCochain& x);
GCochain g_filtration(const GCochain& x, int s, bool graded = false);

// Dimensions of H^0..H^p_max of the truncated G^{*, arity} by sparse rank.
std::vector<int> g_cohomology(const Nerve& nerve, int fiber_dim, int arity, int object_cap, int p_max);

}  // namespace deform
