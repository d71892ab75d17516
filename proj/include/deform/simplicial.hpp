#pragma once

#include "deform/linalg.hpp"
#include "deform/random.hpp"

#include <boost/container/small_vector.hpp>

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <unordered_map>
#include <vector>

namespace deform {

// Simplices stay small; inline storage keeps the hat cochain recursion off the heap.
using SmallInts = boost::container::small_vector<int, 6>;

// Nondecreasing map [source] -> [target].
struct MonotoneMap {
    int source = 0;
    int target = 0;
    SmallInts values;

    static MonotoneMap identity(int n);
    static MonotoneMap face(int n, int i);        // [n] -> [n+1], misses i
    static MonotoneMap degeneracy(int n, int i);  // [n] -> [n-1], hits i twice
    static MonotoneMap constant(int source, int target, int value);

    int operator()(int k) const { return values[static_cast<std::size_t>(k)]; }
    bool is_identity() const;
    friend bool operator==(const MonotoneMap&, const MonotoneMap&) = default;
    friend std::strong_ordering operator<=>(const MonotoneMap&, const MonotoneMap&) = default;
};

// g o f
MonotoneMap compose(const MonotoneMap& g, const MonotoneMap& f);
void validate_monotone(const MonotoneMap& f);

// Every map [m] -> [n] with m, n <= cap.
std::vector<MonotoneMap> all_monotone_maps(int source, int target);

// A chain [lambda_0] -> [lambda_1] -> ... -> [lambda_n] in Delta.
class DeltaSimplex {
public:
    DeltaSimplex() = default;
    using Arrows = boost::container::small_vector<MonotoneMap, 5>;
    DeltaSimplex(SmallInts objects, Arrows arrows);
    DeltaSimplex(std::span<const int> objects, std::span<const MonotoneMap> arrows);
    static DeltaSimplex point(int q);
    static DeltaSimplex arrow(const MonotoneMap& f);

    int dim() const { return static_cast<int>(objects_.size()) - 1; }
    int object(int i) const { return objects_[static_cast<std::size_t>(i)]; }
    const SmallInts& objects() const { return objects_; }
    const Arrows& arrows() const { return arrows_; }
    // lambda(i k), the composite of consecutive arrows for i <= k.
    MonotoneMap map(int i, int k) const;
    // lambda|[j l]
    DeltaSimplex truncate(int j, int l) const;
    // lambda o phi for a monotone phi: [m] -> [dim()].
    DeltaSimplex pullback(const MonotoneMap& phi) const;
    int max_object() const;
    std::vector<int> key() const;
    // Swaps in the arrows of `head`, whose objects must match the first head.dim() + 1 of ours.
    void replace_head(const DeltaSimplex& head);

    friend bool operator==(const DeltaSimplex&, const DeltaSimplex&) = default;
    friend DeltaSimplex concat(const DeltaSimplex& a, const DeltaSimplex& b);

private:
    SmallInts objects_;
    Arrows arrows_;
};

DeltaSimplex concat(const DeltaSimplex& a, const DeltaSimplex& b);
// k -> lambda(k n)(top of lambda(k)), a map [n] -> [lambda(n)].
MonotoneMap upsilon(const DeltaSimplex& lambda);
// Calls f on every n-simplex with all objects <= object_cap.
void for_each_simplex(int n, int object_cap, const std::function<void(const DeltaSimplex&)>& f);
std::size_t count_simplices(int n, int object_cap);

// Cosimplicial vector space truncated at degree top(): spaces V^0..V^top and the
// matrices of cofaces and codegeneracies; every other structure map is synthesized
// by the epi-mono factorization.
class CosimplicialVS {
public:
    CosimplicialVS(std::vector<int> dims, std::vector<std::vector<Matrix>> cofaces,
                   std::vector<std::vector<Matrix>> codegeneracies);
    CosimplicialVS(const CosimplicialVS& other);
    CosimplicialVS& operator=(const CosimplicialVS& other);

    int top() const { return static_cast<int>(dims_.size()) - 1; }
    int dim(int q) const { return dims_[static_cast<std::size_t>(q)]; }
    const std::vector<int>& dims() const { return dims_; }
    const Matrix& coface(int n, int i) const;        // V^n -> V^{n+1}
    const Matrix& codegeneracy(int n, int i) const;  // V^n -> V^{n-1}
    // V(f): V^source -> V^target, memoized.
    const Matrix& map(const MonotoneMap& f) const;

    // Cosimplicial identities on the generators.
    std::vector<Violation> validate() const;

    static CosimplicialVS constant(int dim, int top);
    // Dold-Kan: the cosimplicial space whose normalized complex is (dims, d) with d[k]: N^k -> N^{k+1}.
    static CosimplicialVS from_normalized(const std::vector<int>& dims, const std::vector<Matrix>& d, int top);
    // Same structure in new bases: V'(f) = P_target^{-1} V(f) P_source.
    CosimplicialVS change_basis(const std::vector<Matrix>& p) const;

private:
    std::vector<int> dims_;
    std::vector<std::vector<Matrix>> cofaces_, codegeneracies_;
    mutable std::mutex memo_mutex_;
    mutable std::map<MonotoneMap, Matrix> memo_;
};

// Random V with dim V^q <= max_dim for q <= top, built by Dold-Kan and a random basis change.
CosimplicialVS random_cosimplicial(Rng& rng, int top, int max_dim);
// Random V whose normalized pieces have dimension <= max_piece, with a random differential.
CosimplicialVS random_cosimplicial_pieces(Rng& rng, int top, int max_piece);

// The complex C(V) with the alternating sum of cofaces.
Matrix cochain_differential_matrix(const CosimplicialVS& v, int n);
Vec cochain_differential(const CosimplicialVS& v, int n, std::span<const Rational> x);
bool is_normalized_cochain(const CosimplicialVS& v, int n, std::span<const Rational> x);
// Basis of the normalized subspace (joint kernel of the codegeneracies).
std::vector<Vec> normalized_basis(const CosimplicialVS& v, int n);
// Projection onto the normalized subspace along the span of the cofaces d_1..d_n.
Matrix normalized_projection(const CosimplicialVS& v, int n);
struct CosimplicialCohomology {
    std::vector<int> full;
    std::vector<int> normalized;
};
// Dimensions of H^n for n < top (H^top would need V^{top+1}).
CosimplicialCohomology cosimplicial_cohomology(const CosimplicialVS& v);

// Element of the hat construction: a value in V^{lambda(n)} for each n-simplex lambda,
// computed on demand and memoized.
class HatCochain {
public:
    using Eval = std::function<Vec(const DeltaSimplex&)>;
    // Cheap cochains (memoize = false) are recomputed on every call.
    HatCochain(const CosimplicialVS& v, int degree, int object_cap, Eval eval, bool memoize = true);

    int degree() const { return degree_; }
    int object_cap() const { return object_cap_; }
    const CosimplicialVS& space() const { return *space_; }
    Vec operator()(const DeltaSimplex& lambda) const;
    // Evaluates without storing the result; for values read once.
    Vec compute(const DeltaSimplex& lambda) const;
    // The memoized value in place; unmemoized values land in `scratch`.
    const Vec& value(const DeltaSimplex& lambda, Vec& scratch) const;

private:
    const CosimplicialVS* space_;
    int degree_;
    int object_cap_;
    struct KeyHash {
        std::size_t operator()(const DeltaSimplex& lambda) const noexcept;
    };
    struct Memo {
        Eval eval;
        bool memoize = true;
        std::mutex mutex;
        std::unordered_map<DeltaSimplex, Vec, KeyHash> values;
    };
    std::shared_ptr<Memo> memo_;
};

// Deterministic pseudo-random hat cochain (values drawn from a hash of lambda and the seed).
HatCochain random_hat_cochain(const CosimplicialVS& v, int degree, int object_cap, std::uint64_t seed);

HatCochain hat_structure(const MonotoneMap& phi, const HatCochain& f);
HatCochain hat_differential(const HatCochain& f);
HatCochain iota(const CosimplicialVS& v, int n, const Vec& x, int object_cap);
Vec pi(const HatCochain& f);
// The j-th summand of the homotopy carries (-1)^{j(j-1)/2} on top of the face signs;
// without it (uncorrected) the identity below fails from degree 2 on.
enum class HomotopySigns { corrected, uncorrected };
HatCochain homotopy_h(const HatCochain& f, HomotopySigns signs = HomotopySigns::corrected);

// The homotopy identity reads (iota pi - Id) f = kHomotopySign (d h + h d) f.
inline constexpr int kHomotopySign = -1;

}  // namespace deform
