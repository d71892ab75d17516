#include "deform/simplicial.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace deform {

MonotoneMap MonotoneMap::identity(int n) {
    MonotoneMap f{n, n, {}};
    for (int k = 0; k <= n; ++k) f.values.push_back(k);
    return f;
}

MonotoneMap MonotoneMap::face(int n, int i) {
    if (i < 0 || i > n + 1) throw std::invalid_argument("face index out of range");
    MonotoneMap f{n, n + 1, {}};
    for (int k = 0; k <= n; ++k) f.values.push_back(k < i ? k : k + 1);
    return f;
}

MonotoneMap MonotoneMap::degeneracy(int n, int i) {
    if (i < 0 || i > n - 1) throw std::invalid_argument("degeneracy index out of range");
    MonotoneMap f{n, n - 1, {}};
    for (int k = 0; k <= n; ++k) f.values.push_back(k <= i ? k : k - 1);
    return f;
}

MonotoneMap MonotoneMap::constant(int source, int target, int value) {
    return {source, target, SmallInts(static_cast<std::size_t>(source + 1), value)};
}

bool MonotoneMap::is_identity() const {
    if (source != target) return false;
    for (int k = 0; k <= source; ++k)
        if (values[static_cast<std::size_t>(k)] != k) return false;
    return true;
}

void validate_monotone(const MonotoneMap& f) {
    if (f.source < 0 || f.target < 0 || f.values.size() != static_cast<std::size_t>(f.source + 1))
        throw std::invalid_argument("monotone map has the wrong number of values");
    for (int k = 0; k <= f.source; ++k) {
        int v = f(k);
        if (v < 0 || v > f.target) throw std::invalid_argument("monotone map value out of range");
        if (k > 0 && v < f(k - 1)) throw std::invalid_argument("map is not monotone");
    }
}

MonotoneMap compose(const MonotoneMap& g, const MonotoneMap& f) {
    if (f.target != g.source) throw std::invalid_argument("maps are not composable");
    MonotoneMap h{f.source, g.target, {}};
    for (int v : f.values) h.values.push_back(g(v));
    return h;
}

std::vector<MonotoneMap> all_monotone_maps(int source, int target) {
    std::vector<MonotoneMap> out;
    MonotoneMap f{source, target, SmallInts(static_cast<std::size_t>(source + 1), 0)};
    std::function<void(int, int)> rec = [&](int pos, int lo) {
        if (pos > source) {
            out.push_back(f);
            return;
        }
        for (int v = lo; v <= target; ++v) {
            f.values[static_cast<std::size_t>(pos)] = v;
            rec(pos + 1, v);
        }
    };
    rec(0, 0);
    return out;
}

DeltaSimplex::DeltaSimplex(std::span<const int> objects, std::span<const MonotoneMap> arrows)
    : DeltaSimplex(SmallInts(objects.begin(), objects.end()), Arrows(arrows.begin(), arrows.end())) {}

DeltaSimplex::DeltaSimplex(SmallInts objects, Arrows arrows) : objects_(std::move(objects)), arrows_(std::move(arrows)) {
    if (objects_.empty() || arrows_.size() + 1 != objects_.size())
        throw std::invalid_argument("a simplex needs n + 1 objects and n arrows");
    for (std::size_t i = 0; i < arrows_.size(); ++i) {
        validate_monotone(arrows_[i]);
        if (arrows_[i].source != objects_[i] || arrows_[i].target != objects_[i + 1])
            throw std::invalid_argument("arrow " + std::to_string(i) + " does not connect its objects");
    }
}

DeltaSimplex DeltaSimplex::point(int q) { return DeltaSimplex(SmallInts{q}, Arrows{}); }

DeltaSimplex DeltaSimplex::arrow(const MonotoneMap& f) { return DeltaSimplex(SmallInts{f.source, f.target}, Arrows{f}); }

MonotoneMap DeltaSimplex::map(int i, int k) const {
    if (i > k) throw std::invalid_argument("simplex maps go upwards");
    MonotoneMap f = MonotoneMap::identity(object(i));
    for (int j = i; j < k; ++j) f = compose(arrows_[static_cast<std::size_t>(j)], f);
    return f;
}

DeltaSimplex DeltaSimplex::truncate(int j, int l) const {
    if (j < 0 || j > l || l > dim()) throw std::out_of_range("truncation outside the simplex");
    DeltaSimplex out;
    out.objects_.assign(objects_.begin() + j, objects_.begin() + l + 1);
    out.arrows_.assign(arrows_.begin() + j, arrows_.begin() + l);
    return out;
}

DeltaSimplex DeltaSimplex::pullback(const MonotoneMap& phi) const {
    if (phi.target != dim()) throw std::invalid_argument("pullback along a map with the wrong target");
    DeltaSimplex out;
    for (int i = 0; i <= phi.source; ++i) {
        out.objects_.push_back(object(phi(i)));
        if (i > 0) out.arrows_.push_back(map(phi(i - 1), phi(i)));
    }
    return out;
}

void DeltaSimplex::replace_head(const DeltaSimplex& head) {
    if (head.dim() > dim() || !std::equal(head.objects_.begin(), head.objects_.end(), objects_.begin()))
        throw std::invalid_argument("head objects differ");
    std::copy(head.arrows_.begin(), head.arrows_.end(), arrows_.begin());
}

int DeltaSimplex::max_object() const {
    int m = 0;
    for (int q : objects_) m = std::max(m, q);
    return m;
}

std::vector<int> DeltaSimplex::key() const {
    std::vector<int> k{dim()};
    k.insert(k.end(), objects_.begin(), objects_.end());
    for (const auto& a : arrows_) k.insert(k.end(), a.values.begin(), a.values.end());
    return k;
}

DeltaSimplex concat(const DeltaSimplex& a, const DeltaSimplex& b) {
    if (a.object(a.dim()) != b.object(0)) throw std::invalid_argument("concatenation endpoints differ");
    DeltaSimplex out = a;
    out.objects_.insert(out.objects_.end(), b.objects_.begin() + 1, b.objects_.end());
    out.arrows_.insert(out.arrows_.end(), b.arrows_.begin(), b.arrows_.end());
    return out;
}

MonotoneMap upsilon(const DeltaSimplex& lambda) {
    int n = lambda.dim();
    MonotoneMap f{n, lambda.object(n), {}};
    for (int k = 0; k <= n; ++k) f.values.push_back(lambda.map(k, n)(lambda.object(k)));
    return f;
}

void for_each_simplex(int n, int object_cap, const std::function<void(const DeltaSimplex&)>& f) {
    std::vector<int> objs;
    std::vector<MonotoneMap> arrs;
    std::function<void()> rec = [&]() {
        if (static_cast<int>(objs.size()) == n + 1) {
            f(DeltaSimplex(objs, arrs));
            return;
        }
        for (int q = 0; q <= object_cap; ++q) {
            if (objs.empty()) {
                objs.push_back(q);
                rec();
                objs.pop_back();
                continue;
            }
            for (auto& m : all_monotone_maps(objs.back(), q)) {
                objs.push_back(q);
                arrs.push_back(std::move(m));
                rec();
                arrs.pop_back();
                objs.pop_back();
            }
        }
    };
    rec();
}

std::size_t count_simplices(int n, int object_cap) {
    std::size_t count = 0;
    for_each_simplex(n, object_cap, [&](const DeltaSimplex&) { ++count; });
    return count;
}

CosimplicialVS::CosimplicialVS(std::vector<int> dims, std::vector<std::vector<Matrix>> cofaces,
                               std::vector<std::vector<Matrix>> codegeneracies)
    : dims_(std::move(dims)), cofaces_(std::move(cofaces)), codegeneracies_(std::move(codegeneracies)) {
    int top = this->top();
    if (top < 0) throw std::invalid_argument("cosimplicial space needs V^0");
    if (cofaces_.size() != static_cast<std::size_t>(top)) throw std::invalid_argument("cofaces needed for degrees 0..top-1");
    if (codegeneracies_.size() != static_cast<std::size_t>(top + 1))
        throw std::invalid_argument("codegeneracies needed for degrees 0..top (empty at 0)");
    for (int n = 0; n < top; ++n) {
        if (cofaces_[static_cast<std::size_t>(n)].size() != static_cast<std::size_t>(n + 2))
            throw std::invalid_argument("degree " + std::to_string(n) + " needs n + 2 cofaces");
        for (const auto& m : cofaces_[static_cast<std::size_t>(n)])
            if (m.rows() != dim(n + 1) || m.cols() != dim(n))
                throw std::invalid_argument("coface in degree " + std::to_string(n) + " has the wrong shape");
    }
    for (int n = 0; n <= top; ++n) {
        if (codegeneracies_[static_cast<std::size_t>(n)].size() != static_cast<std::size_t>(n))
            throw std::invalid_argument("degree " + std::to_string(n) + " needs n codegeneracies");
        for (const auto& m : codegeneracies_[static_cast<std::size_t>(n)])
            if (m.rows() != dim(n - 1) || m.cols() != dim(n))
                throw std::invalid_argument("codegeneracy in degree " + std::to_string(n) + " has the wrong shape");
    }
}

CosimplicialVS::CosimplicialVS(const CosimplicialVS& other)
    : dims_(other.dims_), cofaces_(other.cofaces_), codegeneracies_(other.codegeneracies_) {}

CosimplicialVS& CosimplicialVS::operator=(const CosimplicialVS& other) {
    if (this != &other) {
        dims_ = other.dims_;
        cofaces_ = other.cofaces_;
        codegeneracies_ = other.codegeneracies_;
        std::lock_guard lock(memo_mutex_);
        memo_.clear();
    }
    return *this;
}

const Matrix& CosimplicialVS::coface(int n, int i) const {
    if (n < 0 || n >= top()) throw std::out_of_range("coface beyond the degree cap " + std::to_string(top()));
    return cofaces_[static_cast<std::size_t>(n)].at(static_cast<std::size_t>(i));
}

const Matrix& CosimplicialVS::codegeneracy(int n, int i) const {
    if (n < 1 || n > top()) throw std::out_of_range("codegeneracy beyond the degree cap " + std::to_string(top()));
    return codegeneracies_[static_cast<std::size_t>(n)].at(static_cast<std::size_t>(i));
}

const Matrix& CosimplicialVS::map(const MonotoneMap& f) const {
    if (f.source > top() || f.target > top())
        throw std::out_of_range("structure map beyond the degree cap " + std::to_string(top()));
    {
        std::lock_guard lock(memo_mutex_);
        if (auto it = memo_.find(f); it != memo_.end()) return it->second;
    }
    if (f.is_identity()) {
        std::lock_guard lock(memo_mutex_);
        return memo_.emplace(f, Matrix::identity(dim(f.source))).first->second;
    }
    Matrix result;
    int m = f.source;
    int j = -1;
    for (int k = 0; k < m; ++k)
        if (f(k) == f(k + 1)) {
            j = k;
            break;
        }
    if (j >= 0) {
        // f = f' o s_j
        MonotoneMap rest{m - 1, f.target, {}};
        for (int x = 0; x < m; ++x) rest.values.push_back(x <= j ? f(x) : f(x + 1));
        result = map(rest) * codegeneracy(m, j);
    } else {
        // f = d_a o f' with a the largest value missed
        int a = f.target;
        while (a >= 0 && std::find(f.values.begin(), f.values.end(), a) != f.values.end()) --a;
        MonotoneMap rest{m, f.target - 1, {}};
        for (int v : f.values) rest.values.push_back(v < a ? v : v - 1);
        result = coface(f.target - 1, a) * map(rest);
    }
    std::lock_guard lock(memo_mutex_);
    return memo_.emplace(f, std::move(result)).first->second;
}

std::vector<Violation> CosimplicialVS::validate() const {
    std::vector<Violation> out;
    auto name = [](const MonotoneMap& f) {
        std::string s = "[" + std::to_string(f.source) + "]->[" + std::to_string(f.target) + "] (";
        for (std::size_t i = 0; i < f.values.size(); ++i) s += (i ? "," : "") + std::to_string(f.values[i]);
        return s + ")";
    };
    // V(g o f) = V(g) V(f) for every map f and generator g; by induction this is functoriality.
    for (int m = 0; m <= top(); ++m)
        for (int n = 0; n <= top(); ++n)
            for (const auto& f : all_monotone_maps(m, n)) {
                Matrix vf = map(f);
                std::vector<MonotoneMap> gens;
                if (n < top())
                    for (int i = 0; i <= n + 1; ++i) gens.push_back(MonotoneMap::face(n, i));
                for (int i = 0; i + 1 <= n; ++i) gens.push_back(MonotoneMap::degeneracy(n, i));
                for (const auto& g : gens) {
                    Matrix lhs = map(compose(g, f));
                    Matrix gen = [&] {
                        if (g.target == n + 1) {
                            for (int i = 0; i <= n + 1; ++i)
                                if (MonotoneMap::face(n, i) == g) return coface(n, i);
                        }
                        for (int i = 0; i < n; ++i)
                            if (MonotoneMap::degeneracy(n, i) == g) return codegeneracy(n, i);
                        throw std::logic_error("not a generator");
                    }();
                    if (lhs != gen * vf) {
                        out.push_back({"functoriality", name(g) + " after " + name(f)});
                        return out;
                    }
                }
            }
    return out;
}

namespace {

// Monotone surjections [n] -> [k], k = 0..n, in a fixed order.
std::vector<MonotoneMap> surjections(int n) {
    std::vector<MonotoneMap> out;
    for (int k = 0; k <= n; ++k)
        for (auto& f : all_monotone_maps(n, k)) {
            bool onto = f(0) == 0 && f(n) == k;
            for (int x = 1; x <= n && onto; ++x) onto = f(x) - f(x - 1) <= 1;
            if (onto) out.push_back(std::move(f));
        }
    return out;
}

// Epi part of a monotone map: x -> rank of f(x) in the image.
MonotoneMap epi_part(const MonotoneMap& f) {
    MonotoneMap e{f.source, 0, {0}};
    for (int x = 1; x <= f.source; ++x) e.values.push_back(e.values.back() + (f(x) != f(x - 1)));
    e.target = e.values.back();
    return e;
}

}  // namespace

CosimplicialVS CosimplicialVS::constant(int dim, int top) {
    std::vector<int> dims(static_cast<std::size_t>(top + 1), dim);
    std::vector<std::vector<Matrix>> cof, codeg(static_cast<std::size_t>(top + 1));
    for (int n = 0; n < top; ++n) cof.emplace_back(static_cast<std::size_t>(n + 2), Matrix::identity(dim));
    for (int n = 1; n <= top; ++n) codeg[static_cast<std::size_t>(n)].assign(static_cast<std::size_t>(n), Matrix::identity(dim));
    return CosimplicialVS(dims, cof, codeg);
}

CosimplicialVS CosimplicialVS::from_normalized(const std::vector<int>& ndims, const std::vector<Matrix>& d, int top) {
    auto ndim = [&](int k) { return k < static_cast<int>(ndims.size()) ? ndims[static_cast<std::size_t>(k)] : 0; };
    std::vector<std::vector<MonotoneMap>> surj;
    std::vector<std::vector<int>> offsets;
    std::vector<int> dims;
    for (int n = 0; n <= top + 1; ++n) {
        surj.push_back(surjections(n));
        std::vector<int> off;
        int total = 0;
        for (const auto& s : surj.back()) {
            off.push_back(total);
            total += ndim(s.target);
        }
        offsets.push_back(off);
        if (n <= top) dims.push_back(total);
    }
    auto structure = [&](const MonotoneMap& theta) {
        int m = theta.source, n = theta.target;
        Matrix out(dims[static_cast<std::size_t>(n)], dims[static_cast<std::size_t>(m)]);
        const auto& src = surj[static_cast<std::size_t>(m)];
        const auto& dst = surj[static_cast<std::size_t>(n)];
        for (std::size_t si = 0; si < dst.size(); ++si) {
            const MonotoneMap& sigma = dst[si];
            int k = sigma.target;
            MonotoneMap c = compose(sigma, theta);
            MonotoneMap eta = epi_part(c);
            auto it = std::find(src.begin(), src.end(), eta);
            std::size_t ei = static_cast<std::size_t>(it - src.begin());
            int j = eta.target;
            if (ndim(j) == 0 || ndim(k) == 0) continue;
            int row0 = offsets[static_cast<std::size_t>(n)][si], col0 = offsets[static_cast<std::size_t>(m)][ei];
            if (j == k) {
                for (int x = 0; x < ndim(k); ++x) out(row0 + x, col0 + x) = 1;
            } else if (j == k - 1 && c(0) == 1) {
                // the mono part misses exactly 0
                const Matrix& dk = d.at(static_cast<std::size_t>(j));
                for (int r = 0; r < ndim(k); ++r)
                    for (int s = 0; s < ndim(j); ++s) out(row0 + r, col0 + s) = dk(r, s);
            }
        }
        return out;
    };
    std::vector<std::vector<Matrix>> cof, codeg(static_cast<std::size_t>(top + 1));
    for (int n = 0; n < top; ++n) {
        cof.emplace_back();
        for (int i = 0; i <= n + 1; ++i) cof.back().push_back(structure(MonotoneMap::face(n, i)));
    }
    for (int n = 1; n <= top; ++n)
        for (int i = 0; i < n; ++i) codeg[static_cast<std::size_t>(n)].push_back(structure(MonotoneMap::degeneracy(n, i)));
    return CosimplicialVS(dims, cof, codeg);
}

CosimplicialVS CosimplicialVS::change_basis(const std::vector<Matrix>& p) const {
    std::vector<Matrix> inv;
    for (const auto& m : p) {
        auto i = inverse(m);
        if (!i) throw std::invalid_argument("basis change is not invertible");
        inv.push_back(*i);
    }
    auto cof = cofaces_;
    auto codeg = codegeneracies_;
    for (int n = 0; n < top(); ++n)
        for (auto& m : cof[static_cast<std::size_t>(n)]) m = inv[static_cast<std::size_t>(n + 1)] * m * p[static_cast<std::size_t>(n)];
    for (int n = 1; n <= top(); ++n)
        for (auto& m : codeg[static_cast<std::size_t>(n)]) m = inv[static_cast<std::size_t>(n - 1)] * m * p[static_cast<std::size_t>(n)];
    return CosimplicialVS(dims_, cof, codeg);
}

namespace {

std::vector<Matrix> random_square_zero_differential(Rng& rng, const std::vector<int>& dims) {
    std::vector<Matrix> d;
    for (std::size_t k = 0; k + 1 < dims.size(); ++k) {
        int rows = dims[k + 1], cols = dims[k];
        Matrix dk(rows, cols);
        if (rows > 0 && cols > 0) {
            // rows of q annihilate the image of the previous map
            std::vector<Vec> ann;
            if (k == 0) {
                for (int i = 0; i < cols; ++i) {
                    Vec e(static_cast<std::size_t>(cols));
                    e[static_cast<std::size_t>(i)] = 1;
                    ann.push_back(e);
                }
            } else {
                ann = nullspace(d.back().transpose());
            }
            if (!ann.empty()) {
                Matrix q = Matrix::from_rows(ann, cols);
                Matrix r = rng.matrix(rows, q.rows(), 2);
                if (rng.coin(0.3)) r = Matrix(rows, q.rows());
                dk = r * q;
            }
        }
        d.push_back(dk);
    }
    return d;
}

CosimplicialVS with_random_basis(Rng& rng, const CosimplicialVS& v) {
    std::vector<Matrix> p;
    for (int q = 0; q <= v.top(); ++q) p.push_back(rng.invertible(v.dim(q)));
    return v.change_basis(p);
}

long binom(int n, int k) {
    if (k < 0 || k > n) return 0;
    long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace

CosimplicialVS random_cosimplicial(Rng& rng, int top, int max_dim) {
    std::vector<int> nd(static_cast<std::size_t>(top + 1));
    while (true) {
        int total = 0;
        for (auto& x : nd) total += (x = rng.uniform(0, max_dim));
        if (total == 0) continue;
        bool ok = true;
        for (int q = 0; q <= top && ok; ++q) {
            long dq = 0;
            for (int k = 0; k <= q; ++k) dq += binom(q, k) * nd[static_cast<std::size_t>(k)];
            ok = dq <= max_dim;
        }
        if (ok) break;
    }
    return with_random_basis(rng, CosimplicialVS::from_normalized(nd, random_square_zero_differential(rng, nd), top));
}

CosimplicialVS random_cosimplicial_pieces(Rng& rng, int top, int max_piece) {
    std::vector<int> nd(static_cast<std::size_t>(top + 1));
    for (auto& x : nd) x = rng.uniform(0, max_piece);
    return with_random_basis(rng, CosimplicialVS::from_normalized(nd, random_square_zero_differential(rng, nd), top));
}

Matrix cochain_differential_matrix(const CosimplicialVS& v, int n) {
    if (n + 1 > v.top()) throw std::out_of_range("cochain differential beyond the degree cap " + std::to_string(v.top()));
    Matrix d(v.dim(n + 1), v.dim(n));
    for (int i = 0; i <= n + 1; ++i) {
        const Matrix& c = v.coface(n, i);
        d = i % 2 == 0 ? d + c : d - c;
    }
    return d;
}

Vec cochain_differential(const CosimplicialVS& v, int n, std::span<const Rational> x) {
    return cochain_differential_matrix(v, n).apply(x);
}

std::vector<Vec> normalized_basis(const CosimplicialVS& v, int n) {
    Matrix stacked(0, v.dim(n));
    for (int i = 0; i < n; ++i) stacked = Matrix::vcat(stacked, v.codegeneracy(n, i));
    return nullspace(stacked);
}

bool is_normalized_cochain(const CosimplicialVS& v, int n, std::span<const Rational> x) {
    for (int i = 0; i < n; ++i)
        if (!is_zero(v.codegeneracy(n, i).apply(x))) return false;
    return true;
}

Matrix normalized_projection(const CosimplicialVS& v, int n) {
    int dim = v.dim(n);
    std::vector<Vec> norm = normalized_basis(v, n);
    Matrix degenerate(dim, 0);
    for (int i = 1; i <= n; ++i) degenerate = Matrix::hcat(degenerate, v.coface(n - 1, i));
    std::vector<Vec> deg = column_space(degenerate);
    if (norm.size() + deg.size() != static_cast<std::size_t>(dim))
        throw std::logic_error("normalized and degenerate parts are not complementary");
    std::vector<Vec> cols = norm;
    cols.insert(cols.end(), deg.begin(), deg.end());
    Matrix basis = Matrix::from_columns(cols, dim);
    auto inv = inverse(basis);
    if (!inv) throw std::logic_error("normalized and degenerate parts intersect");
    Matrix keep(dim, dim);
    for (std::size_t i = 0; i < norm.size(); ++i) keep(static_cast<int>(i), static_cast<int>(i)) = 1;
    return basis * keep * *inv;
}

CosimplicialCohomology cosimplicial_cohomology(const CosimplicialVS& v) {
    CosimplicialCohomology out;
    int prev_full = 0, prev_norm = 0;
    for (int n = 0; n < v.top(); ++n) {
        Matrix d = cochain_differential_matrix(v, n);
        int rk = rank(d);
        out.full.push_back(v.dim(n) - rk - prev_full);
        prev_full = rk;
        std::vector<Vec> nb = normalized_basis(v, n);
        Matrix restricted = d * Matrix::from_columns(nb, v.dim(n));
        int rn = rank(restricted);
        out.normalized.push_back(static_cast<int>(nb.size()) - rn - prev_norm);
        prev_norm = rn;
    }
    return out;
}

HatCochain::HatCochain(const CosimplicialVS& v, int degree, int object_cap, Eval eval, bool memoize)
    : space_(&v), degree_(degree), object_cap_(object_cap), memo_(std::make_shared<Memo>()) {
    if (object_cap > v.top())
        throw std::out_of_range("object cap " + std::to_string(object_cap) + " exceeds the degree cap " +
                                std::to_string(v.top()));
    memo_->eval = std::move(eval);
    memo_->memoize = memoize;
}

std::size_t HatCochain::KeyHash::operator()(const DeltaSimplex& lambda) const noexcept {
    std::size_t h = lambda.objects().size();
    auto mix = [&h](const int* p, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) h ^= static_cast<std::size_t>(p[i]) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    };
    mix(lambda.objects().data(), lambda.objects().size());
    for (const auto& a : lambda.arrows()) mix(a.values.data(), a.values.size());
    return h;
}

const Vec& HatCochain::value(const DeltaSimplex& lambda, Vec& scratch) const {
    if (lambda.dim() != degree_) throw std::invalid_argument("simplex dimension differs from the cochain degree");
    if (lambda.max_object() > object_cap_)
        throw std::out_of_range("simplex object exceeds the cap " + std::to_string(object_cap_));
    auto checked = [&](Vec value) {
        if (value.size() != static_cast<std::size_t>(space_->dim(lambda.object(degree_))))
            throw std::logic_error("hat cochain value has the wrong dimension");
        return value;
    };
    if (!memo_->memoize) return scratch = checked(memo_->eval(lambda));
    {
        std::lock_guard lock(memo_->mutex);
        if (auto it = memo_->values.find(lambda); it != memo_->values.end()) return it->second;
    }
    Vec value = checked(memo_->eval(lambda));
    std::lock_guard lock(memo_->mutex);
    return memo_->values.emplace(lambda, std::move(value)).first->second;
}

Vec HatCochain::operator()(const DeltaSimplex& lambda) const {
    Vec scratch;
    return value(lambda, scratch);
}

Vec HatCochain::compute(const DeltaSimplex& lambda) const {
    if (lambda.dim() != degree_) throw std::invalid_argument("simplex dimension differs from the cochain degree");
    if (lambda.max_object() > object_cap_)
        throw std::out_of_range("simplex object exceeds the cap " + std::to_string(object_cap_));
    {
        std::lock_guard lock(memo_->mutex);
        if (auto it = memo_->values.find(lambda); it != memo_->values.end()) return it->second;
    }
    return memo_->eval(lambda);
}

HatCochain random_hat_cochain(const CosimplicialVS& v, int degree, int object_cap, std::uint64_t seed) {
    return HatCochain(v, degree, object_cap, [&v, degree, seed](const DeltaSimplex& lambda) {
        std::uint64_t h = seed;
        for (int q : lambda.objects()) h = (h ^ static_cast<std::uint64_t>(q + 7)) * 1099511628211ULL;
        for (const auto& a : lambda.arrows())
            for (int x : a.values) h = (h ^ static_cast<std::uint64_t>(x + 7)) * 1099511628211ULL;
        // splitmix64 stream; numerators in [-3, 3], denominators in {1, 2}
        auto next = [&h] {
            std::uint64_t z = (h += 0x9e3779b97f4a7c15ULL);
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            return z ^ (z >> 31);
        };
        Vec out(static_cast<std::size_t>(v.dim(lambda.object(degree))));
        for (auto& x : out) {
            std::uint64_t r = next();
            x = Rational(static_cast<std::int64_t>(r % 7) - 3, static_cast<std::int64_t>(1 + (r >> 32) % 2));
        }
        return out;
    });
}

HatCochain hat_structure(const MonotoneMap& phi, const HatCochain& f) {
    if (phi.source != f.degree()) throw std::invalid_argument("structure map source differs from the cochain degree");
    const CosimplicialVS& v = f.space();
    return HatCochain(v, phi.target, f.object_cap(), [phi, f, &v](const DeltaSimplex& lambda) {
        Vec scratch;
        const Vec& inner = f.value(lambda.pullback(phi), scratch);
        return v.map(lambda.map(phi(phi.source), lambda.dim())).apply(inner);
    }, false);
}

HatCochain hat_differential(const HatCochain& f) {
    const CosimplicialVS& v = f.space();
    int n = f.degree();
    std::vector<HatCochain> faces;
    for (int i = 0; i <= n + 1; ++i) faces.push_back(hat_structure(MonotoneMap::face(n, i), f));
    return HatCochain(v, n + 1, f.object_cap(), [faces, &v](const DeltaSimplex& lambda) {
        Vec out(static_cast<std::size_t>(v.dim(lambda.object(lambda.dim()))));
        Vec scratch;
        for (std::size_t i = 0; i < faces.size(); ++i)
            axpy(out, i % 2 == 0 ? Rational(1) : Rational(-1), faces[i].value(lambda, scratch));
        return out;
    });
}

HatCochain iota(const CosimplicialVS& v, int n, const Vec& x, int object_cap) {
    if (x.size() != static_cast<std::size_t>(v.dim(n))) throw std::invalid_argument("cochain has the wrong dimension");
    return HatCochain(v, n, object_cap, [&v, x](const DeltaSimplex& lambda) { return v.map(upsilon(lambda)).apply(x); });
}

namespace {

struct FaceChain {
    DeltaSimplex simplex;
    int parity;
};

// Every chain d^0_{i_0} * ... * d^{len-1}_{i_{len-1}}, 0 <= i_k <= k + 1, with its sign exponent.
std::vector<FaceChain> build_face_chains(int len) {
    std::vector<FaceChain> out;
    std::vector<int> idx(static_cast<std::size_t>(len), 0);
    while (true) {
        std::vector<int> objs{0};
        std::vector<MonotoneMap> arrs;
        int parity = 0;
        for (int k = 0; k < len; ++k) {
            objs.push_back(k + 1);
            arrs.push_back(MonotoneMap::face(k, idx[static_cast<std::size_t>(k)]));
            parity += idx[static_cast<std::size_t>(k)];
        }
        out.push_back({DeltaSimplex(objs, arrs), parity});
        int k = len - 1;
        while (k >= 0 && idx[static_cast<std::size_t>(k)] == k + 1) idx[static_cast<std::size_t>(k--)] = 0;
        if (k < 0) break;
        ++idx[static_cast<std::size_t>(k)];
    }
    return out;
}

const std::vector<FaceChain>& face_chains(int len) {
    static std::mutex mutex;
    static std::map<int, std::vector<FaceChain>> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(len);
    if (it == cache.end()) it = cache.emplace(len, build_face_chains(len)).first;
    return it->second;
}

}  // namespace

Vec pi(const HatCochain& f) {
    int n = f.degree();
    const CosimplicialVS& v = f.space();
    if (n == 0) return f(DeltaSimplex::point(0));
    Vec out(static_cast<std::size_t>(v.dim(n)));
    for (const auto& [s, parity] : face_chains(n)) axpy(out, parity % 2 ? Rational(-1) : Rational(1), f(s));
    if ((n * (n + 1) / 2) % 2 != 0)
        for (auto& x : out) x = -x;
    return out;
}

HatCochain homotopy_h(const HatCochain& f, HomotopySigns signs) {
    int n = f.degree();
    if (n < 1) throw std::invalid_argument("the homotopy lowers degree and needs n >= 1");
    const CosimplicialVS& v = f.space();
    bool corrected = signs == HomotopySigns::corrected;
    return HatCochain(v, n - 1, f.object_cap(), [f, n, &v, corrected](const DeltaSimplex& lambda) {
        Vec out(static_cast<std::size_t>(v.dim(lambda.object(n - 1)))), scratch;
        for (int j = 0; j <= n - 1; ++j) {
            DeltaSimplex tail = concat(DeltaSimplex::arrow(upsilon(lambda.truncate(0, j))), lambda.truncate(j, n - 1));
            int shift = corrected ? j * (j - 1) / 2 : 0;
            if (j == 0) {
                axpy(out, 1, f.value(tail, scratch));
                continue;
            }
            const auto& chains = face_chains(j);
            DeltaSimplex probe = concat(chains.front().simplex, tail);
            for (const auto& [head, parity] : chains) {
                probe.replace_head(head);
                axpy(out, (parity + shift) % 2 ? Rational(-1) : Rational(1), f.value(probe, scratch));
            }
        }
        return out;
    });
}

}  // namespace deform
