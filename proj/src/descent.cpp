#include "deform/descent.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace deform {

namespace {

std::size_t upow(int base, int exp) {
    std::size_t r = 1;
    for (int i = 0; i < exp; ++i) r *= static_cast<std::size_t>(base);
    return r;
}

std::string join(std::span<const int> v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
}

// Every tuple in [0, base)^length in lexicographic order.
template <class F>
void for_each_tuple(int base, int length, F&& f) {
    std::vector<int> t(static_cast<std::size_t>(length), 0);
    if (base <= 0 && length > 0) return;
    while (true) {
        f(std::span<const int>(t));
        int pos = length - 1;
        while (pos >= 0 && ++t[static_cast<std::size_t>(pos)] == base) t[static_cast<std::size_t>(pos--)] = 0;
        if (pos < 0) return;
    }
}

std::vector<int> remove_position(std::span<const int> v, int i) {
    std::vector<int> out;
    for (int k = 0; k < static_cast<int>(v.size()); ++k)
        if (k != i) out.push_back(v[static_cast<std::size_t>(k)]);
    return out;
}

const RElement& lookup(const NerveFunction& f, const NervePoint& pt, const FiniteSpace& x, const char* what) {
    auto it = f.find(pt);
    if (it == f.end()) throw std::invalid_argument(std::string(what) + " is undefined at " + nerve_key(x, pt));
    return it->second;
}

RElement power(const RElement& a, int e) {
    RElement r(a.order(), 1);
    RElement base = e < 0 ? r_invert(a) : a;
    for (int i = 0; i < std::abs(e); ++i) r = r * base;
    return r;
}

}  // namespace

// ---------------------------------------------------------------- finite spaces

FiniteSpace::FiniteSpace(std::vector<std::string> names, const std::vector<std::pair<std::string, std::string>>& less)
    : names_(std::move(names)) {
    const int n = size();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (names_[static_cast<std::size_t>(i)] == names_[static_cast<std::size_t>(j)])
                throw std::invalid_argument("duplicate point " + names_[static_cast<std::size_t>(i)]);
    leq_.assign(static_cast<std::size_t>(n), std::vector<char>(static_cast<std::size_t>(n), 0));
    for (int i = 0; i < n; ++i) leq_[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1;
    for (const auto& [a, b] : less) leq_[static_cast<std::size_t>(index(a))][static_cast<std::size_t>(index(b))] = 1;
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            if (leq(i, k))
                for (int j = 0; j < n; ++j)
                    if (leq(k, j)) leq_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = 1;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (leq(i, j) && leq(j, i))
                throw std::invalid_argument("order is not antisymmetric at " + name(i) + ", " + name(j));
}

FiniteSpace FiniteSpace::discrete(int n) {
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) names.push_back(std::to_string(i));
    return FiniteSpace(std::move(names), {});
}

FiniteSpace FiniteSpace::pseudocircle() {
    return FiniteSpace({"a", "b", "c", "d"}, {{"a", "c"}, {"a", "d"}, {"b", "c"}, {"b", "d"}});
}

FiniteSpace FiniteSpace::suspension(const FiniteSpace& x, const std::string& north, const std::string& south) {
    std::vector<std::string> names = x.names();
    names.push_back(north);
    names.push_back(south);
    std::vector<std::pair<std::string, std::string>> less;
    for (auto [a, b] : x.covering_relations()) less.emplace_back(x.name(a), x.name(b));
    for (int p : x.maximal_points()) {
        less.emplace_back(x.name(p), north);
        less.emplace_back(x.name(p), south);
    }
    return FiniteSpace(std::move(names), less);
}

FiniteSpace FiniteSpace::sphere_model() { return suspension(pseudocircle()); }

FiniteSpace FiniteSpace::tetrahedron_boundary() {
    std::vector<std::vector<int>> faces;
    for (int size = 1; size <= 3; ++size)
        for (unsigned mask = 1; mask < 16; ++mask)
            if (std::popcount(mask) == size) {
                std::vector<int> f;
                for (int v = 0; v < 4; ++v)
                    if (mask & (1u << v)) f.push_back(v);
                faces.push_back(f);
            }
    std::vector<std::string> names;
    for (const auto& f : faces) {
        std::string s;
        for (int v : f) s += std::to_string(v);
        names.push_back(s);
    }
    std::vector<std::pair<std::string, std::string>> less;
    for (std::size_t i = 0; i < faces.size(); ++i)
        for (std::size_t j = 0; j < faces.size(); ++j)
            if (faces[i].size() > faces[j].size() &&
                std::includes(faces[i].begin(), faces[i].end(), faces[j].begin(), faces[j].end()))
                less.emplace_back(names[i], names[j]);
    return FiniteSpace(std::move(names), less);
}

int FiniteSpace::index(const std::string& name) const {
    for (int i = 0; i < size(); ++i)
        if (names_[static_cast<std::size_t>(i)] == name) return i;
    throw std::invalid_argument("unknown point " + name);
}

std::vector<int> FiniteSpace::down_set(int x) const {
    std::vector<int> out;
    for (int y = 0; y < size(); ++y)
        if (leq(y, x)) out.push_back(y);
    return out;
}

std::vector<int> FiniteSpace::maximal_points() const {
    std::vector<int> out;
    for (int x = 0; x < size(); ++x) {
        bool top = true;
        for (int y = 0; y < size() && top; ++y)
            if (y != x && leq(x, y)) top = false;
        if (top) out.push_back(x);
    }
    return out;
}

std::vector<std::pair<int, int>> FiniteSpace::covering_relations() const {
    std::vector<std::pair<int, int>> out;
    for (int x = 0; x < size(); ++x)
        for (int y = 0; y < size(); ++y) {
            if (x == y || !leq(x, y)) continue;
            bool direct = true;
            for (int z = 0; z < size() && direct; ++z)
                if (z != x && z != y && leq(x, z) && leq(z, y)) direct = false;
            if (direct) out.emplace_back(x, y);
        }
    return out;
}

bool FiniteSpace::is_open(std::span<const int> set) const {
    std::vector<char> in(static_cast<std::size_t>(size()), 0);
    for (int x : set) {
        if (x < 0 || x >= size()) return false;
        in[static_cast<std::size_t>(x)] = 1;
    }
    for (int x : set)
        for (int y = 0; y < size(); ++y)
            if (leq(y, x) && !in[static_cast<std::size_t>(y)]) return false;
    return true;
}

std::vector<std::vector<int>> FiniteSpace::components(std::span<const int> set) const {
    std::vector<int> pts(set.begin(), set.end());
    std::sort(pts.begin(), pts.end());
    std::vector<int> parent(pts.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> root = [&](int i) {
        return parent[static_cast<std::size_t>(i)] == i ? i : parent[static_cast<std::size_t>(i)] = root(parent[static_cast<std::size_t>(i)]);
    };
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            if (leq(pts[i], pts[j]) || leq(pts[j], pts[i]))
                parent[static_cast<std::size_t>(root(static_cast<int>(j)))] = root(static_cast<int>(i));
    std::map<int, std::vector<int>> groups;
    for (std::size_t i = 0; i < pts.size(); ++i) groups[root(static_cast<int>(i))].push_back(pts[i]);
    std::vector<std::vector<int>> out;
    for (auto& [r, g] : groups) out.push_back(std::move(g));
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------- covers and nerves

std::vector<int> Cover::intersection(std::span<const int> indices) const {
    std::vector<int> cur(static_cast<std::size_t>(space.size()));
    std::iota(cur.begin(), cur.end(), 0);
    for (int i : indices) {
        const auto& m = members.at(static_cast<std::size_t>(i));
        std::vector<int> next;
        std::set_intersection(cur.begin(), cur.end(), m.begin(), m.end(), std::back_inserter(next));
        cur = std::move(next);
    }
    return cur;
}

std::vector<Violation> validate_cover(const Cover& c) {
    std::vector<Violation> out;
    if (c.members.empty()) out.push_back({"nonempty", "cover has no members"});
    std::vector<char> covered(static_cast<std::size_t>(c.space.size()), 0);
    for (int i = 0; i < c.size(); ++i) {
        const auto& m = c.members[static_cast<std::size_t>(i)];
        if (!std::is_sorted(m.begin(), m.end()) || std::adjacent_find(m.begin(), m.end()) != m.end())
            out.push_back({"sorted", "member " + std::to_string(i)});
        if (!c.space.is_open(m)) {
            out.push_back({"open", "member " + std::to_string(i)});
            continue;
        }
        for (int x : m) covered[static_cast<std::size_t>(x)] = 1;
    }
    for (int x = 0; x < c.space.size(); ++x)
        if (!covered[static_cast<std::size_t>(x)]) out.push_back({"union", "point " + c.space.name(x) + " is not covered"});
    return out;
}

Cover maximal_cover(const FiniteSpace& x) {
    Cover c{x, {}};
    for (int p : x.maximal_points()) c.members.push_back(x.down_set(p));
    return c;
}

Cover pseudocircle_cover() { return maximal_cover(FiniteSpace::pseudocircle()); }

Cover sphere_cover() { return maximal_cover(FiniteSpace::tetrahedron_boundary()); }

std::string nerve_key(const FiniteSpace& x, const NervePoint& pt) { return x.name(pt.point) + "|" + join(pt.indices); }

NervePoint parse_nerve_key(const FiniteSpace& x, const std::string& key) {
    auto bar = key.rfind('|');
    if (bar == std::string::npos) throw std::invalid_argument("nerve key without '|': " + key);
    NervePoint pt{x.index(key.substr(0, bar)), {}};
    std::stringstream ss(key.substr(bar + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != item.size() || item.empty()) throw std::invalid_argument("bad nerve index in " + key);
        pt.indices.push_back(v);
    }
    if (pt.indices.empty()) throw std::invalid_argument("nerve key without indices: " + key);
    return pt;
}

std::vector<NervePoint> build_nerve(const Cover& c, int p) {
    if (p < 0) throw std::invalid_argument("nerve level must be non-negative");
    std::vector<NervePoint> out;
    for (int x = 0; x < c.space.size(); ++x) {
        std::vector<int> charts;
        for (int i = 0; i < c.size(); ++i)
            if (std::binary_search(c.members[static_cast<std::size_t>(i)].begin(), c.members[static_cast<std::size_t>(i)].end(), x))
                charts.push_back(i);
        for_each_tuple(static_cast<int>(charts.size()), p + 1, [&](std::span<const int> t) {
            NervePoint pt{x, {}};
            for (int k : t) pt.indices.push_back(charts[static_cast<std::size_t>(k)]);
            out.push_back(std::move(pt));
        });
    }
    return out;
}

NervePoint nerve_pullback(const MonotoneMap& f, const NervePoint& pt) {
    if (pt.level() != f.target) throw std::invalid_argument("nerve point level differs from the map target");
    NervePoint out{pt.point, {}};
    for (int v : f.values) out.indices.push_back(pt.indices[static_cast<std::size_t>(v)]);
    return out;
}

Nerve::Nerve(Cover c) : cover_(std::move(c)) {
    if (auto v = validate_cover(cover_); !v.empty()) throw std::invalid_argument("invalid cover: " + v.front().axiom + " " + v.front().witness);
}

std::size_t Nerve::tuple_index(std::span<const int> indices, int m) {
    std::size_t t = 0;
    for (int i : indices) t = t * static_cast<std::size_t>(m) + static_cast<std::size_t>(i);
    return t;
}

const Nerve::Level& Nerve::level(int p) const {
    std::lock_guard lock(mutex_);
    if (auto it = levels_.find(p); it != levels_.end()) return it->second;
    if (p < 0) throw std::invalid_argument("nerve level must be non-negative");
    Level lv;
    const int m = cover_.size();
    lv.cell_of.assign(upow(m, p + 1), {});
    for_each_tuple(m, p + 1, [&](std::span<const int> t) {
        auto& slot = lv.cell_of[tuple_index(t, m)];
        slot.assign(static_cast<std::size_t>(cover_.space.size()), -1);
        for (auto& comp : cover_.space.components(cover_.intersection(t))) {
            for (int x : comp) slot[static_cast<std::size_t>(x)] = static_cast<int>(lv.cells.size());
            lv.cells.push_back({std::vector<int>(t.begin(), t.end()), std::move(comp)});
        }
    });
    return levels_.emplace(p, std::move(lv)).first->second;
}

const std::vector<NerveCell>& Nerve::cells(int p) const { return level(p).cells; }

int Nerve::cell_of(const NervePoint& pt) const {
    const Level& lv = level(pt.level());
    for (int i : pt.indices)
        if (i < 0 || i >= cover_.size()) throw std::out_of_range("chart index out of range");
    int c = lv.cell_of[tuple_index(pt.indices, cover_.size())][static_cast<std::size_t>(pt.point)];
    if (c < 0) throw std::invalid_argument("point " + nerve_key(cover_.space, pt) + " is not in the nerve");
    return c;
}

const std::vector<int>& Nerve::pullback_table(const MonotoneMap& f) const {
    std::lock_guard lock(mutex_);
    if (auto it = pullbacks_.find(f); it != pullbacks_.end()) return it->second;
    const auto& target = cells(f.target);
    const Level& src = level(f.source);
    std::vector<int> table;
    table.reserve(target.size());
    std::vector<int> idx;
    for (const auto& c : target) {
        idx.clear();
        for (int v : f.values) idx.push_back(c.indices[static_cast<std::size_t>(v)]);
        table.push_back(src.cell_of[tuple_index(idx, cover_.size())][static_cast<std::size_t>(c.points.front())]);
    }
    return pullbacks_.emplace(f, std::move(table)).first->second;
}

// ---------------------------------------------------------------- sheaves and Cech cohomology

SheafData constant_sheaf(const FiniteSpace& x, int dim) {
    SheafData f{std::vector<int>(static_cast<std::size_t>(x.size()), dim), {}};
    for (int a = 0; a < x.size(); ++a)
        for (int b = 0; b < x.size(); ++b)
            if (a != b && x.leq(a, b)) f.restrictions[{a, b}] = Matrix::identity(dim);
    return f;
}

std::vector<Violation> validate_sheaf(const FiniteSpace& x, const SheafData& f) {
    std::vector<Violation> out;
    if (f.stalk_dims.size() != static_cast<std::size_t>(x.size())) {
        out.push_back({"shape", "one stalk per point"});
        return out;
    }
    auto dim = [&](int p) { return f.stalk_dims[static_cast<std::size_t>(p)]; };
    for (const auto& [key, m] : f.restrictions) {
        auto [a, b] = key;
        if (a < 0 || b < 0 || a >= x.size() || b >= x.size() || a == b || !x.leq(a, b))
            out.push_back({"domain", "restriction " + std::to_string(a) + "<" + std::to_string(b) + " is not along the order"});
        else if (m.rows() != dim(a) || m.cols() != dim(b))
            out.push_back({"shape", "restriction " + x.name(a) + "<" + x.name(b)});
    }
    if (!out.empty()) return out;
    for (int a = 0; a < x.size(); ++a)
        for (int b = 0; b < x.size(); ++b) {
            if (a == b || !x.leq(a, b)) continue;
            if (!f.restrictions.contains({a, b})) {
                out.push_back({"domain", "missing restriction " + x.name(a) + "<" + x.name(b)});
                continue;
            }
            for (int c = 0; c < x.size(); ++c) {
                if (c == b || !x.leq(b, c) || !f.restrictions.contains({b, c}) || !f.restrictions.contains({a, c})) continue;
                if (f.restrictions.at({a, b}) * f.restrictions.at({b, c}) != f.restrictions.at({a, c}))
                    out.push_back({"functoriality", x.name(a) + "<" + x.name(b) + "<" + x.name(c)});
            }
        }
    return out;
}

Matrix sections(const FiniteSpace& x, const SheafData& f, std::span<const int> open) {
    std::vector<int> offset;
    int total = 0;
    for (int p : open) {
        offset.push_back(total);
        total += f.stalk_dims[static_cast<std::size_t>(p)];
    }
    std::vector<Vec> rows;
    for (std::size_t i = 0; i < open.size(); ++i)
        for (std::size_t j = 0; j < open.size(); ++j) {
            int a = open[i], b = open[j];
            if (a == b || !x.leq(a, b)) continue;
            const Matrix& r = f.restrictions.at({a, b});
            for (int k = 0; k < r.rows(); ++k) {
                Vec row(static_cast<std::size_t>(total));
                row[static_cast<std::size_t>(offset[i] + k)] = 1;
                for (int l = 0; l < r.cols(); ++l) row[static_cast<std::size_t>(offset[j] + l)] -= r(k, l);
                rows.push_back(std::move(row));
            }
        }
    if (rows.empty()) return Matrix::identity(total);
    return Matrix::from_columns(nullspace(Matrix::from_rows(rows, total)), total);
}

namespace {

// Offsets of the product of stalks over all U_I at one Cech level.
struct Ambient {
    std::map<std::pair<std::vector<int>, int>, int> offset;
    int total = 0;
};

Ambient ambient(const Cover& c, const SheafData& f, int p) {
    Ambient a;
    for_each_tuple(c.size(), p + 1, [&](std::span<const int> t) {
        std::vector<int> idx(t.begin(), t.end());
        for (int x : c.intersection(t)) {
            a.offset[{idx, x}] = a.total;
            a.total += f.stalk_dims[static_cast<std::size_t>(x)];
        }
    });
    return a;
}

// d of an ambient vector at level p.
Vec apply_cech(const SheafData& f, int p, const Ambient& src, const Ambient& dst, std::span<const Rational> v) {
    Vec out(static_cast<std::size_t>(dst.total));
    for (const auto& [key, off] : dst.offset) {
        const auto& [idx, x] = key;
        int dim = f.stalk_dims[static_cast<std::size_t>(x)];
        for (int i = 0; i <= p + 1; ++i) {
            int s = src.offset.at({remove_position(idx, i), x});
            for (int k = 0; k < dim; ++k) {
                if (i % 2) out[static_cast<std::size_t>(off + k)] -= v[static_cast<std::size_t>(s + k)];
                else out[static_cast<std::size_t>(off + k)] += v[static_cast<std::size_t>(s + k)];
            }
        }
    }
    return out;
}

SparseRank::Row sparse_row(std::span<const Rational> v) {
    SparseRank::Row row;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (!v[i].is_zero()) row.emplace_back(static_cast<int>(i), v[i]);
    return row;
}

}  // namespace

Matrix cech_differential(const Cover& c, const SheafData& f, int p) {
    Ambient src = ambient(c, f, p), dst = ambient(c, f, p + 1);
    Matrix m(dst.total, src.total);
    for (int j = 0; j < src.total; ++j) {
        Vec e(static_cast<std::size_t>(src.total));
        e[static_cast<std::size_t>(j)] = 1;
        m.set_column(j, apply_cech(f, p, src, dst, e));
    }
    return m;
}

std::vector<int> cech_cohomology(const Cover& c, const SheafData& f, int n_max) {
    if (auto v = validate_sheaf(c.space, f); !v.empty()) throw std::invalid_argument("invalid sheaf: " + v.front().axiom);
    std::vector<int> dims, ranks;
    std::map<std::vector<int>, Matrix> section_cache;
    for (int p = 0; p <= n_max; ++p) {
        Ambient src = ambient(c, f, p), dst = ambient(c, f, p + 1);
        SparseRank rank;
        int dim = 0;
        for_each_tuple(c.size(), p + 1, [&](std::span<const int> t) {
            std::vector<int> u = c.intersection(t);
            if (u.empty()) return;
            auto it = section_cache.find(u);
            if (it == section_cache.end()) it = section_cache.emplace(u, sections(c.space, f, u)).first;
            const Matrix& basis = it->second;
            std::vector<int> idx(t.begin(), t.end());
            int base = src.offset.at({idx, u.front()});
            for (int j = 0; j < basis.cols(); ++j) {
                Vec v(static_cast<std::size_t>(src.total));
                for (int k = 0; k < basis.rows(); ++k) v[static_cast<std::size_t>(base + k)] = basis(k, j);
                rank.insert(sparse_row(apply_cech(f, p, src, dst, v)));
                ++dim;
            }
        });
        dims.push_back(dim);
        ranks.push_back(rank.rank());
    }
    std::vector<int> h;
    for (int p = 0; p <= n_max; ++p) h.push_back(dims[static_cast<std::size_t>(p)] - ranks[static_cast<std::size_t>(p)] - (p ? ranks[static_cast<std::size_t>(p - 1)] : 0));
    return h;
}

// ---------------------------------------------------------------- descent data

NerveFunction constant_function(const Cover& c, int level, const RElement& value) {
    NerveFunction f;
    for (auto& pt : build_nerve(c, level)) f.emplace(std::move(pt), value);
    return f;
}

DescentDatum make_descent_datum(Cover c, int order, NerveFunction a01, NerveFunction a012, FinAlgebra fiber) {
    DescentDatum d{std::move(c), order, std::move(fiber), std::move(a01), std::move(a012), {}};
    for (auto& pt : build_nerve(d.cover, 0)) {
        auto it = d.a012.find({pt.point, {pt.indices[0], pt.indices[0], pt.indices[0]}});
        if (it == d.a012.end() || !it->second.is_unit()) continue;
        d.unit.emplace(std::move(pt), r_invert(it->second));
    }
    return d;
}

DescentDatum trivial_datum(Cover c, int order, FinAlgebra fiber) {
    NerveFunction a01 = constant_function(c, 1, RElement(order, 1));
    NerveFunction a012 = constant_function(c, 2, RElement(order, 1));
    return make_descent_datum(std::move(c), order, std::move(a01), std::move(a012), std::move(fiber));
}

NerveFunction multiplicative_coboundary(const Cover& c, const NerveFunction& phi, int level) {
    NerveFunction out;
    for (auto& pt : build_nerve(c, level + 1)) {
        std::optional<RElement> acc;
        for (int i = 0; i <= level + 1; ++i) {
            RElement v = power(lookup(phi, {pt.point, remove_position(pt.indices, i)}, c.space, "function"), i % 2 ? -1 : 1);
            acc = acc ? *acc * v : v;
        }
        out.emplace(std::move(pt), std::move(*acc));
    }
    return out;
}

NerveFunction sign_cocycle(const Cover& c, int order, std::array<int, 3> charts) {
    std::sort(charts.begin(), charts.end());
    NerveFunction out;
    for (auto& pt : build_nerve(c, 2)) {
        std::vector<int> s = pt.indices;
        std::sort(s.begin(), s.end());
        bool hit = std::equal(s.begin(), s.end(), charts.begin());
        out.emplace(std::move(pt), RElement(order, hit ? -1 : 1));
    }
    return out;
}

namespace {

void check_function(const Cover& c, int order, const NerveFunction& f, int level, const std::string& name,
                    std::vector<Violation>& out) {
    const FiniteSpace& x = c.space;
    auto expected = build_nerve(c, level);
    std::set<NervePoint> domain(expected.begin(), expected.end());
    for (const auto& pt : expected)
        if (!f.contains(pt)) out.push_back({"domain", name + " is undefined at " + nerve_key(x, pt)});
    for (const auto& [pt, v] : f) {
        if (!domain.contains(pt)) {
            out.push_back({"domain", name + " is defined off the nerve at " + nerve_key(x, pt)});
            continue;
        }
        if (v.order() != order) out.push_back({"order", name + " at " + nerve_key(x, pt)});
        else if (!v.is_unit()) out.push_back({"invertibility", name + " at " + nerve_key(x, pt)});
    }
    for (const auto& [pt, v] : f) {
        if (!domain.contains(pt)) continue;
        for (int y = 0; y < x.size(); ++y) {
            if (y == pt.point || !x.leq(y, pt.point)) continue;
            auto it = f.find({y, pt.indices});
            if (it != f.end() && it->second != v)
                out.push_back({"section", name + " differs between " + nerve_key(x, pt) + " and " + nerve_key(x, it->first)});
        }
    }
}

}  // namespace

std::vector<Violation> validate_descent_datum(const DescentDatum& d) {
    std::vector<Violation> out = validate_cover(d.cover);
    if (!out.empty()) return out;
    if (d.order < 1) return {{"order", "truncation order must be positive"}};
    for (auto& v : validate_algebra(d.fiber)) out.push_back({"fiber " + v.axiom, v.witness});
    check_function(d.cover, d.order, d.a01, 1, "a01", out);
    check_function(d.cover, d.order, d.a012, 2, "a012", out);
    check_function(d.cover, d.order, d.unit, 0, "unit", out);
    if (!out.empty()) return out;
    const FiniteSpace& x = d.cover.space;
    auto a = [&](int p, int i, int j, int k) -> const RElement& { return d.a012.at({p, {i, j, k}}); };
    for (const auto& pt : build_nerve(d.cover, 3)) {
        int p = pt.point, i = pt.indices[0], j = pt.indices[1], k = pt.indices[2], l = pt.indices[3];
        if (a(p, i, j, k) * a(p, i, k, l) != a(p, j, k, l) * a(p, i, j, l))
            out.push_back({"associativity", nerve_key(x, pt)});
    }
    const RElement one(d.order, 1);
    for (const auto& pt : build_nerve(d.cover, 1)) {
        int p = pt.point, i = pt.indices[0], j = pt.indices[1];
        if (d.unit.at({p, {i}}) * a(p, i, i, j) != one) out.push_back({"unit_left", nerve_key(x, pt)});
        if (a(p, i, j, j) * d.unit.at({p, {j}}) != one) out.push_back({"unit_right", nerve_key(x, pt)});
    }
    return out;
}

NerveFunction effective_cocycle(const DescentDatum& d) {
    NerveFunction frame = multiplicative_coboundary(d.cover, d.a01, 1);
    NerveFunction out;
    for (const auto& [pt, v] : d.a012) out.emplace(pt, v * frame.at(pt));
    return out;
}

namespace {

std::map<mpz_class, int> factor(mpz_class n) {
    std::map<mpz_class, int> out;
    if (n < 0) n = -n;
    for (mpz_class p = 2; p * p <= n; ++p)
        while (n % p == 0) {
            ++out[p];
            n /= p;
        }
    if (n > 1) ++out[n];
    return out;
}

int valuation(mpz_class n, const mpz_class& p) {
    int v = 0;
    if (n < 0) n = -n;
    while (n != 0 && n % p == 0) {
        n /= p;
        ++v;
    }
    return v;
}

Rational mpz_power(const mpz_class& p, int e) {
    Rational r = 1, base = Rational::parse(p.get_str());
    for (int i = 0; i < std::abs(e); ++i) r *= base;
    return e < 0 ? r.inverse() : r;
}

}  // namespace

TwistedFormClass twisted_form_class(const DescentDatum& d) {
    if (auto v = validate_descent_datum(d); !v.empty())
        throw std::invalid_argument("invalid descent datum: " + v.front().axiom + " " + v.front().witness);
    TwistedFormClass out;
    out.cocycle = effective_cocycle(d);
    Nerve nerve(d.cover);
    const auto& cells1 = nerve.cells(1);
    const auto& cells2 = nerve.cells(2);
    const int rows = static_cast<int>(cells2.size()), cols = static_cast<int>(cells1.size());
    std::vector<std::vector<int>> m(static_cast<std::size_t>(rows), std::vector<int>(static_cast<std::size_t>(cols), 0));
    for (int r = 0; r < rows; ++r)
        for (int i = 0; i <= 2; ++i)
            m[static_cast<std::size_t>(r)][static_cast<std::size_t>(nerve.pull_cell(MonotoneMap::face(1, i), r))] += i % 2 ? -1 : 1;
    std::vector<RElement> value;
    for (const auto& c : cells2) value.push_back(out.cocycle.at({c.points.front(), c.indices}));

    auto functional = [](const auto& y) {
        Vec f;
        for (const auto& v : y) {
            if constexpr (std::is_same_v<std::decay_t<decltype(v)>, mpz_class>) f.push_back(Rational::parse(v.get_str()));
            else f.push_back(Rational(static_cast<int>(v)));
        }
        return f;
    };

    // Sign part over GF(2).
    std::vector<std::vector<std::uint8_t>> m2(static_cast<std::size_t>(rows), std::vector<std::uint8_t>(static_cast<std::size_t>(cols)));
    std::vector<std::uint8_t> b2(static_cast<std::size_t>(rows));
    for (int r = 0; r < rows; ++r) {
        for (int j = 0; j < cols; ++j) m2[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)] = static_cast<std::uint8_t>(std::abs(m[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)]) % 2);
        b2[static_cast<std::size_t>(r)] = value[static_cast<std::size_t>(r)][0].sign() < 0 ? 1 : 0;
    }
    auto sign_solution = solve_gf2(m2, b2);
    if (!sign_solution.solution) {
        Rational dot = 0;
        for (int r = 0; r < rows; ++r)
            if (sign_solution.certificate[static_cast<std::size_t>(r)] && b2[static_cast<std::size_t>(r)]) dot += 1;
        out.obstructions.push_back({"sign", functional(sign_solution.certificate), 2, dot});
    }

    // One integer system per prime.
    std::set<mpz_class> primes;
    for (const auto& v : value) {
        for (auto& [p, e] : factor(v[0].numerator())) primes.insert(p);
        for (auto& [p, e] : factor(v[0].denominator())) primes.insert(p);
    }
    std::vector<std::vector<mpz_class>> mz(static_cast<std::size_t>(rows), std::vector<mpz_class>(static_cast<std::size_t>(cols)));
    for (int r = 0; r < rows; ++r)
        for (int j = 0; j < cols; ++j) mz[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)] = m[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)];
    std::vector<Rational> constants(static_cast<std::size_t>(cols), Rational(1));
    for (const auto& p : primes) {
        std::vector<mpz_class> b(static_cast<std::size_t>(rows));
        for (int r = 0; r < rows; ++r)
            b[static_cast<std::size_t>(r)] = valuation(value[static_cast<std::size_t>(r)][0].numerator(), p) -
                                             valuation(value[static_cast<std::size_t>(r)][0].denominator(), p);
        auto sol = solve_integer(mz, b);
        if (!sol.solution) {
            mpz_class dot = 0;
            for (int r = 0; r < rows; ++r) dot += sol.certificate[static_cast<std::size_t>(r)] * b[static_cast<std::size_t>(r)];
            out.obstructions.push_back({"prime " + p.get_str(), functional(sol.certificate), Rational::parse(sol.modulus.get_str()),
                                        Rational::parse(dot.get_str())});
            continue;
        }
        for (int j = 0; j < cols; ++j)
            constants[static_cast<std::size_t>(j)] *= mpz_power(p, static_cast<int>((*sol.solution)[static_cast<std::size_t>(j)].get_si()));
    }
    if (sign_solution.solution)
        for (int j = 0; j < cols; ++j)
            if ((*sign_solution.solution)[static_cast<std::size_t>(j)]) constants[static_cast<std::size_t>(j)] = -constants[static_cast<std::size_t>(j)];

    // Unipotent part through the logarithm.
    Matrix mq(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int j = 0; j < cols; ++j) mq(r, j) = m[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)];
    std::vector<RElement> logs(static_cast<std::size_t>(cols), RElement(d.order));
    for (int t = 1; t < d.order; ++t) {
        Vec b(static_cast<std::size_t>(rows));
        for (int r = 0; r < rows; ++r) {
            const RElement& v = value[static_cast<std::size_t>(r)];
            b[static_cast<std::size_t>(r)] = r_log(v * v[0].inverse())[t];
        }
        auto sol = solve(mq, b);
        if (!sol.solution) {
            Rational dot = 0;
            for (int r = 0; r < rows; ++r) dot += sol.certificate[static_cast<std::size_t>(r)] * b[static_cast<std::size_t>(r)];
            out.obstructions.push_back({"log t^" + std::to_string(t), sol.certificate, 0, dot});
            continue;
        }
        for (int j = 0; j < cols; ++j) logs[static_cast<std::size_t>(j)][t] = (*sol.solution)[static_cast<std::size_t>(j)];
    }
    out.trivial = out.obstructions.empty();
    if (!out.trivial) return out;

    NerveFunction phi;
    for (auto& pt : build_nerve(d.cover, 1)) {
        auto j = static_cast<std::size_t>(nerve.cell_of(pt));
        phi.emplace(std::move(pt), r_exp(logs[j]) * constants[j]);
    }
    if (multiplicative_coboundary(d.cover, phi, 1) != out.cocycle)
        throw std::logic_error("trivialization does not reproduce the cocycle");
    out.trivialization = std::move(phi);
    return out;
}

// ---------------------------------------------------------------- matrix algebras

CellTwist CellTwist::trivial(int p) { return CellTwist(p, std::vector<Rational>(upow(p + 1, 3), Rational(1))); }

CellTwist CellTwist::of(const DescentDatum& d, std::span<const int> indices, int point) {
    if (d.order != 1) throw std::invalid_argument("matrix algebras need the undeformed datum (order 1)");
    const int p = static_cast<int>(indices.size()) - 1;
    std::vector<Rational> values;
    values.reserve(upow(p + 1, 3));
    for (int a = 0; a <= p; ++a)
        for (int b = 0; b <= p; ++b)
            for (int c = 0; c <= p; ++c) {
                NervePoint pt{point, {indices[static_cast<std::size_t>(a)], indices[static_cast<std::size_t>(b)], indices[static_cast<std::size_t>(c)]}};
                values.push_back(lookup(d.a012, pt, d.cover.space, "a012")[0]);
            }
    return CellTwist(p, std::move(values));
}

Vec matrix_multiplication(const CellTwist& tw, const FinAlgebra& fiber) {
    const int p = tw.p(), d = fiber.dim, n = (p + 1) * (p + 1) * d;
    Vec m(upow(n, 3));
    auto basis = [&](int a, int b, int r) { return static_cast<std::size_t>((a * (p + 1) + b) * d + r); };
    for (int a = 0; a <= p; ++a)
        for (int b = 0; b <= p; ++b)
            for (int c = 0; c <= p; ++c)
                for (int r = 0; r < d; ++r)
                    for (int s = 0; s < d; ++s)
                        for (int u = 0; u < d; ++u) {
                            const Rational& x = fiber.m(r, s, u);
                            if (x.is_zero()) continue;
                            m[(basis(a, b, r) * static_cast<std::size_t>(n) + basis(b, c, s)) * static_cast<std::size_t>(n) + basis(a, c, u)] = tw(a, b, c) * x;
                        }
    return m;
}

Vec matrix_unit(const CellTwist& tw, const FinAlgebra& fiber) {
    const int p = tw.p(), d = fiber.dim;
    Vec u(static_cast<std::size_t>((p + 1) * (p + 1) * d));
    for (int i = 0; i <= p; ++i)
        for (int r = 0; r < d; ++r)
            u[static_cast<std::size_t>((i * (p + 1) + i) * d + r)] = tw(i, i, i).inverse() * fiber.unit[static_cast<std::size_t>(r)];
    return u;
}

Vec MatrixAlgebraP::multiplication(int cell) const { return matrix_multiplication(twists.at(static_cast<std::size_t>(cell)), fiber); }

Vec MatrixAlgebraP::unit(int cell) const { return matrix_unit(twists.at(static_cast<std::size_t>(cell)), fiber); }

MatrixAlgebraP matrix_algebra(const DescentDatum& d, const Nerve& nerve, int p) {
    MatrixAlgebraP a{p, d.fiber, nerve.cells(p), {}};
    for (const auto& c : a.cells) a.twists.push_back(CellTwist::of(d, c.indices, c.points.front()));
    return a;
}

std::vector<Violation> validate_matrix_algebra(const MatrixAlgebraP& a) {
    std::vector<Violation> out;
    const int n = a.dim();
    for (std::size_t c = 0; c < a.cells.size(); ++c) {
        FinAlgebra alg{n, a.unit(static_cast<int>(c)), a.multiplication(static_cast<int>(c))};
        std::string where = "cell " + join(a.cells[c].indices) + " at point " + std::to_string(a.cells[c].points.front());
        auto e = [n](int i) {
            Vec v(static_cast<std::size_t>(n));
            v[static_cast<std::size_t>(i)] = 1;
            return v;
        };
        for (int i = 0; i < n; ++i) {
            if (alg.multiply(alg.unit, e(i)) != e(i)) out.push_back({"unit_left", where + ", basis " + std::to_string(i)});
            if (alg.multiply(e(i), alg.unit) != e(i)) out.push_back({"unit_right", where + ", basis " + std::to_string(i)});
        }
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                Vec ij = alg.multiply(e(i), e(j));
                for (int k = 0; k < n; ++k)
                    if (alg.multiply(ij, e(k)) != alg.multiply(e(i), alg.multiply(e(j), e(k))))
                        out.push_back({"associativity", where + ", basis " + std::to_string(i) + "," + std::to_string(j) + "," + std::to_string(k)});
            }
    }
    return out;
}

RestrictedAlgebra comb_restrict_algebra(const MonotoneMap& f, const MatrixAlgebraP& source, const MatrixAlgebraP& target,
                                        const Nerve& nerve) {
    if (f.source != source.p || f.target != target.p) throw std::invalid_argument("restriction map does not match the algebras");
    RestrictedAlgebra out{f, {}, {}, {}};
    const int p = source.p;
    for (std::size_t c = 0; c < target.cells.size(); ++c) {
        const CellTwist& tw = target.twists[c];
        std::vector<Rational> values;
        for (int a = 0; a <= p; ++a)
            for (int b = 0; b <= p; ++b)
                for (int e = 0; e <= p; ++e) values.push_back(tw(f(a), f(b), f(e)));
        out.multiplication.push_back(matrix_multiplication(CellTwist(p, std::move(values)), target.fiber));
        out.source_cell.push_back(nerve.pull_cell(f, static_cast<int>(c)));
        out.iso.push_back(Matrix::identity(source.dim()));
    }
    return out;
}

// ---------------------------------------------------------------- local cochains

std::size_t local_dim(int p, int d, int arity) {
    if (arity < 0) return 0;
    return upow(p + 1, arity + 1) * upow(d, arity + 1);
}

std::vector<int> path_of(int p, int arity, std::size_t index) {
    std::vector<int> path(static_cast<std::size_t>(arity + 1));
    for (int k = arity; k >= 0; --k) {
        path[static_cast<std::size_t>(k)] = static_cast<int>(index % static_cast<std::size_t>(p + 1));
        index /= static_cast<std::size_t>(p + 1);
    }
    return path;
}

std::size_t path_index(int p, std::span<const int> path) {
    std::size_t idx = 0;
    for (int v : path) idx = idx * static_cast<std::size_t>(p + 1) + static_cast<std::size_t>(v);
    return idx;
}

int path_filtration(std::span<const int> path) {
    std::set<int> image(path.begin(), path.end());
    return static_cast<int>(image.size()) - 1;
}

void local_bracket_into(int p, int d, int n1, std::span<const Rational> a, int n2, std::span<const Rational> b,
                        std::span<Rational> out) {
    const int n = n1 + n2 - 1;
    if (n < 0 || out.empty()) return;
    const std::size_t t1 = upow(d, n1 + 1), t2 = upow(d, n2 + 1), t = upow(d, n + 1);
    const std::size_t paths = upow(p + 1, n + 1);
    const bool swap_sign = (n1 - 1) * (n2 - 1) % 2 != 0;
    std::vector<int> path, outer, inner;
    // out^P += sign * (x o_pos y)^P for x of arity nx, y of arity ny
    auto insert = [&](int nx, std::span<const Rational> x, std::size_t tx, int ny, std::span<const Rational> y,
                      std::size_t ty, int pos, const Rational& sign, std::span<Rational> o) {
        outer.assign(path.begin(), path.begin() + pos + 1);
        outer.insert(outer.end(), path.begin() + pos + ny, path.end());
        inner.assign(path.begin() + pos, path.begin() + pos + ny + 1);
        compose_at(d, nx, x.subspan(path_index(p, outer) * tx, tx), ny, y.subspan(path_index(p, inner) * ty, ty), pos, sign, o);
    };
    for (std::size_t pi = 0; pi < paths; ++pi) {
        path = path_of(p, n, pi);
        auto o = out.subspan(pi * t, t);
        for (int pos = 0; pos < n1; ++pos)
            insert(n1, a, t1, n2, b, t2, pos, (pos * (n2 - 1)) % 2 ? Rational(-1) : Rational(1), o);
        for (int pos = 0; pos < n2; ++pos) {
            bool neg = ((pos * (n1 - 1)) % 2 != 0) != !swap_sign;
            insert(n2, b, t2, n1, a, t1, pos, neg ? Rational(-1) : Rational(1), o);
        }
    }
}

Vec local_product(const CellTwist& tw, const FinAlgebra& fiber) {
    const int p = tw.p(), d = fiber.dim;
    const std::size_t t = upow(d, 3);
    Vec m(local_dim(p, d, 2));
    for (int a = 0; a <= p; ++a)
        for (int b = 0; b <= p; ++b)
            for (int c = 0; c <= p; ++c) {
                std::size_t base = static_cast<std::size_t>((a * (p + 1) + b) * (p + 1) + c) * t;
                for (std::size_t k = 0; k < t; ++k) m[base + k] = tw(a, b, c) * fiber.mult[k];
            }
    return m;
}

namespace {

// Position of local entry (path, tensor) inside the full cochain on Mat^p tensor J.
template <class F>
void for_each_local_entry(int p, int d, int arity, F&& f) {
    const int big = (p + 1) * (p + 1) * d;
    const std::size_t t = upow(d, arity + 1);
    std::vector<int> inputs(static_cast<std::size_t>(arity));
    for (std::size_t pi = 0; pi < upow(p + 1, arity + 1); ++pi) {
        auto path = path_of(p, arity, pi);
        for (std::size_t ti = 0; ti < t; ++ti) {
            std::size_t rest = ti;
            int u = static_cast<int>(rest % static_cast<std::size_t>(d));
            rest /= static_cast<std::size_t>(d);
            for (int s = arity - 1; s >= 0; --s) {
                int r = static_cast<int>(rest % static_cast<std::size_t>(d));
                rest /= static_cast<std::size_t>(d);
                inputs[static_cast<std::size_t>(s)] = (path[static_cast<std::size_t>(s)] * (p + 1) + path[static_cast<std::size_t>(s + 1)]) * d + r;
            }
            int output = (path.front() * (p + 1) + path.back()) * d + u;
            f(pi * t + ti, cochain_offset(big, inputs, output));
        }
    }
}

}  // namespace

Vec embed_local(int p, int d, int arity, std::span<const Rational> x) {
    const int big = (p + 1) * (p + 1) * d;
    Vec out(upow(big, arity + 1));
    for_each_local_entry(p, d, arity, [&](std::size_t local, std::size_t full) { out[full] = x[local]; });
    return out;
}

Vec extract_local(int p, int d, int arity, std::span<const Rational> x) {
    Vec out(local_dim(p, d, arity));
    for_each_local_entry(p, d, arity, [&](std::size_t local, std::size_t full) { out[local] = x[full]; });
    Vec back = embed_local(p, d, arity, out);
    for (std::size_t i = 0; i < back.size(); ++i)
        if (back[i] != x[i]) throw std::invalid_argument("cochain has a non-local entry at index " + std::to_string(i));
    return out;
}

Vec comb_restrict_cochain(const MonotoneMap& f, int d, int arity, std::span<const Rational> x) {
    const int p = f.source, q = f.target;
    if (x.size() != local_dim(q, d, arity)) throw std::invalid_argument("cochain size does not match the target level");
    const std::size_t t = upow(d, arity + 1);
    Vec out(local_dim(p, d, arity));
    std::vector<int> image;
    for (std::size_t pi = 0; pi < upow(p + 1, arity + 1); ++pi) {
        image.clear();
        for (int v : path_of(p, arity, pi)) image.push_back(f(v));
        std::copy_n(x.begin() + static_cast<std::ptrdiff_t>(path_index(q, image) * t), t, out.begin() + static_cast<std::ptrdiff_t>(pi * t));
    }
    return out;
}

Vec filtration_project(int p, int d, int arity, std::span<const Rational> x, int s, bool graded) {
    const std::size_t t = upow(d, arity + 1);
    Vec out(x.begin(), x.end());
    for (std::size_t pi = 0; pi < upow(p + 1, arity + 1); ++pi) {
        int sp = path_filtration(path_of(p, arity, pi));
        if (sp < s || (graded && sp != s)) std::fill_n(out.begin() + static_cast<std::ptrdiff_t>(pi * t), t, Rational(0));
    }
    return out;
}

Vec cotrace(const CellTwist& tw, const FinAlgebra& fiber, int arity, std::span<const Rational> d) {
    const int p = tw.p(), dim = fiber.dim;
    const std::size_t t = upow(dim, arity + 1);
    if (d.size() != t) throw std::invalid_argument("cochain size does not match its arity");
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
            for (int k = 0; k < dim; ++k)
                if (fiber.m(i, j, k) != fiber.m(j, i, k)) throw std::invalid_argument("cotrace needs a commutative fiber");
    for (std::size_t ti = 0; ti < t; ++ti) {
        std::size_t rest = ti / static_cast<std::size_t>(dim);
        for (int s = 0; s < arity; ++s, rest /= static_cast<std::size_t>(dim))
            if (rest % static_cast<std::size_t>(dim) == 0 && !d[ti].is_zero())
                throw std::invalid_argument("cotrace needs a normalized cochain");
    }
    Vec out(local_dim(p, dim, arity));
    for (std::size_t pi = 0; pi < upow(p + 1, arity + 1); ++pi) {
        auto path = path_of(p, arity, pi);
        Rational coeff = 1;
        if (arity == 0) coeff = tw(path[0], path[0], path[0]).inverse();
        for (int r = 2; r <= arity; ++r) coeff *= tw(path[0], path[static_cast<std::size_t>(r - 1)], path[static_cast<std::size_t>(r)]);
        for (std::size_t ti = 0; ti < t; ++ti) out[pi * t + ti] = coeff * d[ti];
    }
    return out;
}

// ---------------------------------------------------------------- block products

LocalDglaProduct::LocalDglaProduct(FinAlgebra fiber, int arity_cap, std::vector<CellTwist> twists)
    : fiber_(std::move(fiber)), arity_cap_(arity_cap), twists_(std::move(twists)) {
    if (arity_cap_ < 0) throw std::invalid_argument("arity cap must be non-negative");
    for (int deg = -1; deg <= arity_cap_ - 1; ++deg) {
        std::vector<std::size_t> off{0};
        for (const auto& tw : twists_) off.push_back(off.back() + local_dim(tw.p(), fiber_.dim, deg + 1));
        offsets_.push_back(std::move(off));
    }
    for (const auto& tw : twists_)
        if (!products_.contains(tw)) products_.emplace(tw, local_product(tw, fiber_));
}

int LocalDglaProduct::dim(int degree) const {
    if (degree < -1 || degree > max_degree()) return 0;
    return static_cast<int>(offsets_[static_cast<std::size_t>(degree + 1)].back());
}

std::size_t LocalDglaProduct::block_offset(int degree, int block) const {
    return offsets_.at(static_cast<std::size_t>(degree + 1))[static_cast<std::size_t>(block)];
}

std::size_t LocalDglaProduct::block_dim(int degree, int block) const {
    return block_offset(degree, block + 1) - block_offset(degree, block);
}

void LocalDglaProduct::bracket_into(int da, std::span<const Rational> a, int db, std::span<const Rational> b,
                                    std::span<Rational> out) const {
    if (out.empty() || da < -1 || db < -1 || da > max_degree() || db > max_degree()) return;
    const int dc = da + db;
    for (int k = 0; k < blocks(); ++k)
        local_bracket_into(twists_[static_cast<std::size_t>(k)].p(), fiber_.dim, da + 1,
                           a.subspan(block_offset(da, k), block_dim(da, k)), db + 1,
                           b.subspan(block_offset(db, k), block_dim(db, k)),
                           out.subspan(block_offset(dc, k), block_dim(dc, k)));
}

void LocalDglaProduct::differential_into(int degree, std::span<const Rational> a, std::span<Rational> out) const {
    if (out.empty()) return;
    for (int k = 0; k < blocks(); ++k) {
        const CellTwist& tw = twists_[static_cast<std::size_t>(k)];
        local_bracket_into(tw.p(), fiber_.dim, 2, products_.at(tw), degree + 1,
                           a.subspan(block_offset(degree, k), block_dim(degree, k)),
                           out.subspan(block_offset(degree + 1, k), block_dim(degree + 1, k)));
    }
}

// ---------------------------------------------------------------- the cosimplicial DGLA

std::size_t g_component_dim(const Nerve& nerve, int d, const DeltaSimplex& lambda, int arity) {
    return nerve.cells(lambda.object(lambda.dim())).size() * local_dim(lambda.object(0), d, arity);
}

std::vector<std::size_t> transport_indices(const Nerve& nerve, int d, int arity, const DeltaSimplex& lambda,
                                           const MonotoneMap& f) {
    const int n = lambda.dim(), m = f.source;
    if (f.target != n) throw std::invalid_argument("structure map target differs from the simplex dimension");
    const MonotoneMap first = lambda.map(0, f(0));
    const MonotoneMap last = lambda.map(f(m), n);
    const int p = lambda.object(0), q = first.target;
    const auto& table = nerve.pullback_table(last);
    const std::size_t paths = upow(p + 1, arity + 1), src_paths = upow(q + 1, arity + 1), t = upow(d, arity + 1);
    std::vector<std::size_t> path_map(paths);
    std::vector<int> image;
    for (std::size_t pi = 0; pi < paths; ++pi) {
        image.clear();
        for (int v : path_of(p, arity, pi)) image.push_back(first(v));
        path_map[pi] = path_index(q, image);
    }
    std::vector<std::size_t> out;
    out.reserve(table.size() * paths * t);
    for (int src_cell : table)
        for (std::size_t pi = 0; pi < paths; ++pi)
            for (std::size_t ti = 0; ti < t; ++ti)
                out.push_back((static_cast<std::size_t>(src_cell) * src_paths + path_map[pi]) * t + ti);
    return out;
}

CosimplicialG::CosimplicialG(DescentDatum datum, GCaps caps)
    : datum_(std::move(datum)), caps_(caps), nerve_(std::make_shared<Nerve>(datum_.cover)) {
    if (caps_.n_cap < 0 || caps_.d_cap < 0 || caps_.arity_cap < 0) throw std::invalid_argument("caps must be non-negative");
    if (auto v = validate_descent_datum(datum_); !v.empty())
        throw std::invalid_argument("invalid descent datum: " + v.front().axiom + " " + v.front().witness);
    if (datum_.order != 1) throw std::invalid_argument("G(A) is built from the undeformed datum (order 1)");
}

std::vector<CellTwist> CosimplicialG::twists_of(const DeltaSimplex& lambda) const {
    const MonotoneMap span = lambda.map(0, lambda.dim());
    std::vector<CellTwist> out;
    std::vector<int> k;
    for (const auto& c : nerve_->cells(lambda.object(lambda.dim()))) {
        k.clear();
        for (int v : span.values) k.push_back(c.indices[static_cast<std::size_t>(v)]);
        out.push_back(CellTwist::of(datum_, k, c.points.front()));
    }
    return out;
}

const CosimplicialG::LevelData& CosimplicialG::level_data(int n) const {
    std::lock_guard lock(mutex_);
    if (auto it = levels_.find(n); it != levels_.end()) return it->second;
    if (n < 0 || n > caps_.n_cap) throw std::out_of_range("level " + std::to_string(n) + " exceeds n_cap " + std::to_string(caps_.n_cap));
    LevelData lv;
    for_each_simplex(n, caps_.d_cap, [&](const DeltaSimplex& s) { lv.simplices.push_back(s); });
    std::vector<CellTwist> twists;
    for (std::size_t i = 0; i < lv.simplices.size(); ++i) {
        lv.index.emplace(lv.simplices[i].key(), static_cast<int>(i));
        lv.first_block.push_back(static_cast<int>(twists.size()));
        auto tw = twists_of(lv.simplices[i]);
        twists.insert(twists.end(), tw.begin(), tw.end());
    }
    lv.first_block.push_back(static_cast<int>(twists.size()));
    lv.model = std::make_unique<LocalDglaProduct>(datum_.fiber, caps_.arity_cap, std::move(twists));
    return levels_.emplace(n, std::move(lv)).first->second;
}

const LocalDglaProduct& CosimplicialG::product(int n) const { return *level_data(n).model; }

const std::vector<DeltaSimplex>& CosimplicialG::simplices(int n) const { return level_data(n).simplices; }

int CosimplicialG::simplex_index(const DeltaSimplex& lambda) const {
    const auto& idx = level_data(lambda.dim()).index;
    auto it = idx.find(lambda.key());
    if (it == idx.end()) throw std::out_of_range("simplex exceeds the object cap");
    return it->second;
}

int CosimplicialG::first_block(int n, int s) const { return level_data(n).first_block.at(static_cast<std::size_t>(s)); }

LocalDglaProduct CosimplicialG::factor(const DeltaSimplex& lambda) const {
    if (lambda.max_object() > caps_.d_cap) throw std::out_of_range("simplex exceeds the object cap");
    return LocalDglaProduct(datum_.fiber, caps_.arity_cap, twists_of(lambda));
}

const std::vector<std::size_t>& CosimplicialG::gather(const MonotoneMap& f, int degree) const {
    std::lock_guard lock(mutex_);
    auto key = std::make_pair(f, degree);
    if (auto it = gathers_.find(key); it != gathers_.end()) return it->second;
    const LevelData& dst = level_data(f.target);
    const LevelData& src = level_data(f.source);
    std::vector<std::size_t> out;
    out.reserve(static_cast<std::size_t>(dst.model->dim(degree)));
    for (std::size_t s = 0; s < dst.simplices.size(); ++s) {
        const DeltaSimplex& lambda = dst.simplices[s];
        int mu = src.index.at(lambda.pullback(f).key());
        std::size_t base = src.model->block_offset(degree, src.first_block[static_cast<std::size_t>(mu)]);
        for (std::size_t j : transport_indices(*nerve_, datum_.fiber.dim, degree + 1, lambda, f)) out.push_back(base + j);
    }
    return gathers_.emplace(key, std::move(out)).first->second;
}

Vec CosimplicialG::push(const MonotoneMap& f, int degree, std::span<const Rational> x) const {
    validate_monotone(f);
    if (degree < -1 || degree > caps_.arity_cap - 1) return {};
    if (x.size() != static_cast<std::size_t>(product(f.source).dim(degree)))
        throw std::invalid_argument("vector size does not match the source level");
    const auto& g = gather(f, degree);
    Vec out;
    out.reserve(g.size());
    for (std::size_t j : g) out.push_back(x[j]);
    return out;
}

std::string CosimplicialG::locate(int n, int degree, int coordinate) const {
    const LevelData& lv = level_data(n);
    int block = 0;
    while (block + 1 < lv.model->blocks() && lv.model->block_offset(degree, block + 1) <= static_cast<std::size_t>(coordinate)) ++block;
    int s = static_cast<int>(std::upper_bound(lv.first_block.begin(), lv.first_block.end(), block) - lv.first_block.begin()) - 1;
    const DeltaSimplex& lambda = lv.simplices[static_cast<std::size_t>(s)];
    const auto& cell = nerve_->cells(lambda.object(n))[static_cast<std::size_t>(block - lv.first_block[static_cast<std::size_t>(s)])];
    std::size_t local = static_cast<std::size_t>(coordinate) - lv.model->block_offset(degree, block);
    std::size_t t = upow(datum_.fiber.dim, degree + 1);
    std::string objs;
    for (int o : lambda.objects()) objs += std::to_string(o);
    return "simplex " + objs + " cell " + join(cell.indices) + " path " + join(path_of(lambda.object(0), degree + 1, local / t)) +
           " entry " + std::to_string(local % t);
}

// ---------------------------------------------------------------- lazy cochains and the homotopy

GCochain::GCochain(std::shared_ptr<const Nerve> nerve, int fiber_dim, int degree, int arity, int object_cap, Eval eval)
    : nerve_(std::move(nerve)), fiber_dim_(fiber_dim), degree_(degree), arity_(arity), object_cap_(object_cap),
      memo_(std::make_shared<Memo>()) {
    memo_->eval = std::move(eval);
}

Vec GCochain::operator()(const DeltaSimplex& lambda) const {
    if (lambda.dim() != degree_) throw std::invalid_argument("simplex dimension differs from the cochain degree");
    if (lambda.max_object() > object_cap_) throw std::out_of_range("simplex exceeds the object cap " + std::to_string(object_cap_));
    auto key = lambda.key();
    {
        std::lock_guard lock(memo_->mutex);
        if (auto it = memo_->values.find(key); it != memo_->values.end()) return it->second;
    }
    Vec value = memo_->eval(lambda);
    if (value.size() != g_component_dim(*nerve_, fiber_dim_, lambda, arity_))
        throw std::logic_error("cochain value has the wrong dimension");
    std::lock_guard lock(memo_->mutex);
    return memo_->values.emplace(std::move(key), std::move(value)).first->second;
}

GCochain random_g_cochain(std::shared_ptr<const Nerve> nerve, int fiber_dim, int degree, int arity, int object_cap,
                          std::uint64_t seed, int min_filtration) {
    const Nerve* nv = nerve.get();
    return GCochain(std::move(nerve), fiber_dim, degree, arity, object_cap,
                    [nv, fiber_dim, arity, seed, min_filtration](const DeltaSimplex& lambda) {
                        std::uint64_t h = seed;
                        for (int x : lambda.key()) h = (h ^ static_cast<std::uint64_t>(x + 7)) * 1099511628211ULL;
                        Rng rng(h);
                        const int p = lambda.object(0);
                        const std::size_t t = upow(fiber_dim, arity + 1), paths = upow(p + 1, arity + 1);
                        Vec out(g_component_dim(*nv, fiber_dim, lambda, arity));
                        for (std::size_t i = 0; i < out.size(); ++i)
                            if (path_filtration(path_of(p, arity, (i / t) % paths)) >= min_filtration) out[i] = rng.rational(3, 2);
                        return out;
                    });
}

GCochain g_differential(const GCochain& x) {
    return GCochain(x.nerve(), x.fiber_dim(), x.degree() + 1, x.arity(), x.object_cap(), [x](const DeltaSimplex& lambda) {
        const int n = x.degree();
        Vec out(g_component_dim(*x.nerve(), x.fiber_dim(), lambda, x.arity()));
        for (int i = 0; i <= n + 1; ++i) {
            MonotoneMap f = MonotoneMap::face(n, i);
            Vec v = x(lambda.pullback(f));
            auto idx = transport_indices(*x.nerve(), x.fiber_dim(), x.arity(), lambda, f);
            for (std::size_t j = 0; j < out.size(); ++j) {
                if (i % 2) out[j] -= v[idx[j]];
                else out[j] += v[idx[j]];
            }
        }
        return out;
    });
}

GCochain acyclicity_homotopy(const GCochain& x) {
    if (x.degree() < 1) throw std::invalid_argument("the homotopy starts in degree 1");
    return GCochain(x.nerve(), x.fiber_dim(), x.degree() - 1, x.arity(), x.object_cap(), [x](const DeltaSimplex& mu) {
        const int k = x.arity(), p = mu.object(0);
        const std::size_t t = upow(x.fiber_dim(), k + 1), paths = upow(p + 1, k + 1);
        const std::size_t cells = x.nerve()->cells(mu.object(mu.dim())).size();
        Vec out(cells * paths * t);
        std::map<std::vector<int>, Vec> lifted;
        for (std::size_t pi = 0; pi < paths; ++pi) {
            auto path = path_of(p, k, pi);
            std::vector<int> e(path.begin(), path.end());
            std::sort(e.begin(), e.end());
            e.erase(std::unique(e.begin(), e.end()), e.end());
            const int s = static_cast<int>(e.size()) - 1;
            auto it = lifted.find(e);
            if (it == lifted.end()) {
                std::vector<int> objects{s};
                objects.insert(objects.end(), mu.objects().begin(), mu.objects().end());
                std::vector<MonotoneMap> arrows{MonotoneMap{s, p, SmallInts(e.begin(), e.end())}};
                arrows.insert(arrows.end(), mu.arrows().begin(), mu.arrows().end());
                it = lifted.emplace(e, x(DeltaSimplex(std::move(objects), std::move(arrows)))).first;
            }
            std::vector<int> inner;
            for (int v : path) inner.push_back(static_cast<int>(std::lower_bound(e.begin(), e.end(), v) - e.begin()));
            const std::size_t src_paths = upow(s + 1, k + 1), ii = path_index(s, inner);
            for (std::size_t c = 0; c < cells; ++c)
                std::copy_n(it->second.begin() + static_cast<std::ptrdiff_t>((c * src_paths + ii) * t), t,
                            out.begin() + static_cast<std::ptrdiff_t>((c * paths + pi) * t));
        }
        return out;
    });
}

GCochain g_filtration(const GCochain& x, int s, bool graded) {
    return GCochain(x.nerve(), x.fiber_dim(), x.degree(), x.arity(), x.object_cap(), [x, s, graded](const DeltaSimplex& lambda) {
        Vec v = x(lambda);
        const int p = lambda.object(0);
        const std::size_t block = local_dim(p, x.fiber_dim(), x.arity());
        Vec out;
        for (std::size_t c = 0; c < v.size() / block; ++c) {
            auto part = filtration_project(p, x.fiber_dim(), x.arity(), std::span<const Rational>(v).subspan(c * block, block), s, graded);
            out.insert(out.end(), part.begin(), part.end());
        }
        return out;
    });
}

std::vector<int> g_cohomology(const Nerve& nerve, int fiber_dim, int arity, int object_cap, int p_max) {
    struct LevelLayout {
        std::vector<DeltaSimplex> simplices;
        std::map<std::vector<int>, std::size_t> offset;
        std::size_t total = 0;
    };
    std::vector<LevelLayout> levels;
    for (int n = 0; n <= p_max + 1; ++n) {
        LevelLayout lv;
        for_each_simplex(n, object_cap, [&](const DeltaSimplex& s) {
            lv.offset.emplace(s.key(), lv.total);
            lv.total += g_component_dim(nerve, fiber_dim, s, arity);
            lv.simplices.push_back(s);
        });
        levels.push_back(std::move(lv));
    }
    std::vector<int> ranks;
    for (int n = 0; n <= p_max; ++n) {
        SparseRank rank;
        const LevelLayout& src = levels[static_cast<std::size_t>(n)];
        for (const auto& lambda : levels[static_cast<std::size_t>(n + 1)].simplices) {
            std::vector<std::vector<std::size_t>> idx;
            std::vector<std::size_t> base;
            for (int i = 0; i <= n + 1; ++i) {
                MonotoneMap f = MonotoneMap::face(n, i);
                idx.push_back(transport_indices(nerve, fiber_dim, arity, lambda, f));
                base.push_back(src.offset.at(lambda.pullback(f).key()));
            }
            for (std::size_t j = 0; j < idx.front().size(); ++j) {
                std::map<int, Rational> entries;
                for (int i = 0; i <= n + 1; ++i)
                    entries[static_cast<int>(base[static_cast<std::size_t>(i)] + idx[static_cast<std::size_t>(i)][j])] += i % 2 ? -1 : 1;
                SparseRank::Row row;
                for (auto& [col, v] : entries)
                    if (!v.is_zero()) row.emplace_back(col, v);
                if (!row.empty()) rank.insert(std::move(row));
            }
        }
        ranks.push_back(rank.rank());
    }
    std::vector<int> h;
    for (int n = 0; n <= p_max; ++n)
        h.push_back(static_cast<int>(levels[static_cast<std::size_t>(n)].total) - ranks[static_cast<std::size_t>(n)] -
                    (n ? ranks[static_cast<std::size_t>(n - 1)] : 0));
    return h;
}

}  // namespace deform
