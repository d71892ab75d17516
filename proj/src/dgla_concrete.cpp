#include "deform/dgla.hpp"

#include <sstream>
#include <stdexcept>

namespace deform {

Dgla::Dgla(std::map<int, int> dims) : dims_(std::move(dims)) {
    for (auto it = dims_.begin(); it != dims_.end();) {
        if (it->second < 0) throw std::invalid_argument("negative dimension");
        if (it->second == 0) {
            it = dims_.erase(it);
            continue;
        }
        if (it->first < -1) throw std::invalid_argument("basis elements below degree -1 are not allowed");
        ++it;
    }
    if (!dims_.empty()) {
        min_ = dims_.begin()->first;
        max_ = dims_.rbegin()->first;
    }
}

int Dgla::dim(int degree) const {
    auto it = dims_.find(degree);
    return it == dims_.end() ? 0 : it->second;
}

void Dgla::set_differential(int degree, Matrix block) {
    if (block.rows() != dim(degree + 1) || block.cols() != dim(degree))
        throw std::invalid_argument("differential block in degree " + std::to_string(degree) + " has the wrong shape");
    if (block.is_zero())
        diff_.erase(degree);
    else
        diff_[degree] = std::move(block);
}

void Dgla::add_bracket(const BracketConstant& b) {
    if (b.i < 0 || b.i >= dim(b.deg_a) || b.j < 0 || b.j >= dim(b.deg_b) || b.k < 0 || b.k >= dim(b.deg_a + b.deg_b))
        throw std::out_of_range("bracket constant index outside the basis");
    if (b.c.is_zero()) return;
    auto& list = brackets_[{b.deg_a, b.deg_b}];
    for (auto& e : list)
        if (e.i == b.i && e.j == b.j && e.k == b.k) {
            e.c += b.c;
            return;
        }
    list.push_back(b);
}

void Dgla::add_bracket_antisym(int deg_a, int i, int deg_b, int j, int k, const Rational& c) {
    add_bracket({i, j, k, deg_a, deg_b, c});
    if (deg_a == deg_b && i == j) return;
    Rational sign = (deg_a * deg_b) % 2 == 0 ? -1 : 1;
    add_bracket({j, i, k, deg_b, deg_a, sign * c});
}

void Dgla::bracket_into(int da, std::span<const Rational> a, int db, std::span<const Rational> b,
                        std::span<Rational> out) const {
    auto it = brackets_.find({da, db});
    if (it == brackets_.end()) return;
    for (const auto& e : it->second) {
        const Rational& x = a[static_cast<std::size_t>(e.i)];
        if (x.is_zero()) continue;
        const Rational& y = b[static_cast<std::size_t>(e.j)];
        if (y.is_zero()) continue;
        out[static_cast<std::size_t>(e.k)].add_product(e.c * x, y);
    }
}

void Dgla::differential_into(int degree, std::span<const Rational> a, std::span<Rational> out) const {
    auto it = diff_.find(degree);
    if (it == diff_.end()) return;
    const Matrix& m = it->second;
    for (int j = 0; j < m.cols(); ++j) {
        if (a[static_cast<std::size_t>(j)].is_zero()) continue;
        for (int i = 0; i < m.rows(); ++i) out[static_cast<std::size_t>(i)].add_product(m(i, j), a[static_cast<std::size_t>(j)]);
    }
}

std::vector<BracketConstant> Dgla::bracket_constants() const {
    std::vector<BracketConstant> all;
    for (const auto& [key, list] : brackets_) all.insert(all.end(), list.begin(), list.end());
    return all;
}

Dgla Dgla::change_basis(const std::map<int, Matrix>& p) const {
    // New coordinates x' relate to old ones by x = P x'.
    std::map<int, Matrix> p_inv;
    for (const auto& [deg, m] : p) {
        if (m.rows() != dim(deg) || m.cols() != dim(deg)) throw std::invalid_argument("basis change has the wrong shape");
        auto inv = inverse(m);
        if (!inv) throw std::invalid_argument("basis change is singular");
        p_inv[deg] = std::move(*inv);
    }
    auto mat = [&](const std::map<int, Matrix>& src, int deg) {
        auto it = src.find(deg);
        return it == src.end() ? Matrix::identity(dim(deg)) : it->second;
    };
    Dgla out(dims_);
    for (int deg = min_; deg <= max_; ++deg) {
        if (dim(deg) == 0 || dim(deg + 1) == 0) continue;
        Matrix d(dim(deg + 1), dim(deg));
        auto it = diff_.find(deg);
        if (it != diff_.end()) d = it->second;
        out.set_differential(deg, mat(p_inv, deg + 1) * d * mat(p, deg));
    }
    for (int da = min_; da <= max_; ++da)
        for (int db = min_; db <= max_; ++db) {
            int dc = da + db;
            if (dim(da) == 0 || dim(db) == 0 || dim(dc) == 0) continue;
            Matrix pa = mat(p, da), pb = mat(p, db), pc = mat(p_inv, dc);
            for (int i = 0; i < dim(da); ++i)
                for (int j = 0; j < dim(db); ++j) {
                    Vec out_old(static_cast<std::size_t>(dim(dc)));
                    bracket_into(da, pa.column(i), db, pb.column(j), out_old);
                    Vec out_new = pc.apply(out_old);
                    for (int k = 0; k < dim(dc); ++k) out.add_bracket({i, j, k, da, db, out_new[static_cast<std::size_t>(k)]});
                }
        }
    return out;
}

Dgla materialize(const DglaModel& g) {
    std::map<int, int> dims;
    for (int deg = g.min_degree(); deg <= g.max_degree(); ++deg) dims[deg] = g.dim(deg);
    Dgla out(dims);
    for (int deg = g.min_degree(); deg <= g.max_degree(); ++deg) {
        if (g.dim(deg) == 0 || g.dim_or_zero(deg + 1) == 0) continue;
        out.set_differential(deg, differential_matrix(g, deg));
    }
    for (int da = g.min_degree(); da <= g.max_degree(); ++da)
        for (int db = g.min_degree(); db <= g.max_degree(); ++db) {
            int dc = da + db;
            if (g.dim(da) == 0 || g.dim(db) == 0 || g.dim_or_zero(dc) == 0) continue;
            for (int i = 0; i < g.dim(da); ++i)
                for (int j = 0; j < g.dim(db); ++j) {
                    Vec a(static_cast<std::size_t>(g.dim(da))), b(static_cast<std::size_t>(g.dim(db))), c(static_cast<std::size_t>(g.dim(dc)));
                    a[static_cast<std::size_t>(i)] = 1;
                    b[static_cast<std::size_t>(j)] = 1;
                    g.bracket_into(da, a, db, b, c);
                    for (int k = 0; k < g.dim(dc); ++k) out.add_bracket({i, j, k, da, db, c[static_cast<std::size_t>(k)]});
                }
        }
    return out;
}

Matrix differential_matrix(const DglaModel& g, int degree) {
    int rows = g.dim_or_zero(degree + 1), cols = g.dim_or_zero(degree);
    Matrix m(rows, cols);
    if (rows == 0) return m;
    for (int j = 0; j < cols; ++j) {
        Vec e(static_cast<std::size_t>(cols)), out(static_cast<std::size_t>(rows));
        e[static_cast<std::size_t>(j)] = 1;
        g.differential_into(degree, e, out);
        m.set_column(j, out);
    }
    return m;
}

namespace {

Vec unit_vec(int dim, int i) {
    Vec v(static_cast<std::size_t>(dim));
    v[static_cast<std::size_t>(i)] = 1;
    return v;
}

Vec br(const DglaModel& g, int da, const Vec& a, int db, const Vec& b) {
    Vec out(static_cast<std::size_t>(g.dim_or_zero(da + db)));
    if (!out.empty() && !a.empty() && !b.empty()) g.bracket_into(da, a, db, b, out);
    return out;
}

Vec dd(const DglaModel& g, int deg, const Vec& a) {
    Vec out(static_cast<std::size_t>(g.dim_or_zero(deg + 1)));
    if (!out.empty() && !a.empty()) g.differential_into(deg, a, out);
    return out;
}

Vec sum(Vec a, const Vec& b, const Rational& s = 1) {
    axpy(a, s, b);
    return a;
}

std::string basis_name(int deg, int i) { return "e" + std::to_string(i) + "@" + std::to_string(deg); }

}  // namespace

std::vector<Violation> validate_dgla(const DglaModel& g) {
    std::vector<Violation> out;
    int lo = g.min_degree(), hi = g.max_degree();
    if (lo < -1 && g.dim(lo) > 0) out.push_back({"degree_bound", "basis in degree " + std::to_string(lo)});
    for (int a = lo; a <= hi; ++a)
        for (int i = 0; i < g.dim(a); ++i) {
            Vec x = unit_vec(g.dim(a), i);
            if (!is_zero(dd(g, a + 1, dd(g, a, x)))) out.push_back({"d_squared", basis_name(a, i)});
        }
    for (int a = lo; a <= hi; ++a)
        for (int b = lo; b <= hi; ++b)
            for (int i = 0; i < g.dim(a); ++i)
                for (int j = 0; j < g.dim(b); ++j) {
                    Vec x = unit_vec(g.dim(a), i), y = unit_vec(g.dim(b), j);
                    Rational sign = (a * b) % 2 == 0 ? 1 : -1;
                    Vec xy = br(g, a, x, b, y), yx = br(g, b, y, a, x);
                    if (!is_zero(sum(xy, yx, sign)))
                        out.push_back({"antisymmetry", basis_name(a, i) + "," + basis_name(b, j)});
                    Rational lsign = a % 2 == 0 ? 1 : -1;
                    Vec lhs = dd(g, a + b, xy);
                    Vec rhs = sum(br(g, a + 1, dd(g, a, x), b, y), br(g, a, x, b + 1, dd(g, b, y)), lsign);
                    if (!(lhs == rhs)) out.push_back({"leibniz", basis_name(a, i) + "," + basis_name(b, j)});
                }
    for (int a = lo; a <= hi; ++a)
        for (int b = lo; b <= hi; ++b)
            for (int c = lo; c <= hi; ++c) {
                if (g.dim_or_zero(a + b + c) == 0) continue;
                for (int i = 0; i < g.dim(a); ++i)
                    for (int j = 0; j < g.dim(b); ++j)
                        for (int k = 0; k < g.dim(c); ++k) {
                            Vec x = unit_vec(g.dim(a), i), y = unit_vec(g.dim(b), j), z = unit_vec(g.dim(c), k);
                            Vec lhs = br(g, a, x, b + c, br(g, b, y, c, z));
                            Rational sign = (a * b) % 2 == 0 ? 1 : -1;
                            Vec rhs = sum(br(g, a + b, br(g, a, x, b, y), c, z),
                                          br(g, b, y, a + c, br(g, a, x, c, z)), sign);
                            if (!(lhs == rhs))
                                out.push_back({"jacobi", basis_name(a, i) + "," + basis_name(b, j) + "," +
                                                             basis_name(c, k)});
                        }
            }
    return out;
}

std::vector<Vec> cohomology_basis(const DglaModel& g, int degree) {
    int n = g.dim_or_zero(degree);
    if (n == 0) return {};
    Matrix out_d = differential_matrix(g, degree);
    Matrix in_d = differential_matrix(g, degree - 1);
    std::vector<Vec> cycles = nullspace(out_d);
    // Extend a basis of the boundaries by cycles, keeping those that raise the rank.
    std::vector<Vec> chosen = column_space(in_d), classes;
    int r = static_cast<int>(chosen.size());
    for (const auto& z : cycles) {
        chosen.push_back(z);
        if (rank(Matrix::from_columns(chosen, n)) > r) {
            ++r;
            classes.push_back(z);
        } else {
            chosen.pop_back();
        }
    }
    return classes;
}

std::vector<Vec> enumerate_first_order_classes(const DglaModel& g) { return cohomology_basis(g, 1); }

}  // namespace deform
