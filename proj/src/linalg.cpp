#include "deform/linalg.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace deform {

bool is_zero(std::span<const Rational> v) {
    return std::all_of(v.begin(), v.end(), [](const Rational& x) { return x.is_zero(); });
}

void axpy(std::span<Rational> y, const Rational& a, std::span<const Rational> x) {
    if (a.is_zero()) return;
    for (std::size_t i = 0; i < y.size(); ++i) y[i].add_product(a, x[i]);
}

Matrix Matrix::identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

Matrix Matrix::from_rows(const std::vector<Vec>& rows, int cols) {
    Matrix m(static_cast<int>(rows.size()), cols);
    for (int i = 0; i < m.rows_; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return m;
}

Matrix Matrix::from_columns(const std::vector<Vec>& cols, int rows) {
    Matrix m(rows, static_cast<int>(cols.size()));
    for (int j = 0; j < m.cols_; ++j) m.set_column(j, cols[static_cast<std::size_t>(j)]);
    return m;
}

Vec Matrix::column(int j) const {
    Vec v(static_cast<std::size_t>(rows_));
    for (int i = 0; i < rows_; ++i) v[static_cast<std::size_t>(i)] = (*this)(i, j);
    return v;
}

void Matrix::set_column(int j, std::span<const Rational> v) {
    for (int i = 0; i < rows_; ++i) (*this)(i, j) = v[static_cast<std::size_t>(i)];
}

Matrix Matrix::transpose() const {
    Matrix t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

bool Matrix::is_zero() const { return deform::is_zero(data_); }

Vec Matrix::apply(std::span<const Rational> x) const {
    if (static_cast<int>(x.size()) != cols_) throw std::invalid_argument("matrix-vector size mismatch");
    Vec y(static_cast<std::size_t>(rows_));
    for (int j = 0; j < cols_; ++j) {
        if (x[static_cast<std::size_t>(j)].is_zero()) continue;
        for (int i = 0; i < rows_; ++i) y[static_cast<std::size_t>(i)].add_product((*this)(i, j), x[static_cast<std::size_t>(j)]);
    }
    return y;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("matrix product size mismatch");
    Matrix c(a.rows_, b.cols_);
    for (int i = 0; i < a.rows_; ++i)
        for (int k = 0; k < a.cols_; ++k) {
            const Rational& x = a(i, k);
            if (x.is_zero()) continue;
            axpy(c.row(i), x, b.row(k));
        }
    return c;
}

Matrix operator+(Matrix a, const Matrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw std::invalid_argument("matrix sum size mismatch");
    for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i] += b.data_[i];
    return a;
}

Matrix operator-(Matrix a, const Matrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw std::invalid_argument("matrix difference size mismatch");
    for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i] -= b.data_[i];
    return a;
}

Matrix Matrix::hcat(const Matrix& a, const Matrix& b) {
    if (a.rows_ != b.rows_) throw std::invalid_argument("hcat row mismatch");
    Matrix m(a.rows_, a.cols_ + b.cols_);
    for (int i = 0; i < a.rows_; ++i) {
        for (int j = 0; j < a.cols_; ++j) m(i, j) = a(i, j);
        for (int j = 0; j < b.cols_; ++j) m(i, a.cols_ + j) = b(i, j);
    }
    return m;
}

Matrix Matrix::vcat(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.cols_) throw std::invalid_argument("vcat column mismatch");
    Matrix m(a.rows_ + b.rows_, a.cols_);
    for (int i = 0; i < a.rows_; ++i) std::copy(a.row(i).begin(), a.row(i).end(), m.row(i).begin());
    for (int i = 0; i < b.rows_; ++i) std::copy(b.row(i).begin(), b.row(i).end(), m.row(a.rows_ + i).begin());
    return m;
}

Echelon rref(Matrix m) {
    Echelon e;
    int r = 0;
    for (int c = 0; c < m.cols() && r < m.rows(); ++c) {
        int p = r;
        while (p < m.rows() && m(p, c).is_zero()) ++p;
        if (p == m.rows()) continue;
        if (p != r) std::swap_ranges(m.row(p).begin(), m.row(p).end(), m.row(r).begin());
        Rational inv = m(r, c).inverse();
        for (auto& x : m.row(r)) x *= inv;
        for (int i = 0; i < m.rows(); ++i) {
            if (i == r || m(i, c).is_zero()) continue;
            axpy(m.row(i), -m(i, c), m.row(r));
        }
        e.pivots.push_back(c);
        ++r;
    }
    e.reduced = std::move(m);
    return e;
}

int rank(const Matrix& m) { return static_cast<int>(rref(m).pivots.size()); }

int rank_parallel(const Matrix& input) {
    Matrix m = input;
    int rows = m.rows(), r = 0;
    for (int c = 0; c < m.cols() && r < rows; ++c) {
        int p = r;
        while (p < rows && m(p, c).is_zero()) ++p;
        if (p == rows) continue;
        if (p != r) std::swap_ranges(m.row(p).begin(), m.row(p).end(), m.row(r).begin());
        Rational inv = m(r, c).inverse();
#pragma omp parallel for schedule(dynamic, 4)
        for (int i = r + 1; i < rows; ++i) {
            if (m(i, c).is_zero()) continue;
            Rational f = -(m(i, c) * inv);
            auto dst = m.row(i);
            auto src = m.row(r);
            for (int j = c; j < m.cols(); ++j) dst[static_cast<std::size_t>(j)].add_product(f, src[static_cast<std::size_t>(j)]);
        }
        ++r;
    }
    return r;
}

std::vector<Vec> nullspace(const Matrix& m) {
    Echelon e = rref(m);
    std::vector<bool> is_pivot(static_cast<std::size_t>(m.cols()), false);
    for (int c : e.pivots) is_pivot[static_cast<std::size_t>(c)] = true;
    std::vector<Vec> basis;
    for (int f = 0; f < m.cols(); ++f) {
        if (is_pivot[static_cast<std::size_t>(f)]) continue;
        Vec v(static_cast<std::size_t>(m.cols()));
        v[static_cast<std::size_t>(f)] = 1;
        for (std::size_t i = 0; i < e.pivots.size(); ++i) v[static_cast<std::size_t>(e.pivots[i])] = -e.reduced(int(i), f);
        basis.push_back(std::move(v));
    }
    return basis;
}

std::optional<Matrix> inverse(const Matrix& m) {
    if (m.rows() != m.cols()) return std::nullopt;
    Echelon e = rref(Matrix::hcat(m, Matrix::identity(m.rows())));
    int n = m.rows();
    if (static_cast<int>(e.pivots.size()) < n || (n > 0 && e.pivots[static_cast<std::size_t>(n - 1)] >= n)) return std::nullopt;
    Matrix inv(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) inv(i, j) = e.reduced(i, n + j);
    return inv;
}

std::vector<Vec> column_space(const Matrix& m) {
    std::vector<Vec> basis;
    for (int c : rref(m).pivots) basis.push_back(m.column(c));
    return basis;
}

SolveResult solve(const Matrix& a, std::span<const Rational> b) {
    if (static_cast<int>(b.size()) != a.rows()) throw std::invalid_argument("right-hand side size mismatch");
    int n = a.cols(), rows = a.rows();
    Matrix aug(rows, n + 1 + rows);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < n; ++j) aug(i, j) = a(i, j);
        aug(i, n) = b[static_cast<std::size_t>(i)];
        aug(i, n + 1 + i) = 1;
    }
    // Eliminate on the first n columns only, so that the tail records the row operations.
    int r = 0;
    std::vector<int> pivots;
    for (int c = 0; c < n && r < rows; ++c) {
        int p = r;
        while (p < rows && aug(p, c).is_zero()) ++p;
        if (p == rows) continue;
        if (p != r) std::swap_ranges(aug.row(p).begin(), aug.row(p).end(), aug.row(r).begin());
        Rational inv = aug(r, c).inverse();
        for (auto& x : aug.row(r)) x *= inv;
        for (int i = 0; i < rows; ++i) {
            if (i == r || aug(i, c).is_zero()) continue;
            axpy(aug.row(i), -aug(i, c), aug.row(r));
        }
        pivots.push_back(c);
        ++r;
    }
    SolveResult out;
    for (int i = r; i < rows; ++i) {
        if (aug(i, n).is_zero()) continue;
        out.certificate.assign(aug.row(i).begin() + n + 1, aug.row(i).end());
        return out;
    }
    Vec x(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < pivots.size(); ++i) x[static_cast<std::size_t>(pivots[i])] = aug(int(i), n);
    out.solution = std::move(x);
    return out;
}

bool SparseRank::insert(Row row) {
    std::erase_if(row, [](const auto& e) { return e.second.is_zero(); });
    while (!row.empty()) {
        int lead = row.front().first;
        auto it = pivot_rows_.find(lead);
        if (it == pivot_rows_.end()) {
            Rational inv = row.front().second.inverse();
            for (auto& e : row) e.second *= inv;
            pivot_rows_.emplace(lead, std::move(row));
            return true;
        }
        Rational f = -row.front().second;
        const Row& p = it->second;
        Row merged;
        merged.reserve(row.size() + p.size());
        std::size_t i = 0, j = 0;
        while (i < row.size() || j < p.size()) {
            if (j == p.size() || (i < row.size() && row[i].first < p[j].first)) {
                merged.push_back(std::move(row[i++]));
            } else if (i == row.size() || p[j].first < row[i].first) {
                merged.emplace_back(p[j].first, f * p[j].second);
                ++j;
            } else {
                Rational v = std::move(row[i].second);
                v.add_product(f, p[j].second);
                if (!v.is_zero()) merged.emplace_back(row[i].first, std::move(v));
                ++i;
                ++j;
            }
        }
        row = std::move(merged);
    }
    return false;
}

namespace {

using ZMat = std::vector<std::vector<mpz_class>>;

ZMat z_identity(std::size_t n) {
    ZMat m(n, std::vector<mpz_class>(n, 0));
    for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
    return m;
}

void row_add(ZMat& m, std::size_t dst, std::size_t src, const mpz_class& f) {
    for (std::size_t j = 0; j < m[dst].size(); ++j) m[dst][j] += f * m[src][j];
}

void col_add(ZMat& m, std::size_t dst, std::size_t src, const mpz_class& f) {
    for (auto& row : m) row[dst] += f * row[src];
}

void col_swap(ZMat& m, std::size_t a, std::size_t b) {
    for (auto& row : m) std::swap(row[a], row[b]);
}

}  // namespace

SmithForm smith_form(const ZMat& a) {
    std::size_t rows = a.size(), cols = rows ? a[0].size() : 0;
    SmithForm s{z_identity(rows), a, z_identity(cols)};
    ZMat& d = s.d;
    for (std::size_t t = 0; t < std::min(rows, cols); ++t) {
        // choose the smallest nonzero entry in the remaining block as pivot
        bool found = false;
        std::size_t pi = 0, pj = 0;
        for (std::size_t i = t; i < rows; ++i)
            for (std::size_t j = t; j < cols; ++j)
                if (d[i][j] != 0 && (!found || abs(d[i][j]) < abs(d[pi][pj]))) {
                    found = true;
                    pi = i;
                    pj = j;
                }
        if (!found) break;
        std::swap(d[t], d[pi]);
        std::swap(s.u[t], s.u[pi]);
        col_swap(d, t, pj);
        col_swap(s.v, t, pj);
        for (;;) {
            bool dirty = false;
            for (std::size_t i = t + 1; i < rows; ++i) {
                if (d[i][t] == 0) continue;
                mpz_class q;
                mpz_fdiv_q(q.get_mpz_t(), d[i][t].get_mpz_t(), d[t][t].get_mpz_t());
                row_add(d, i, t, -q);
                row_add(s.u, i, t, -q);
                if (d[i][t] != 0) {
                    std::swap(d[t], d[i]);
                    std::swap(s.u[t], s.u[i]);
                    dirty = true;
                }
            }
            for (std::size_t j = t + 1; j < cols; ++j) {
                if (d[t][j] == 0) continue;
                mpz_class q;
                mpz_fdiv_q(q.get_mpz_t(), d[t][j].get_mpz_t(), d[t][t].get_mpz_t());
                col_add(d, j, t, -q);
                col_add(s.v, j, t, -q);
                if (d[t][j] != 0) {
                    col_swap(d, t, j);
                    col_swap(s.v, t, j);
                    dirty = true;
                }
            }
            if (dirty) continue;
            // enforce divisibility of the remaining block by the pivot
            bool fixed = true;
            for (std::size_t i = t + 1; i < rows && fixed; ++i)
                for (std::size_t j = t + 1; j < cols; ++j)
                    if (d[i][j] % d[t][t] != 0) {
                        row_add(d, t, i, 1);
                        row_add(s.u, t, i, 1);
                        fixed = false;
                        break;
                    }
            if (fixed) break;
        }
        if (d[t][t] < 0) {
            for (auto& x : d[t]) x = -x;
            for (auto& x : s.u[t]) x = -x;
        }
    }
    return s;
}

IntegerSolveResult solve_integer(const ZMat& a, const std::vector<mpz_class>& b) {
    std::size_t rows = a.size(), cols = rows ? a[0].size() : 0;
    if (b.size() != rows) throw std::invalid_argument("right-hand side size mismatch");
    SmithForm s = smith_form(a);
    std::vector<mpz_class> c(rows, 0);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < rows; ++j) c[i] += s.u[i][j] * b[j];
    IntegerSolveResult out;
    std::vector<mpz_class> y(cols, 0);
    for (std::size_t i = 0; i < rows; ++i) {
        mpz_class di = i < cols ? s.d[i][i] : mpz_class(0);
        if (di == 0) {
            if (c[i] != 0) {
                out.certificate = s.u[i];
                out.modulus = 0;
                return out;
            }
            continue;
        }
        if (c[i] % di != 0) {
            out.certificate = s.u[i];
            for (auto& x : out.certificate) mpz_fdiv_r(x.get_mpz_t(), x.get_mpz_t(), di.get_mpz_t());
            out.modulus = di;
            return out;
        }
        y[i] = c[i] / di;
    }
    std::vector<mpz_class> x(cols, 0);
    for (std::size_t i = 0; i < cols; ++i)
        for (std::size_t j = 0; j < cols; ++j) x[i] += s.v[i][j] * y[j];
    out.solution = std::move(x);
    return out;
}

Gf2SolveResult solve_gf2(const std::vector<std::vector<std::uint8_t>>& a, const std::vector<std::uint8_t>& b) {
    std::size_t rows = a.size(), cols = rows ? a[0].size() : 0;
    if (b.size() != rows) throw std::invalid_argument("right-hand side size mismatch");
    std::vector<std::vector<std::uint8_t>> m(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        m[i] = a[i];
        m[i].push_back(b[i] & 1);
        for (std::size_t k = 0; k < rows; ++k) m[i].push_back(k == i ? 1 : 0);
        for (std::size_t j = 0; j < cols; ++j) m[i][j] &= 1;
    }
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t p = r;
        while (p < rows && !m[p][c]) ++p;
        if (p == rows) continue;
        std::swap(m[p], m[r]);
        for (std::size_t i = 0; i < rows; ++i)
            if (i != r && m[i][c])
                for (std::size_t j = 0; j < m[i].size(); ++j) m[i][j] ^= m[r][j];
        pivots.push_back(c);
        ++r;
    }
    Gf2SolveResult out;
    for (std::size_t i = r; i < rows; ++i)
        if (m[i][cols]) {
            out.certificate.assign(m[i].begin() + std::ptrdiff_t(cols) + 1, m[i].end());
            return out;
        }
    std::vector<std::uint8_t> x(cols, 0);
    for (std::size_t i = 0; i < pivots.size(); ++i) x[pivots[i]] = m[i][cols];
    out.solution = std::move(x);
    return out;
}

}  // namespace deform
