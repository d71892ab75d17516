#pragma once

#include "deform/rational.hpp"

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace deform {

using Vec = std::vector<Rational>;

// A failed structural check: which law, and where.
struct Violation {
    std::string axiom;
    std::string witness;
};

bool is_zero(std::span<const Rational> v);
void axpy(std::span<Rational> y, const Rational& a, std::span<const Rational> x);  // y += a x

// Dense row-major rational matrix.
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {}
    static Matrix identity(int n);
    static Matrix from_rows(const std::vector<Vec>& rows, int cols);
    static Matrix from_columns(const std::vector<Vec>& cols, int rows);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    Rational& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(j)]; }
    const Rational& operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(j)]; }
    std::span<Rational> row(int i) { return {data_.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(cols_), static_cast<std::size_t>(cols_)}; }
    std::span<const Rational> row(int i) const {
        return {data_.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(cols_), static_cast<std::size_t>(cols_)};
    }
    Vec column(int j) const;
    void set_column(int j, std::span<const Rational> v);

    Matrix transpose() const;
    bool is_zero() const;
    Vec apply(std::span<const Rational> x) const;
    friend Matrix operator*(const Matrix& a, const Matrix& b);
    friend Matrix operator+(Matrix a, const Matrix& b);
    friend Matrix operator-(Matrix a, const Matrix& b);
    friend bool operator==(const Matrix&, const Matrix&) = default;

    // Horizontal and vertical block concatenation.
    static Matrix hcat(const Matrix& a, const Matrix& b);
    static Matrix vcat(const Matrix& a, const Matrix& b);

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<Rational> data_;
};

struct Echelon {
    Matrix reduced;           // reduced row echelon form
    std::vector<int> pivots;  // pivot column of each nonzero row
};

Echelon rref(Matrix m);
int rank(const Matrix& m);
// Same result as rank(); row eliminations below each pivot run in parallel.
int rank_parallel(const Matrix& m);
std::vector<Vec> nullspace(const Matrix& m);
std::optional<Matrix> inverse(const Matrix& m);
// Basis of the column space, taken from the pivot columns of m.
std::vector<Vec> column_space(const Matrix& m);

// Solution of A x = b with free variables set to zero, or a certificate y
// with y^T A = 0 and y^T b != 0 when the system is inconsistent.
struct SolveResult {
    std::optional<Vec> solution;
    Vec certificate;
};
SolveResult solve(const Matrix& a, std::span<const Rational> b);

// Incremental rank of a sparse row set; rows are reduced against stored pivots on insertion.
class SparseRank {
public:
    using Row = std::vector<std::pair<int, Rational>>;  // sorted by column
    // Returns true when the row was independent of the ones already inserted.
    bool insert(Row row);
    int rank() const { return static_cast<int>(pivot_rows_.size()); }

private:
    std::map<int, Row> pivot_rows_;  // keyed by leading column, leading entry normalized to 1
};

// Integer system A x = b, solved through the Smith form U A V = D.
struct IntegerSolveResult {
    std::optional<std::vector<mpz_class>> solution;
    // On failure: y with y^T A = 0 (modulus 0) or y^T A = 0 mod modulus, and y^T b nonzero (mod modulus).
    std::vector<mpz_class> certificate;
    mpz_class modulus;
};
struct SmithForm {
    std::vector<std::vector<mpz_class>> u, d, v;
};
SmithForm smith_form(const std::vector<std::vector<mpz_class>>& a);
IntegerSolveResult solve_integer(const std::vector<std::vector<mpz_class>>& a, const std::vector<mpz_class>& b);

// System over GF(2); certificate y with y^T A = 0 and y^T b = 1 on failure.
struct Gf2SolveResult {
    std::optional<std::vector<std::uint8_t>> solution;
    std::vector<std::uint8_t> certificate;
};
Gf2SolveResult solve_gf2(const std::vector<std::vector<std::uint8_t>>& a, const std::vector<std::uint8_t>& b);

}  // namespace deform
