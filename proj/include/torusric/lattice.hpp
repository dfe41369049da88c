#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <vector>

namespace torusric {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
using IntVec = std::vector<BigInt>;
using RatVec = std::vector<Rational>;

// Dense row-major integer matrix with exact entries.
class IntMatrix {
public:
    IntMatrix() = default;
    IntMatrix(std::size_t rows, std::size_t cols);
    static IntMatrix identity(std::size_t n);
    static IntMatrix from_rows(const std::vector<std::vector<long long>>& rows);
    static IntMatrix from_columns(const std::vector<IntVec>& cols);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    BigInt& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const BigInt& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    IntVec column(std::size_t j) const;
    IntVec row(std::size_t i) const;
    IntMatrix transpose() const;

    void swap_rows(std::size_t a, std::size_t b);
    void swap_cols(std::size_t a, std::size_t b);
    // row_a += k * row_b
    void add_row(std::size_t a, std::size_t b, const BigInt& k);
    void add_col(std::size_t a, std::size_t b, const BigInt& k);
    void negate_row(std::size_t a);
    void negate_col(std::size_t a);

    bool operator==(const IntMatrix& o) const = default;
    std::string str() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<BigInt> data_;
};

IntMatrix operator*(const IntMatrix& a, const IntMatrix& b);
IntVec operator*(const IntMatrix& a, const IntVec& v);
RatVec operator*(const IntMatrix& a, const RatVec& v);

// Exact determinant of a square matrix (fraction-free Bareiss elimination).
BigInt determinant(const IntMatrix& a);

struct SnfDecomposition {
    IntMatrix U;  // n x n, unimodular
    IntMatrix S;  // n x m, diagonal
    IntMatrix V;  // m x m, unimodular
    std::vector<BigInt> invariant_factors;  // length min(n, m), non-negative
    std::size_t rank = 0;
};

struct KernelLattice {
    std::vector<RatVec> real_kernel_basis;
    std::vector<IntVec> integer_kernel_basis;
    std::size_t rank() const { return integer_kernel_basis.size(); }
};

SnfDecomposition smith_normal_form(const IntMatrix& a);

// Row-style Hermite normal form of the rows of `a`, used to give kernel bases a
// canonical shape. Zero rows are dropped.
IntMatrix hermite_rows(const IntMatrix& a);

KernelLattice integer_kernel(const IntMatrix& a);

BigInt gcd_of(const IntVec& v);
bool is_primitive(const IntVec& a);
IntVec primitive_part(const IntVec& a);

// gcd of all 2x2 minors of [a b]; zero iff a, b are dependent.
BigInt minor_gcd(const IntVec& a, const IntVec& b);
bool legality_pair(const IntVec& a, const IntVec& b);

// Returns w with A w = y. Integral whenever A is onto Z^n and y is integral.
RatVec solve_preimage(const IntMatrix& a, const IntVec& y);

IntVec to_intvec(const std::vector<long long>& v);
std::vector<long long> to_ll(const IntVec& v);
std::string vec_str(const IntVec& v);

}  // namespace torusric
