#include "torusric/lattice.hpp"

#include "torusric/errors.hpp"

#include <algorithm>
#include <sstream>

namespace torusric {

namespace {

BigInt abs_big(const BigInt& v) { return v < 0 ? BigInt(-v) : v; }

// Floor division for signed big integers.
BigInt floor_div(const BigInt& a, const BigInt& b) {
    BigInt q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) q -= 1;
    return q;
}

}  // namespace

IntMatrix::IntMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, BigInt(0)) {}

IntMatrix IntMatrix::identity(std::size_t n) {
    IntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

IntMatrix IntMatrix::from_rows(const std::vector<std::vector<long long>>& rows) {
    if (rows.empty() || rows.front().empty()) throw PreconditionError("IntMatrix: empty matrix");
    IntMatrix m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != m.cols()) throw PreconditionError("IntMatrix: ragged rows");
        for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
    }
    return m;
}

IntMatrix IntMatrix::from_columns(const std::vector<IntVec>& cols) {
    if (cols.empty() || cols.front().empty()) throw PreconditionError("IntMatrix: empty matrix");
    IntMatrix m(cols.front().size(), cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
        if (cols[j].size() != m.rows()) throw PreconditionError("IntMatrix: ragged columns");
        for (std::size_t i = 0; i < m.rows(); ++i) m(i, j) = cols[j][i];
    }
    return m;
}

IntVec IntMatrix::column(std::size_t j) const {
    IntVec v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
}

IntVec IntMatrix::row(std::size_t i) const {
    return IntVec(data_.begin() + static_cast<long>(i * cols_),
                  data_.begin() + static_cast<long>((i + 1) * cols_));
}

IntMatrix IntMatrix::transpose() const {
    IntMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

void IntMatrix::swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t j = 0; j < cols_; ++j) std::swap((*this)(a, j), (*this)(b, j));
}

void IntMatrix::swap_cols(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t i = 0; i < rows_; ++i) std::swap((*this)(i, a), (*this)(i, b));
}

void IntMatrix::add_row(std::size_t a, std::size_t b, const BigInt& k) {
    if (k == 0) return;
    for (std::size_t j = 0; j < cols_; ++j) (*this)(a, j) += k * (*this)(b, j);
}

void IntMatrix::add_col(std::size_t a, std::size_t b, const BigInt& k) {
    if (k == 0) return;
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, a) += k * (*this)(i, b);
}

void IntMatrix::negate_row(std::size_t a) {
    for (std::size_t j = 0; j < cols_; ++j) (*this)(a, j) = -(*this)(a, j);
}

void IntMatrix::negate_col(std::size_t a) {
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, a) = -(*this)(i, a);
}

std::string IntMatrix::str() const {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < rows_; ++i) {
        if (i) os << "; ";
        for (std::size_t j = 0; j < cols_; ++j) os << (j ? " " : "") << (*this)(i, j);
    }
    os << ']';
    return os.str();
}

IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
    if (a.cols() != b.rows()) throw PreconditionError("IntMatrix product: shape mismatch");
    IntMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            if (a(i, k) == 0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += a(i, k) * b(k, j);
        }
    return c;
}

IntVec operator*(const IntMatrix& a, const IntVec& v) {
    if (a.cols() != v.size()) throw PreconditionError("IntMatrix * vector: shape mismatch");
    IntVec out(a.rows(), BigInt(0));
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out[i] += a(i, j) * v[j];
    return out;
}

RatVec operator*(const IntMatrix& a, const RatVec& v) {
    if (a.cols() != v.size()) throw PreconditionError("IntMatrix * vector: shape mismatch");
    RatVec out(a.rows(), Rational(0));
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out[i] += Rational(a(i, j)) * v[j];
    return out;
}

BigInt determinant(const IntMatrix& in) {
    if (in.rows() != in.cols()) throw PreconditionError("determinant: matrix not square");
    const std::size_t n = in.rows();
    if (n == 0) return 1;
    IntMatrix a = in;
    BigInt sign = 1;
    BigInt prev = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a(k, k) == 0) {
            std::size_t p = k + 1;
            while (p < n && a(p, k) == 0) ++p;
            if (p == n) return 0;
            a.swap_rows(k, p);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j)
                a(i, j) = (a(i, j) * a(k, k) - a(i, k) * a(k, j)) / prev;
        prev = a(k, k);
    }
    return sign * a(n - 1, n - 1);
}

SnfDecomposition smith_normal_form(const IntMatrix& a) {
    const std::size_t n = a.rows();
    const std::size_t m = a.cols();
    IntMatrix s = a;
    IntMatrix u = IntMatrix::identity(n);
    IntMatrix v = IntMatrix::identity(m);
    const std::size_t lim = std::min(n, m);
    std::size_t t = 0;
    for (; t < lim; ++t) {
        while (true) {
            // Smallest nonzero entry of the trailing block becomes the pivot.
            std::size_t pi = n, pj = m;
            BigInt best = 0;
            for (std::size_t i = t; i < n; ++i)
                for (std::size_t j = t; j < m; ++j)
                    if (s(i, j) != 0 && (best == 0 || abs_big(s(i, j)) < best)) {
                        best = abs_big(s(i, j));
                        pi = i;
                        pj = j;
                    }
            if (pi == n) break;
            s.swap_rows(t, pi);
            u.swap_rows(t, pi);
            s.swap_cols(t, pj);
            v.swap_cols(t, pj);

            bool reduced = true;
            for (std::size_t i = t + 1; i < n; ++i) {
                if (s(i, t) == 0) continue;
                const BigInt q = floor_div(s(i, t), s(t, t));
                s.add_row(i, t, -q);
                u.add_row(i, t, -q);
                if (s(i, t) != 0) reduced = false;
            }
            for (std::size_t j = t + 1; j < m; ++j) {
                if (s(t, j) == 0) continue;
                const BigInt q = floor_div(s(t, j), s(t, t));
                s.add_col(j, t, -q);
                v.add_col(j, t, -q);
                if (s(t, j) != 0) reduced = false;
            }
            if (!reduced) continue;

            // Pivot must divide the remaining block, otherwise fold in the offending row.
            bool divides = true;
            for (std::size_t i = t + 1; i < n && divides; ++i)
                for (std::size_t j = t + 1; j < m; ++j)
                    if (s(i, j) % s(t, t) != 0) {
                        s.add_row(t, i, 1);
                        u.add_row(t, i, 1);
                        divides = false;
                        break;
                    }
            if (divides) break;
        }
        if (s(t, t) == 0) break;
        if (s(t, t) < 0) {
            s.negate_row(t);
            u.negate_row(t);
        }
    }
    SnfDecomposition out;
    out.rank = t;
    out.invariant_factors.resize(lim);
    for (std::size_t i = 0; i < lim; ++i) out.invariant_factors[i] = s(i, i);
    out.U = std::move(u);
    out.S = std::move(s);
    out.V = std::move(v);
    return out;
}

IntMatrix hermite_rows(const IntMatrix& in) {
    IntMatrix a = in;
    const std::size_t n = a.rows();
    const std::size_t m = a.cols();
    std::size_t r = 0;
    for (std::size_t c = 0; c < m && r < n; ++c) {
        // Euclid on column c among rows r..n-1.
        while (true) {
            std::size_t p = n;
            for (std::size_t i = r; i < n; ++i)
                if (a(i, c) != 0 && (p == n || abs_big(a(i, c)) < abs_big(a(p, c)))) p = i;
            if (p == n) break;
            a.swap_rows(r, p);
            bool done = true;
            for (std::size_t i = r + 1; i < n; ++i) {
                if (a(i, c) == 0) continue;
                a.add_row(i, r, -floor_div(a(i, c), a(r, c)));
                if (a(i, c) != 0) done = false;
            }
            if (done) break;
        }
        if (a(r, c) == 0) continue;
        if (a(r, c) < 0) a.negate_row(r);
        for (std::size_t i = 0; i < r; ++i) a.add_row(i, r, -floor_div(a(i, c), a(r, c)));
        ++r;
    }
    IntMatrix out(r, m);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < m; ++j) out(i, j) = a(i, j);
    return out;
}

KernelLattice integer_kernel(const IntMatrix& a) {
    const SnfDecomposition snf = smith_normal_form(a);
    const std::size_t m = a.cols();
    KernelLattice k;
    if (snf.rank == m) return k;
    IntMatrix basis(m - snf.rank, m);
    for (std::size_t j = snf.rank; j < m; ++j)
        for (std::size_t i = 0; i < m; ++i) basis(j - snf.rank, i) = snf.V(i, j);
    const IntMatrix h = hermite_rows(basis);
    for (std::size_t r = 0; r < h.rows(); ++r) {
        IntVec row = h.row(r);
        k.real_kernel_basis.emplace_back(row.begin(), row.end());
        k.integer_kernel_basis.push_back(std::move(row));
    }
    return k;
}

BigInt gcd_of(const IntVec& v) {
    BigInt g = 0;
    for (const auto& x : v) g = boost::multiprecision::gcd(g, abs_big(x));
    return g;
}

bool is_primitive(const IntVec& a) {
    const BigInt g = gcd_of(a);
    if (g == 0) throw PreconditionError("is_primitive: zero vector generates no circle subgroup");
    return g == 1;
}

IntVec primitive_part(const IntVec& a) {
    const BigInt g = gcd_of(a);
    if (g == 0) throw PreconditionError("primitive_part: zero vector");
    IntVec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] / g;
    return out;
}

BigInt minor_gcd(const IntVec& a, const IntVec& b) {
    if (a.size() != b.size()) throw PreconditionError("minor_gcd: length mismatch");
    BigInt g = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = i + 1; j < a.size(); ++j)
            g = boost::multiprecision::gcd(g, abs_big(a[i] * b[j] - a[j] * b[i]));
    return g;
}

bool legality_pair(const IntVec& a, const IntVec& b) {
    if (!is_primitive(a) || !is_primitive(b))
        throw PreconditionError("legality_pair: weights must be primitive");
    const BigInt g = minor_gcd(a, b);
    if (g == 0)
        throw PreconditionError("legality_pair: dependent weights (isotropy would not be a 2-torus)");
    return g == 1;
}

RatVec solve_preimage(const IntMatrix& a, const IntVec& y) {
    if (y.size() != a.rows()) throw PreconditionError("solve_preimage: rhs length mismatch");
    const SnfDecomposition snf = smith_normal_form(a);
    const IntVec c = snf.U * y;
    RatVec z(a.cols(), Rational(0));
    for (std::size_t i = 0; i < a.rows(); ++i) {
        if (i < snf.rank)
            z[i] = Rational(c[i], snf.invariant_factors[i]);
        else if (c[i] != 0)
            throw InconsistencyError("solve_preimage: right-hand side not in the column span");
    }
    return snf.V * z;
}

IntVec to_intvec(const std::vector<long long>& v) { return IntVec(v.begin(), v.end()); }

std::vector<long long> to_ll(const IntVec& v) {
    std::vector<long long> out;
    out.reserve(v.size());
    for (const auto& x : v) out.push_back(static_cast<long long>(x));
    return out;
}

std::string vec_str(const IntVec& v) {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    os << ')';
    return os.str();
}

}  // namespace torusric
