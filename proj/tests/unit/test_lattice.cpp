#include "../oracles/lattice_oracles.hpp"
#include "torusric/errors.hpp"
#include "torusric/lattice.hpp"

#include <doctest.h>

#include <random>

using namespace torusric;

namespace {

IntMatrix random_matrix(std::mt19937_64& rng, std::size_t n, std::size_t m, int bound) {
    std::uniform_int_distribution<int> d(-bound, bound);
    IntMatrix a(n, m);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) a(i, j) = d(rng);
    return a;
}

void check_snf(const IntMatrix& a) {
    const SnfDecomposition snf = smith_normal_form(a);
    CHECK(snf.U * a * snf.V == snf.S);
    CHECK(abs(determinant(snf.U)) == 1);
    CHECK(abs(determinant(snf.V)) == 1);
    for (std::size_t i = 0; i < snf.S.rows(); ++i)
        for (std::size_t j = 0; j < snf.S.cols(); ++j)
            if (i != j) CHECK(snf.S(i, j) == 0);
    const auto& f = snf.invariant_factors;
    for (std::size_t i = 0; i + 1 < f.size(); ++i) {
        CHECK(f[i] >= 0);
        if (f[i] == 0)
            CHECK(f[i + 1] == 0);
        else
            CHECK(f[i + 1] % f[i] == 0);
    }
}

}  // namespace

TEST_CASE("smith normal form: identity") {
    const SnfDecomposition snf = smith_normal_form(IntMatrix::identity(3));
    CHECK(snf.S == IntMatrix::identity(3));
    CHECK(snf.invariant_factors == std::vector<BigInt>{1, 1, 1});
}

TEST_CASE("smith normal form: diag(2,3) has factors 1, 6") {
    const IntMatrix a = IntMatrix::from_rows({{2, 0}, {0, 3}});
    const SnfDecomposition snf = smith_normal_form(a);
    CHECK(snf.invariant_factors == std::vector<BigInt>{1, 6});
    CHECK(oracle::invariant_factors_by_minors(a) == snf.invariant_factors);
    check_snf(a);
}

TEST_CASE("smith normal form: 2x3 coordinate projection") {
    const IntMatrix a = IntMatrix::from_rows({{1, 0, 0}, {0, 1, 0}});
    const SnfDecomposition snf = smith_normal_form(a);
    CHECK(snf.invariant_factors == std::vector<BigInt>{1, 1});
    CHECK(integer_kernel(a).rank() == 1);
}

TEST_CASE("smith normal form: random matrices against determinantal divisors") {
    std::mt19937_64 rng(20240611);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng() % 5;
        const std::size_t m = 1 + rng() % 8;
        const IntMatrix a = random_matrix(rng, n, m, 5);
        check_snf(a);
        const SnfDecomposition snf = smith_normal_form(a);
        CHECK(snf.U * a * snf.V == snf.S);
        if (n <= 3 && m <= 4) CHECK(oracle::invariant_factors_by_minors(a) == snf.invariant_factors);
    }
}

TEST_CASE("integer kernel: (1,1) gives (1,-1)") {
    const KernelLattice k = integer_kernel(IntMatrix::from_rows({{1, 1}}));
    REQUIRE(k.rank() == 1);
    CHECK(k.integer_kernel_basis[0] == to_intvec({1, -1}));
}

TEST_CASE("integer kernel: (2,2) is saturated") {
    const KernelLattice k = integer_kernel(IntMatrix::from_rows({{2, 2}}));
    REQUIRE(k.rank() == 1);
    CHECK(k.integer_kernel_basis[0] == to_intvec({1, -1}));
    // Every small integer kernel vector is an integer multiple of the basis.
    oracle::for_each_box_vector(2, 4, [&](const IntVec& v) {
        if (2 * v[0] + 2 * v[1] == 0) CHECK(oracle::in_integer_span(k.integer_kernel_basis, v, 8));
    });
}

TEST_CASE("integer kernel: injective map has empty bases") {
    const KernelLattice k = integer_kernel(IntMatrix::identity(4));
    CHECK(k.real_kernel_basis.empty());
    CHECK(k.integer_kernel_basis.empty());
}

TEST_CASE("integer kernel: saturation and enumeration on random small matrices") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 1 + rng() % 2;
        const std::size_t m = n + 1 + rng() % 2;
        const IntMatrix a = random_matrix(rng, n, m, 3);
        const KernelLattice k = integer_kernel(a);
        const SnfDecomposition snf = smith_normal_form(a);
        CHECK(k.rank() == m - snf.rank);
        for (const auto& v : k.integer_kernel_basis) {
            for (const auto& x : a * v) CHECK(x == 0);
        }
        if (k.rank() == 0) continue;
        const IntMatrix basis = IntMatrix::from_columns(k.integer_kernel_basis).transpose();
        for (const auto& f : smith_normal_form(basis).invariant_factors) CHECK(f == 1);
        oracle::for_each_box_vector(m, 2, [&](const IntVec& v) {
            const IntVec img = a * v;
            if (std::all_of(img.begin(), img.end(), [](const BigInt& x) { return x == 0; }))
                CHECK(oracle::in_integer_span(k.integer_kernel_basis, v, 6));
        });
    }
}

TEST_CASE("primitivity") {
    CHECK(is_primitive(to_intvec({1, 0, 0})));
    CHECK_FALSE(is_primitive(to_intvec({2, 4})));
    CHECK(is_primitive(to_intvec({6, 10, 15})));
    CHECK_THROWS_AS(is_primitive(to_intvec({0, 0})), PreconditionError);
}

TEST_CASE("legality of pairs") {
    CHECK(legality_pair(to_intvec({1, 0}), to_intvec({0, 1})));
    CHECK_FALSE(legality_pair(to_intvec({1, 0}), to_intvec({1, 2})));
    CHECK(oracle::common_circle_element(to_intvec({1, 0}), to_intvec({1, 2}), 4).has_value());
    CHECK(legality_pair(to_intvec({2, 1, 0}), to_intvec({1, 1, 0})));
    CHECK_FALSE(oracle::common_circle_element(to_intvec({2, 1, 0}), to_intvec({1, 1, 0}), 4).has_value());
    CHECK_THROWS_AS(legality_pair(to_intvec({1, 1}), to_intvec({-1, -1})), PreconditionError);
}

TEST_CASE("legality agrees with common-element enumeration for small entries") {
    for (std::size_t n = 2; n <= 3; ++n) {
        std::vector<IntVec> prims;
        oracle::for_each_box_vector(n, 3, [&](const IntVec& v) {
            if (gcd_of(v) == 1) prims.push_back(v);
        });
        std::size_t step = n == 2 ? 1 : 7;  // n = 3 has ~300^2 pairs; stride keeps runtime small
        std::size_t count = 0;
        for (std::size_t i = 0; i < prims.size(); ++i)
            for (std::size_t j = (i * 13) % step; j < prims.size(); j += step) {
                if (minor_gcd(prims[i], prims[j]) == 0) continue;
                const long long q = oracle::max_minor(prims[i], prims[j]);
                const bool oracle_legal = !oracle::common_circle_element(prims[i], prims[j], std::max(2LL, q)).has_value();
                CHECK(legality_pair(prims[i], prims[j]) == oracle_legal);
                ++count;
            }
        CHECK(count > 100);
    }
}

TEST_CASE("solve_preimage") {
    const IntVec y = to_intvec({3, -2, 7});
    const RatVec w = solve_preimage(IntMatrix::identity(3), y);
    for (std::size_t i = 0; i < 3; ++i) CHECK(w[i] == Rational(y[i]));

    const RatVec w2 = solve_preimage(IntMatrix::from_rows({{1, 1}}), to_intvec({1}));
    CHECK(w2[0] + w2[1] == 1);
    CHECK(denominator(w2[0]) == 1);

    const IntMatrix id5 = IntMatrix::identity(5);
    for (std::size_t i = 0; i < 5; ++i) {
        const RatVec e = solve_preimage(id5, id5.column(i));
        for (std::size_t k = 0; k < 5; ++k) CHECK(e[k] == (k == i ? 1 : 0));
    }
    CHECK_THROWS_AS(solve_preimage(IntMatrix::from_rows({{1, 0}, {1, 0}}), to_intvec({1, 2})), InconsistencyError);
    // Non-onto map: rational but not integral preimage.
    const RatVec h = solve_preimage(IntMatrix::from_rows({{2, 0}, {0, 1}}), to_intvec({1, 1}));
    CHECK(h[0] == Rational(1, 2));
}
