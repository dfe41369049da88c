#include "../oracles/lattice_oracles.hpp"
#include "torusric/errors.hpp"
#include "torusric/orbit_space.hpp"

#include <doctest.h>

#include <random>

using namespace torusric;

namespace {

// Random disk whose consecutive weights are legal, built by unimodular moves.
std::optional<WeightedDisk> random_disk(std::mt19937_64& rng, std::size_t n, std::size_t m, int bound) {
    std::uniform_int_distribution<int> d(-bound, bound);
    WeightedDisk disk;
    disk.n = n;
    disk.m = m;
    for (std::size_t i = 0; i < m; ++i) {
        IntVec v(n);
        do {
            for (auto& x : v) x = d(rng);
        } while (gcd_of(v) == 0);
        disk.weights.push_back(v);
    }
    return disk;
}

}  // namespace

TEST_CASE("validate_disk examples") {
    CHECK(validate_disk(WeightedDisk::from_ll(2, {{1, 0}, {0, 1}, {1, 0}, {0, 1}})).pass);
    const DiskValidation bad = validate_disk(WeightedDisk::from_ll(2, {{1, 0}, {2, 1}, {1, 0}}));
    CHECK_FALSE(bad.pass);
    CHECK(bad.pairs[0].legal);
    CHECK(bad.pairs[1].legal);
    CHECK_FALSE(bad.pairs[2].independent);
    CHECK(validate_disk(nm_disk(6)).pass);
    const DiskValidation nonprim = validate_disk(WeightedDisk::from_ll(2, {{1, 0}, {2, 0}, {0, 1}}));
    CHECK_FALSE(nonprim.pass);
    CHECK_FALSE(nonprim.pairs[0].second_primitive);
}

TEST_CASE("weight_matrix columns are the weights") {
    CHECK(weight_matrix(nm_disk(4)) == IntMatrix::identity(4));
    const WeightedDisk d = WeightedDisk::from_ll(2, {{1, 0}, {0, 1}, {1, 1}});
    const IntMatrix a = weight_matrix(d);
    CHECK(a == IntMatrix::from_rows({{1, 0, 1}, {0, 1, 1}}));
    for (std::size_t i = 0; i < d.m; ++i) {
        IntVec e(d.m, BigInt(0));
        e[i] = 1;
        CHECK(a * e == d.weights[i]);
    }
}

TEST_CASE("simple connectivity") {
    for (std::size_t m = 2; m <= 10; ++m) CHECK(is_simply_connected(nm_disk(m)));
    CHECK_FALSE(is_simply_connected(WeightedDisk::from_ll(2, {{1, 0}, {1, 2}, {1, 0}, {1, 2}})));
    CHECK(is_simply_connected(WeightedDisk::from_ll(2, {{1, 0}, {0, 1}, {1, 1}, {1, 2}})));
    CHECK_THROWS_AS(nm_disk(1), PreconditionError);
}

TEST_CASE("subtorus lattice") {
    CHECK(subtorus_lattice(nm_disk(4)).rank() == 0);
    const KernelLattice k = subtorus_lattice(WeightedDisk::from_ll(2, {{1, 0}, {0, 1}, {1, 1}}));
    REQUIRE(k.rank() == 1);
    const IntVec& v = k.integer_kernel_basis[0];
    CHECK((v == to_intvec({1, 1, -1}) || v == to_intvec({-1, -1, 1})));
    CHECK_THROWS_AS(subtorus_lattice(WeightedDisk::from_ll(2, {{1, 0}, {1, 2}, {1, 0}, {1, 2}})), PreconditionError);
    const KernelLattice k5 = subtorus_lattice(WeightedDisk::from_ll(3, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 0}, {0, 1, 1}}));
    CHECK(k5.rank() == 2);
}

TEST_CASE("free action") {
    CHECK(check_free_action(WeightedDisk::from_ll(3, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 0}, {0, 1, 1}})));
    CHECK_FALSE(check_free_action(WeightedDisk::from_ll(2, {{1, 0}, {0, 1}, {2, 0}})));
    const WeightedDisk d = WeightedDisk::from_ll(2, {{0, 1}, {1, 0}, {1, 2}});
    CHECK_FALSE(check_free_action(d));
    CHECK_FALSE(oracle::free_by_stabilizer_search(d));
}

TEST_CASE("free action equals disk validity on random onto disks") {
    std::mt19937_64 rng(4242);
    int checked = 0;
    for (int trial = 0; trial < 3000 && checked < 400; ++trial) {
        const std::size_t n = 2 + rng() % 3;
        const std::size_t m = n + rng() % (8 - n);
        const auto d = random_disk(rng, n, m, 3);
        if (!is_simply_connected(*d)) continue;
        const bool free = check_free_action(*d);
        CHECK(free == validate_disk(*d).pass);
        if (n <= 3) CHECK(free == oracle::free_by_stabilizer_search(*d));
        ++checked;
    }
    CHECK(checked >= 100);
}

TEST_CASE("induced isotropy") {
    const WeightedDisk nm = nm_disk(5);
    const IsotropyDescriptor e = induced_isotropy(nm, IsotropyKind::Edge, 0);
    REQUIRE(e.generators.size() == 1);
    CHECK(e.generators[0] == to_intvec({1, 0, 0, 0, 0}));
    const IsotropyDescriptor v = induced_isotropy(nm, IsotropyKind::Vertex, 0);
    REQUIRE(v.generators.size() == 2);
    CHECK(v.generators[1] == to_intvec({0, 1, 0, 0, 0}));
    CHECK(induced_isotropy(nm, IsotropyKind::Principal, 0).generators.empty());

    const WeightedDisk d = WeightedDisk::from_ll(3, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 0}, {0, 1, 1}});
    for (std::size_t i = 0; i < d.m; ++i) {
        CHECK(induced_isotropy(d, IsotropyKind::Edge, i).generators[0] == d.weights[i]);
        CHECK(induced_isotropy(d, IsotropyKind::Vertex, i).generators.size() == 2);
    }
}

TEST_CASE("small cases") {
    CHECK(small_case(2, 2).model_name == "S^4");
    CHECK(small_case(3, 3).model_name == "S^5");
    CHECK(small_case(4, 4).model_name == "S^3 x S^3");
    CHECK(small_case(4, 3).model_name == "S^2 x S^3 or S^2 x~ S^3");
    CHECK_THROWS_AS(small_case(5, 3), PreconditionError);
    CHECK_THROWS_AS(small_case(3, 4), PreconditionError);
}

TEST_CASE("disk serialization round-trip") {
    const WeightedDisk d = WeightedDisk::from_ll(3, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 0}, {0, 1, 1}});
    const std::string text = disk_to_json(d).dump();
    const WeightedDisk back = disk_from_json(nlohmann::json::parse(text));
    CHECK(back == d);
    CHECK(disk_to_json(back).dump() == text);

    nlohmann::json bad = disk_to_json(d);
    bad["weights"][3] = {2, 2, 0};
    try {
        disk_from_json(bad);
        FAIL("expected rejection");
    } catch (const PreconditionError& e) {
        CHECK(std::string(e.what()).find("weight 4 not primitive") != std::string::npos);
    }
    nlohmann::json missing = disk_to_json(d);
    missing.erase("m");
    CHECK_THROWS_AS(disk_from_json(missing), PreconditionError);
}
