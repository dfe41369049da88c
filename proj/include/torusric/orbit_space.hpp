#pragma once

#include "torusric/lattice.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace torusric {

// Cyclic list of weights: edge Gamma_i carries weights[i]; vertex F_i sits
// between Gamma_i and Gamma_{i+1} (indices mod m). Indices here are 0-based.
struct WeightedDisk {
    std::size_t n = 0;
    std::size_t m = 0;
    std::vector<IntVec> weights;

    static WeightedDisk from_ll(std::size_t n, const std::vector<std::vector<long long>>& w);
    bool operator==(const WeightedDisk&) const = default;
};

struct PairVerdict {
    std::size_t index = 0;  // pair (i, i+1 mod m)
    bool first_primitive = false;
    bool second_primitive = false;
    bool independent = false;
    bool legal = false;
    std::string message;
};

struct DiskValidation {
    bool pass = false;
    bool shape_ok = false;
    std::vector<PairVerdict> pairs;
    std::vector<std::string> errors;
};

enum class IsotropyKind { Principal, Edge, Vertex };

struct IsotropyDescriptor {
    IsotropyKind kind = IsotropyKind::Principal;
    std::size_t index = 0;
    std::vector<IntVec> generators;
};

struct SmallCaseResult {
    std::string model_name;
    std::string action_description;
};

DiskValidation validate_disk(const WeightedDisk& d);
IntMatrix weight_matrix(const WeightedDisk& d);
bool is_simply_connected(const WeightedDisk& d);
WeightedDisk nm_disk(std::size_t m);
KernelLattice subtorus_lattice(const WeightedDisk& d);
bool check_free_action(const WeightedDisk& d);

// Reconstructs the isotropy of the free-quotient action at an edge or vertex
// from the weight matrix alone and compares it against the declared weights.
// Throws InconsistencyError on mismatch.
IsotropyDescriptor induced_isotropy(const WeightedDisk& d, IsotropyKind kind, std::size_t index);

SmallCaseResult small_case(std::size_t m, std::size_t n);

nlohmann::json disk_to_json(const WeightedDisk& d);
// Throws PreconditionError naming the offending key/index.
WeightedDisk disk_from_json(const nlohmann::json& j);

}  // namespace torusric
