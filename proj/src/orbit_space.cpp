#include "torusric/orbit_space.hpp"

#include "torusric/errors.hpp"

#include <sstream>

namespace torusric {

namespace {

IntVec negated(const IntVec& v) {
    IntVec out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = -v[i];
    return out;
}

bool same_line(const IntVec& a, const IntVec& b) {
    const IntVec pa = primitive_part(a);
    const IntVec pb = primitive_part(b);
    return pa == pb || pa == negated(pb);
}

// Hermite form of Q-span(gens) ∩ Z^n.
IntMatrix saturated_span(const std::vector<IntVec>& gens, std::size_t n) {
    const IntMatrix g = IntMatrix::from_columns(gens).transpose();
    const KernelLattice orth = integer_kernel(g);
    if (orth.rank() == 0) return IntMatrix::identity(n);
    const KernelLattice sat = integer_kernel(IntMatrix::from_columns(orth.integer_kernel_basis).transpose());
    return hermite_rows(IntMatrix::from_columns(sat.integer_kernel_basis).transpose());
}

IntVec unit_vector(std::size_t m, std::size_t i) {
    IntVec e(m, BigInt(0));
    e[i] = 1;
    return e;
}

// The isotropy circle of e_i in T^m maps to the circle generated by A e_i;
// the preimage of the declared weight must differ from e_i by a kernel vector.
IntVec reconstructed_generator(const IntMatrix& a, const WeightedDisk& d, std::size_t i) {
    const IntVec e = unit_vector(d.m, i);
    const IntVec image = a * e;
    const RatVec w = solve_preimage(a, d.weights[i]);
    RatVec diff(w.size());
    for (std::size_t k = 0; k < w.size(); ++k) diff[k] = w[k] - Rational(e[k]);
    for (const auto& v : a * diff)
        if (v != 0)
            throw InconsistencyError("induced_isotropy: preimage of weight " + std::to_string(i + 1) +
                                     " is not e_i modulo the kernel");
    return primitive_part(image);
}

}  // namespace

WeightedDisk WeightedDisk::from_ll(std::size_t n, const std::vector<std::vector<long long>>& w) {
    WeightedDisk d;
    d.n = n;
    d.m = w.size();
    for (const auto& a : w) d.weights.push_back(to_intvec(a));
    return d;
}

DiskValidation validate_disk(const WeightedDisk& d) {
    DiskValidation rep;
    if (d.n < 2) rep.errors.push_back("n must be at least 2");
    if (d.m < d.n) rep.errors.push_back("m must be at least n");
    if (d.weights.size() != d.m) rep.errors.push_back("weights list length differs from m");
    for (std::size_t i = 0; i < d.weights.size(); ++i) {
        if (d.weights[i].size() != d.n)
            rep.errors.push_back("weight " + std::to_string(i + 1) + " has wrong length");
        else if (gcd_of(d.weights[i]) == 0)
            rep.errors.push_back("weight " + std::to_string(i + 1) + " is zero");
    }
    rep.shape_ok = rep.errors.empty();
    if (!rep.shape_ok) return rep;

    bool ok = true;
    for (std::size_t i = 0; i < d.m; ++i) {
        const IntVec& a = d.weights[i];
        const IntVec& b = d.weights[(i + 1) % d.m];
        PairVerdict v;
        v.index = i;
        v.first_primitive = gcd_of(a) == 1;
        v.second_primitive = gcd_of(b) == 1;
        const BigInt g = minor_gcd(a, b);
        v.independent = g != 0;
        v.legal = v.first_primitive && v.second_primitive && g == 1;
        std::ostringstream msg;
        msg << "pair " << i + 1 << "," << (i + 1) % d.m + 1 << ": ";
        if (!v.first_primitive)
            msg << "weight " << i + 1 << " not primitive";
        else if (!v.second_primitive)
            msg << "weight " << (i + 1) % d.m + 1 << " not primitive";
        else if (!v.independent)
            msg << "dependent weights";
        else if (!v.legal)
            msg << "minor gcd " << g << " (nontrivial intersection)";
        else
            msg << "legal";
        v.message = msg.str();
        ok = ok && v.legal;
        rep.pairs.push_back(v);
    }
    rep.pass = ok;
    return rep;
}

IntMatrix weight_matrix(const WeightedDisk& d) {
    if (d.weights.empty()) throw PreconditionError("weight_matrix: empty disk");
    return IntMatrix::from_columns(d.weights);
}

bool is_simply_connected(const WeightedDisk& d) {
    const SnfDecomposition snf = smith_normal_form(weight_matrix(d));
    if (snf.rank != d.n) return false;
    for (std::size_t i = 0; i < d.n; ++i)
        if (snf.invariant_factors[i] != 1) return false;
    return true;
}

WeightedDisk nm_disk(std::size_t m) {
    if (m < 2) throw PreconditionError("nm_disk: m must be at least 2");
    WeightedDisk d;
    d.n = m;
    d.m = m;
    for (std::size_t i = 0; i < m; ++i) d.weights.push_back(unit_vector(m, i));
    return d;
}

KernelLattice subtorus_lattice(const WeightedDisk& d) {
    if (!is_simply_connected(d))
        throw PreconditionError("subtorus_lattice: weight matrix is not onto Z^n (see is_simply_connected)");
    return integer_kernel(weight_matrix(d));
}

bool check_free_action(const WeightedDisk& d) {
    if (!is_simply_connected(d))
        throw PreconditionError("check_free_action: weight matrix is not onto Z^n (see is_simply_connected)");
    for (std::size_t i = 0; i < d.m; ++i) {
        const IntVec& a = d.weights[i];
        const IntVec& b = d.weights[(i + 1) % d.m];
        if (gcd_of(a) != 1 || gcd_of(b) != 1) return false;
        if (minor_gcd(a, b) != 1) return false;
    }
    return true;
}

IsotropyDescriptor induced_isotropy(const WeightedDisk& d, IsotropyKind kind, std::size_t index) {
    if (!validate_disk(d).pass) throw PreconditionError("induced_isotropy: disk is not legally weighted");
    if (!is_simply_connected(d)) throw PreconditionError("induced_isotropy: weight matrix is not onto");
    if (index >= d.m) throw PreconditionError("induced_isotropy: index out of range");
    IsotropyDescriptor out;
    out.kind = kind;
    out.index = index;
    if (kind == IsotropyKind::Principal) return out;

    const IntMatrix a = weight_matrix(d);
    const IntVec gi = reconstructed_generator(a, d, index);
    if (!same_line(gi, d.weights[index]))
        throw InconsistencyError("induced_isotropy: edge " + std::to_string(index + 1) + " generator " +
                                 vec_str(gi) + " differs from declared " + vec_str(d.weights[index]));
    if (kind == IsotropyKind::Edge) {
        out.generators = {d.weights[index]};
        return out;
    }
    const std::size_t j = (index + 1) % d.m;
    const IntVec gj = reconstructed_generator(a, d, j);
    if (!same_line(gj, d.weights[j]))
        throw InconsistencyError("induced_isotropy: vertex " + std::to_string(index + 1) + " generator " +
                                 vec_str(gj) + " differs from declared " + vec_str(d.weights[j]));
    // The 2-torus is the image of a saturated rank-2 lattice; compare lattices, not vectors.
    const IntMatrix reconstructed = saturated_span({gi, gj}, d.n);
    const IntMatrix declared = hermite_rows(IntMatrix::from_columns({d.weights[index], d.weights[j]}).transpose());
    if (!(reconstructed == declared))
        throw InconsistencyError("induced_isotropy: vertex " + std::to_string(index + 1) +
                                 " torus lattice " + reconstructed.str() + " differs from declared " +
                                 declared.str());
    out.generators = {d.weights[index], d.weights[j]};
    return out;
}

SmallCaseResult small_case(std::size_t m, std::size_t n) {
    if (m >= 5) throw PreconditionError("small_case: m >= 5 is handled by the general construction (build)");
    if (n < 2 || n > m) throw PreconditionError("small_case: requires 2 <= n <= m <= 4");
    if (m == 2) return {"S^4", "linear T^2 action"};
    if (m == 3 && n == 3) return {"S^5", "linear T^3 action"};
    if (m == 3) return {"CP^2", "free circle quotient of S^5 with linear T^3 action, induced T^2 action"};
    if (n == 4) return {"S^3 x S^3", "product of round metrics, T^4 action"};
    if (n == 3)
        return {"S^2 x S^3 or S^2 x~ S^3",
                "quotient of S^3 x S^3 (product of round metrics) by a free circle, induced T^3 action"};
    return {"S^2 x S^2 or CP^2 # -CP^2",
            "quotient of S^3 x S^3 (product of round metrics) by a free 2-torus, induced T^2 action"};
}

nlohmann::json disk_to_json(const WeightedDisk& d) {
    nlohmann::json w = nlohmann::json::array();
    for (const auto& a : d.weights) w.push_back(to_ll(a));
    return {{"n", d.n}, {"m", d.m}, {"weights", w}};
}

WeightedDisk disk_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw PreconditionError("disk: expected an object");
    for (const char* key : {"n", "m", "weights"})
        if (!j.contains(key)) throw PreconditionError(std::string("disk: missing key '") + key + "'");
    if (!j["n"].is_number_unsigned()) throw PreconditionError("disk.n: expected a non-negative integer");
    if (!j["m"].is_number_unsigned()) throw PreconditionError("disk.m: expected a non-negative integer");
    if (!j["weights"].is_array()) throw PreconditionError("disk.weights: expected a list of integer lists");
    WeightedDisk d;
    d.n = j["n"].get<std::size_t>();
    d.m = j["m"].get<std::size_t>();
    const auto& w = j["weights"];
    for (std::size_t i = 0; i < w.size(); ++i) {
        const std::string where = "disk.weights[" + std::to_string(i) + "]";
        if (!w[i].is_array()) throw PreconditionError(where + ": expected a list of integers");
        IntVec v;
        for (std::size_t k = 0; k < w[i].size(); ++k) {
            if (!w[i][k].is_number_integer())
                throw PreconditionError(where + "[" + std::to_string(k) + "]: expected an integer");
            v.emplace_back(w[i][k].get<long long>());
        }
        d.weights.push_back(std::move(v));
    }
    const DiskValidation rep = validate_disk(d);
    if (!rep.shape_ok) throw PreconditionError("disk: " + rep.errors.front());
    for (const auto& p : rep.pairs)
        if (!p.legal) throw PreconditionError("disk.weights: " + p.message);
    return d;
}

}  // namespace torusric
