#pragma once
// Finite non-homogeneous dyadic models: an atomic filtration given as a tree
// with per-atom measure masses, plus weights (simple functions on leaves),
// averages, martingale differences, maximal functions, Carleson sequences and
// sparse families. Everything here is an exact finite computation.

#include <map>
#include <string>
#include <vector>

#include "entlab/common.hpp"

#include <nlohmann/json_fwd.hpp>

namespace entlab {

struct Atom {
    int id = -1;
    int parent = -1;  // -1 for the root
    int depth = 0;
    double mass = 0.0;
    std::vector<int> children;       // empty for leaves
    int leaf_begin = 0, leaf_end = 0;  // contiguous range into leaf order
};

// Immutable after construction; safe to share across threads.
class DyadicModel {
public:
    // Tree shape as depth-first preorder child counts (0 = leaf), leaf masses
    // in the same depth-first order. Internal masses are the subtree sums, so
    // sigma-additivity holds by construction. All masses must be > 0.
    static DyadicModel from_shape(const std::vector<int>& arity_preorder,
                                  const std::vector<double>& leaf_masses);

    // Uniform `branching`-adic tree of the given depth, total mass root_mass.
    static DyadicModel uniform(int depth, int branching = 2, double root_mass = 1.0);

    static DyadicModel from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    int atom_count() const { return static_cast<int>(atoms_.size()); }
    int leaf_count() const { return static_cast<int>(leaves_.size()); }
    int root() const { return 0; }
    const Atom& atom(int id) const { return atoms_[static_cast<size_t>(id)]; }
    bool is_leaf(int id) const { return atom(id).children.empty(); }
    double mass(int id) const { return atom(id).mass; }
    const std::vector<int>& leaves() const { return leaves_; }

    // Position of a leaf atom in the deterministic leaf order.
    int leaf_pos(int id) const { return leaf_pos_[static_cast<size_t>(id)]; }
    // Leaf id at a given position.
    int leaf_at(int pos) const { return leaves_[static_cast<size_t>(pos)]; }

    bool contains(int outer, int inner) const {
        const Atom& o = atom(outer);
        const Atom& i = atom(inner);
        return o.leaf_begin <= i.leaf_begin && i.leaf_end <= o.leaf_end;
    }

    int max_depth() const;

private:
    void finalize();  // computes leaf ranges, validates invariants

    std::vector<Atom> atoms_;     // id order == depth-first preorder
    std::vector<int> leaves_;     // leaf ids, depth-first
    std::vector<int> leaf_pos_;   // atom id -> leaf position (or -1)
};

// Simple function on the leaves of a model, in leaf order. Nonnegativity is
// required only where a weight is semantically a measure density; signed
// simple functions reuse this container.
struct Weight {
    std::vector<double> values;

    Weight() = default;
    explicit Weight(std::vector<double> v) : values(std::move(v)) {}
    static Weight constant(const DyadicModel& m, double c) {
        return Weight(std::vector<double>(static_cast<size_t>(m.leaf_count()), c));
    }
    double& operator[](size_t i) { return values[i]; }
    double operator[](size_t i) const { return values[i]; }
    size_t size() const { return values.size(); }
};

void require_nonnegative(const Weight& w, const char* what);

// Pointwise 1/v; throws DivisionByZero if any leaf value is 0.
Weight inverse_weight(const Weight& v);

// Per-atom integrals of w: out[id] = sum of w * mass over leaves under id.
std::vector<double> subtree_integrals(const DyadicModel& m, const Weight& w);

// <w>_I, exact mass-weighted mean over I. Requires |I| > 0 (model invariant).
double average(const DyadicModel& m, const Weight& w, int atom_id);

// Integral of w over I (no normalization).
double integral_on(const DyadicModel& m, const Weight& w, int atom_id);

// Martingale difference of w at I: constant on each child, zero mean over I,
// zero everywhere else. Leaves and single-child atoms give the zero function.
Weight martingale_difference(const DyadicModel& m, const Weight& w, int atom_id);

// Normalized L1(I) norm of the martingale difference: |I|^{-1} int_I |D_I w|.
double martingale_difference_l1(const DyadicModel& m, const Weight& w, int atom_id);

// M(w 1_{I0}) on I0: each leaf under I0 carries the max of <|w|>_A over its
// ancestor chain A with leaf <= A <= I0; zero outside I0.
Weight maximal_function(const DyadicModel& m, const Weight& w, int root_id);

struct CarlesonSequence {
    std::map<int, double> entries;  // atom id -> a_I >= 0
    double carleson_norm = 0.0;     // sup_I |I|^-1 sum_{J <= I} a_J |J|
    int attaining_atom = -1;
};

CarlesonSequence make_carleson(const DyadicModel& m, std::map<int, double> entries);

struct SparseCertificate {
    bool sparse = false;
    double worst_ratio = 0.0;  // max over members of |union of proper members| / |I0|
    int violating_atom = -1;   // member with the worst ratio when > 1/2
};

struct SparseFamily {
    std::vector<int> members;  // atom ids, sorted
    SparseCertificate certificate;
};

// Exact union-mass ratios; the union of strict sub-members is measured via
// maximal members, no double counting.
SparseCertificate check_sparse(const DyadicModel& m, const std::vector<int>& members);

SparseFamily make_sparse_family(const DyadicModel& m, std::vector<int> members);

nlohmann::json weight_to_json(const DyadicModel& m, const Weight& w);
Weight weight_from_json(const DyadicModel& m, const nlohmann::json& j);

}  // namespace entlab
