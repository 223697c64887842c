#pragma once
// Exact application of sparse / positive dyadic operators, complexity-1 Haar
// shifts and paraproducts, with their normalization certificates and weighted
// operator norms by power iteration (dense decomposition kept as an oracle).

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "entlab/dyadic.hpp"

#include <nlohmann/json_fwd.hpp>

namespace entlab {

// f |-> sum over family of <f>_I 1_I
struct SparseOp {
    SparseFamily family;
};

// f |-> sum a_I <f>_I 1_I, a_I >= 0
struct PositiveDyadicOp {
    std::map<int, double> coefficients;
};

// Block per atom: a matrix on the child-indicator basis, projected onto the
// martingale-difference space at construction. Acts as T f = sum T_I(D_I f).
struct HaarShiftOp {
    // atom id -> row-major c x c matrix on the children of the atom
    std::map<int, std::vector<double>> blocks;
};

// f |-> sum <f>_I b_I with b_I in the difference space of I (child-constant,
// zero mean), stored as per-child values.
struct ParaproductOp {
    std::map<int, std::vector<double>> symbol;
};

struct OperatorSpec {
    std::variant<SparseOp, PositiveDyadicOp, HaarShiftOp, ParaproductOp> op;

    bool positive() const {
        return std::holds_alternative<SparseOp>(op) ||
               std::holds_alternative<PositiveDyadicOp>(op);
    }
    const char* kind() const;
};

// Builders validate their normalization certificates.
OperatorSpec make_sparse_op(const DyadicModel& m, std::vector<int> members);
OperatorSpec make_positive_dyadic(const DyadicModel& m, std::map<int, double> coeffs);
// Projects each block onto the difference space; throws NormalizationViolated
// when a projected block exceeds the |I|^{-1} L1xL1 bound.
OperatorSpec make_haar_shift(const DyadicModel& m,
                             std::map<int, std::vector<double>> blocks,
                             bool enforce_certificate = true);
// Projects symbol entries onto the difference space; throws
// NormalizationViolated when the sup-normalized Carleson certificate is > 1.
OperatorSpec make_paraproduct(const DyadicModel& m,
                              std::map<int, std::vector<double>> symbol,
                              bool enforce_certificate = true);

// Exact leafwise application; linear in g; g may be signed.
Weight apply(const OperatorSpec& op, const DyadicModel& m, const Weight& g);

// Positive-dyadic coefficients view (sparse ops are a_I = 1 on the family).
std::map<int, double> positive_coefficients(const OperatorSpec& op);

// L1 x L1 certificate of a single block: exact sup over the extreme points of
// the unit L1 balls of the difference space (two-child normalized indicator
// differences). Compare against |I|^{-1}.
double block_certificate(const DyadicModel& m, int atom_id,
                         const std::vector<double>& block);

// Projection of per-child values onto the difference space (removes the
// mu-mean over the atom).
std::vector<double> project_to_difference_space(const DyadicModel& m, int atom_id,
                                                std::vector<double> child_values);

struct ParaproductCertificates {
    double sup_normalized = 0.0;  // sup_I |I|^-1 sum ||b||_inf^2 |I'|
    double classical_carleson = 0.0;  // sup_I |I|^-1 sum ||b||_2^2
};

ParaproductCertificates paraproduct_certificate(const DyadicModel& m,
                                                const ParaproductOp& para);

struct WeightedNormResult {
    double norm = 0.0;     // best constant sqrt(C): L2(u) -> L2(v) of f -> T(fu)
    int iterations = 0;
    double residual = 0.0;
    Weight maximizer_f;    // near-extremal input, unit L2(u) norm (when norm > 0)
};

struct PowerIterationOptions {
    double tol = 1e-13;
    int max_iterations = 100000;
};

// Power iteration on the Gram composition with a deterministic start vector.
// Throws PowerIterationStall when the cap is reached without convergence.
WeightedNormResult weighted_norm(const OperatorSpec& op, const DyadicModel& m,
                                 const Weight& u, const Weight& v,
                                 const PowerIterationOptions& opt = {});

// Exact dense decomposition oracle (leaf counts <= 256).
double weighted_norm_dense(const OperatorSpec& op, const DyadicModel& m,
                           const Weight& u, const Weight& v);

// Dense leaf-basis matrix of T itself (columns: images of leaf indicators
// normalized as unit values on a single leaf).
std::vector<std::vector<double>> dense_matrix(const OperatorSpec& op,
                                              const DyadicModel& m);

nlohmann::json operator_to_json(const OperatorSpec& op);
OperatorSpec operator_from_json(const DyadicModel& m, const nlohmann::json& j);

}  // namespace entlab
