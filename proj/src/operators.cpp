#include "entlab/operators.hpp"

#include <algorithm>

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <nlohmann/json.hpp>

namespace entlab {

const char* OperatorSpec::kind() const {
    switch (op.index()) {
        case 0: return "sparse";
        case 1: return "positive_dyadic";
        case 2: return "haar_shift";
        default: return "paraproduct";
    }
}

OperatorSpec make_sparse_op(const DyadicModel& m, std::vector<int> members) {
    SparseOp s{make_sparse_family(m, std::move(members))};
    if (!s.family.certificate.sparse)
        throw NormalizationViolated("family is not sparse (worst ratio " +
                                    std::to_string(s.family.certificate.worst_ratio) + ")");
    return OperatorSpec{std::move(s)};
}

OperatorSpec make_positive_dyadic(const DyadicModel& m, std::map<int, double> coeffs) {
    for (auto& [id, a] : coeffs) {
        if (id < 0 || id >= m.atom_count()) throw InputError("coefficient id out of range");
        if (!(a >= 0.0)) throw InputError("positive dyadic coefficients must be >= 0");
    }
    return OperatorSpec{PositiveDyadicOp{std::move(coeffs)}};
}

std::vector<double> project_to_difference_space(const DyadicModel& m, int atom_id,
                                                std::vector<double> child_values) {
    const Atom& a = m.atom(atom_id);
    if (child_values.size() != a.children.size())
        throw InputError("child value count mismatch");
    double mean = 0.0;
    for (size_t j = 0; j < a.children.size(); ++j)
        mean += child_values[j] * m.mass(a.children[j]);
    mean /= a.mass;
    for (auto& v : child_values) v -= mean;
    return child_values;
}

double block_certificate(const DyadicModel& m, int atom_id,
                         const std::vector<double>& block) {
    const Atom& a = m.atom(atom_id);
    size_t c = a.children.size();
    if (block.size() != c * c) throw InputError("block size mismatch");
    if (c < 2) return 0.0;
    // Extreme points of {f in D_I : ||f||_1 <= 1}: h_{pq} = 1_{I_p}/(2|I_p|)
    // - 1_{I_q}/(2|I_q|). The bilinear sup over the two unit balls is a max
    // over pairs of extreme points of (T h_{pq}, h_{rs})_{L^2(mu)}.
    std::vector<double> cm(c);
    for (size_t j = 0; j < c; ++j) cm[j] = m.mass(a.children[j]);

    auto apply_block = [&](const std::vector<double>& f) {
        std::vector<double> out(c, 0.0);
        for (size_t i = 0; i < c; ++i)
            for (size_t j = 0; j < c; ++j) out[i] += block[i * c + j] * f[j];
        return out;
    };

    double best = 0.0;
    std::vector<double> h(c, 0.0), th;
    for (size_t p = 0; p < c; ++p) {
        for (size_t q = 0; q < c; ++q) {
            if (p == q) continue;
            std::fill(h.begin(), h.end(), 0.0);
            h[p] = 0.5 / cm[p];
            h[q] = -0.5 / cm[q];
            th = apply_block(h);
            for (size_t r = 0; r < c; ++r) {
                for (size_t s = 0; s < c; ++s) {
                    if (r == s) continue;
                    // (T h, g)_{L^2(mu)} with g = h_{rs}
                    double val = th[r] * (0.5 / cm[r]) * cm[r] - th[s] * (0.5 / cm[s]) * cm[s];
                    best = std::max(best, std::abs(val));
                }
            }
        }
    }
    return best;
}

OperatorSpec make_haar_shift(const DyadicModel& m,
                             std::map<int, std::vector<double>> blocks,
                             bool enforce_certificate) {
    HaarShiftOp shift;
    for (auto& [id, blk] : blocks) {
        const Atom& a = m.atom(id);
        size_t c = a.children.size();
        if (c < 2) continue;  // zero difference space
        if (blk.size() != c * c) throw InputError("block size mismatch at atom");
        // project: P T P on the child basis, P = id - mu-mean
        std::vector<double> proj(c * c, 0.0);
        std::vector<double> cm(c);
        for (size_t j = 0; j < c; ++j) cm[j] = m.mass(a.children[j]);
        // columns: image of P e_j, then project the output
        for (size_t j = 0; j < c; ++j) {
            std::vector<double> e(c, 0.0);
            e[j] = 1.0;
            double mean_in = cm[j] / a.mass;
            for (size_t k = 0; k < c; ++k) e[k] -= mean_in;
            std::vector<double> te(c, 0.0);
            for (size_t i = 0; i < c; ++i)
                for (size_t k = 0; k < c; ++k) te[i] += blk[i * c + k] * e[k];
            double mean_out = 0.0;
            for (size_t i = 0; i < c; ++i) mean_out += te[i] * cm[i];
            mean_out /= a.mass;
            for (size_t i = 0; i < c; ++i) proj[i * c + j] = te[i] - mean_out;
        }
        if (enforce_certificate) {
            double cert = block_certificate(m, id, proj);
            if (cert > (1.0 + 1e-9) / a.mass)
                throw NormalizationViolated("block at atom " + std::to_string(id) +
                                            " exceeds the L1xL1 bound");
        }
        shift.blocks[id] = std::move(proj);
    }
    return OperatorSpec{std::move(shift)};
}

OperatorSpec make_paraproduct(const DyadicModel& m,
                              std::map<int, std::vector<double>> symbol,
                              bool enforce_certificate) {
    ParaproductOp para;
    for (auto& [id, vals] : symbol) {
        const Atom& a = m.atom(id);
        if (a.children.size() < 2) continue;
        if (vals.size() != a.children.size()) throw InputError("symbol size mismatch");
        para.symbol[id] = project_to_difference_space(m, id, vals);
    }
    if (enforce_certificate) {
        double cert = paraproduct_certificate(m, para).sup_normalized;
        if (cert > 1.0 + 1e-9)
            throw NormalizationViolated("paraproduct certificate " + std::to_string(cert));
    }
    return OperatorSpec{std::move(para)};
}

std::map<int, double> positive_coefficients(const OperatorSpec& op) {
    if (const auto* s = std::get_if<SparseOp>(&op.op)) {
        std::map<int, double> c;
        for (int id : s->family.members) c[id] = 1.0;
        return c;
    }
    if (const auto* p = std::get_if<PositiveDyadicOp>(&op.op)) return p->coefficients;
    throw InputError("operator is not positive dyadic");
}

Weight apply(const OperatorSpec& op, const DyadicModel& m, const Weight& g) {
    if (static_cast<int>(g.size()) != m.leaf_count())
        throw InputError("weight size mismatch");
    Weight out = Weight::constant(m, 0.0);
    std::vector<double> ints = subtree_integrals(m, g);
    auto avg = [&](int id) { return ints[static_cast<size_t>(id)] / m.mass(id); };
    auto add_on_atom = [&](int id, double value) {
        const Atom& a = m.atom(id);
        for (int p = a.leaf_begin; p < a.leaf_end; ++p) out[static_cast<size_t>(p)] += value;
    };

    if (const auto* s = std::get_if<SparseOp>(&op.op)) {
        for (int id : s->family.members) add_on_atom(id, avg(id));
    } else if (const auto* pd = std::get_if<PositiveDyadicOp>(&op.op)) {
        for (const auto& [id, a] : pd->coefficients) add_on_atom(id, a * avg(id));
    } else if (const auto* hs = std::get_if<HaarShiftOp>(&op.op)) {
        for (const auto& [id, blk] : hs->blocks) {
            const Atom& a = m.atom(id);
            size_t c = a.children.size();
            // D_I g on the child basis
            std::vector<double> d(c);
            double ai = avg(id);
            for (size_t j = 0; j < c; ++j) d[j] = avg(a.children[j]) - ai;
            for (size_t i = 0; i < c; ++i) {
                double v = 0.0;
                for (size_t j = 0; j < c; ++j) v += blk[i * c + j] * d[j];
                if (v != 0.0) add_on_atom(a.children[i], v);
            }
        }
    } else {
        const auto& para = std::get<ParaproductOp>(op.op);
        for (const auto& [id, vals] : para.symbol) {
            const Atom& a = m.atom(id);
            double ai = avg(id);
            for (size_t j = 0; j < vals.size(); ++j)
                if (vals[j] != 0.0) add_on_atom(a.children[j], ai * vals[j]);
        }
    }
    return out;
}

ParaproductCertificates paraproduct_certificate(const DyadicModel& m,
                                                const ParaproductOp& para) {
    // per-atom norms of b_I
    std::vector<double> inf2(static_cast<size_t>(m.atom_count()), 0.0);
    std::vector<double> l22(static_cast<size_t>(m.atom_count()), 0.0);
    for (const auto& [id, vals] : para.symbol) {
        const Atom& a = m.atom(id);
        double mx = 0.0, sq = 0.0;
        for (size_t j = 0; j < vals.size(); ++j) {
            mx = std::max(mx, std::abs(vals[j]));
            sq += vals[j] * vals[j] * m.mass(a.children[j]);
        }
        inf2[static_cast<size_t>(id)] = mx * mx * a.mass;  // ||b||_inf^2 |I|
        l22[static_cast<size_t>(id)] = sq;                 // ||b||_2^2 (unnormalized)
    }
    // tail sums, sup of normalized tails
    ParaproductCertificates cert;
    std::vector<double> tail_inf(inf2), tail_l2(l22);
    for (int id = m.atom_count() - 1; id >= 0; --id) {
        for (int c : m.atom(id).children) {
            tail_inf[static_cast<size_t>(id)] += tail_inf[static_cast<size_t>(c)];
            tail_l2[static_cast<size_t>(id)] += tail_l2[static_cast<size_t>(c)];
        }
        cert.sup_normalized =
            std::max(cert.sup_normalized, tail_inf[static_cast<size_t>(id)] / m.mass(id));
        cert.classical_carleson =
            std::max(cert.classical_carleson, tail_l2[static_cast<size_t>(id)] / m.mass(id));
    }
    return cert;
}

namespace {

// S = diag(sqrt(v m)) T diag(sqrt(u / m)): the weighted operator on
// orthonormal coordinates; its largest singular value is the best constant.
struct ScaledOperator {
    const OperatorSpec& op;
    const DyadicModel& m;
    std::vector<double> left, right;  // sqrt(v m), sqrt(u/m) per leaf

    ScaledOperator(const OperatorSpec& o, const DyadicModel& model, const Weight& u,
                   const Weight& v)
        : op(o), m(model) {
        size_t n = static_cast<size_t>(m.leaf_count());
        left.resize(n);
        right.resize(n);
        for (size_t p = 0; p < n; ++p) {
            double mass = m.mass(m.leaf_at(static_cast<int>(p)));
            left[p] = std::sqrt(std::max(v[p], 0.0) * mass);
            right[p] = std::sqrt(std::max(u[p], 0.0) / mass);
        }
    }

    // y = S x
    Weight forward(const Weight& x) const {
        Weight fx = x;
        for (size_t p = 0; p < fx.size(); ++p) fx[p] *= right[p];
        Weight y = apply(op, m, fx);
        for (size_t p = 0; p < y.size(); ++p) y[p] *= left[p];
        return y;
    }

    // y = S^T x; uses the transpose of the dense action computed via the
    // identity (Sx, y) = (x, S^T y) evaluated with the operator's adjoint
    // structure: all four kinds have an explicit adjoint on leaf space.
    Weight adjoint(const Weight& x) const {
        Weight lx = x;
        for (size_t p = 0; p < lx.size(); ++p) lx[p] *= left[p];
        Weight y = apply_transpose(lx);
        for (size_t p = 0; p < y.size(); ++p) y[p] *= right[p];
        return y;
    }

    Weight apply_transpose(const Weight& g) const {
        // T* is the mu-adjoint, (Tf, g)_mu = (f, T*g)_mu, so the Euclidean
        // transpose of the leaf-value matrix is T^T = D_m T* D_m^{-1}.
        // Positive dyadic and sparse kinds are mu-self-adjoint; shifts and
        // paraproducts get explicit blockwise adjoints.
        Weight gm = g;
        for (size_t p = 0; p < gm.size(); ++p)
            gm[p] /= m.mass(m.leaf_at(static_cast<int>(p)));
        Weight r = apply_mu_adjoint(gm);
        for (size_t p = 0; p < r.size(); ++p)
            r[p] *= m.mass(m.leaf_at(static_cast<int>(p)));
        return r;
    }

    Weight apply_mu_adjoint(const Weight& g) const {
        if (op.positive()) return apply(op, m, g);
        if (const auto* hs = std::get_if<HaarShiftOp>(&op.op)) {
            // blockwise transpose on the child basis w.r.t. mu
            Weight out = Weight::constant(m, 0.0);
            std::vector<double> ints = subtree_integrals(m, g);
            for (const auto& [id, blk] : hs->blocks) {
                const Atom& a = m.atom(id);
                size_t c = a.children.size();
                std::vector<double> d(c);
                double ai = ints[static_cast<size_t>(id)] / a.mass;
                for (size_t j = 0; j < c; ++j)
                    d[j] = ints[static_cast<size_t>(a.children[j])] / m.mass(a.children[j]) - ai;
                // mu-adjoint block: B*_{jk} = B_{kj} m_k / m_j
                for (size_t j = 0; j < c; ++j) {
                    double v = 0.0;
                    for (size_t k = 0; k < c; ++k)
                        v += blk[k * c + j] * d[k] * m.mass(a.children[k]);
                    v /= m.mass(a.children[j]);
                    if (v != 0.0) {
                        const Atom& ca = m.atom(a.children[j]);
                        for (int p = ca.leaf_begin; p < ca.leaf_end; ++p)
                            out[static_cast<size_t>(p)] += v;
                    }
                }
            }
            return out;
        }
        const auto& para = std::get<ParaproductOp>(op.op);
        // (Pi f, g) = sum <f>_I (b_I, g): adjoint g |-> sum (b_I, g)_mu 1_I/|I|
        Weight out = Weight::constant(m, 0.0);
        std::vector<double> ints = subtree_integrals(m, g);
        for (const auto& [id, vals] : para.symbol) {
            const Atom& a = m.atom(id);
            double pairing = 0.0;
            for (size_t j = 0; j < vals.size(); ++j)
                pairing += vals[j] * ints[static_cast<size_t>(a.children[j])];
            double v = pairing / a.mass;
            if (v != 0.0)
                for (int p = a.leaf_begin; p < a.leaf_end; ++p)
                    out[static_cast<size_t>(p)] += v;
        }
        return out;
    }
};

double norm2(const Weight& w) {
    double s = 0.0;
    for (double v : w.values) s += v * v;
    return std::sqrt(s);
}

}  // namespace

WeightedNormResult weighted_norm(const OperatorSpec& op, const DyadicModel& m,
                                 const Weight& u, const Weight& v,
                                 const PowerIterationOptions& opt) {
    require_nonnegative(u, "u");
    require_nonnegative(v, "v");
    ScaledOperator s(op, m, u, v);
    size_t n = static_cast<size_t>(m.leaf_count());
    Weight x(std::vector<double>(n, 1.0 / std::sqrt(static_cast<double>(n))));
    WeightedNormResult res;
    double lambda_prev = -1.0;
    auto finish = [&](double lambda) {
        res.norm = std::sqrt(std::max(lambda, 0.0));
        // back to L2(u) coordinates: f_j = x_j / sqrt(u_j m_j)
        res.maximizer_f = x;
        for (size_t p = 0; p < n; ++p) {
            double um = u[p] * m.mass(m.leaf_at(static_cast<int>(p)));
            res.maximizer_f[p] = um > 0.0 ? x[p] / std::sqrt(um) : 0.0;
        }
        return res;
    };
    for (int it = 1; it <= opt.max_iterations; ++it) {
        Weight gx = s.adjoint(s.forward(x));  // S^T S x
        double lambda = 0.0;
        for (size_t p = 0; p < n; ++p) lambda += gx[p] * x[p];
        double nrm = norm2(gx);
        res.iterations = it;
        if (nrm == 0.0) return finish(0.0);
        for (size_t p = 0; p < n; ++p) gx[p] /= nrm;
        res.residual = std::abs(lambda - lambda_prev) / std::max(lambda, 1e-300);
        if (it > 2 && res.residual <= opt.tol) return finish(lambda);
        lambda_prev = lambda;
        x = std::move(gx);
    }
    throw PowerIterationStall("last Rayleigh bracket [" + std::to_string(lambda_prev) +
                              ", " + std::to_string(lambda_prev * (1.0 + res.residual)) + "]");
}

std::vector<std::vector<double>> dense_matrix(const OperatorSpec& op,
                                              const DyadicModel& m) {
    size_t n = static_cast<size_t>(m.leaf_count());
    std::vector<std::vector<double>> cols(n);
    for (size_t j = 0; j < n; ++j) {
        Weight e = Weight::constant(m, 0.0);
        e[j] = 1.0;
        cols[j] = apply(op, m, e).values;
    }
    // transpose into rows
    std::vector<std::vector<double>> rows(n, std::vector<double>(n, 0.0));
    for (size_t j = 0; j < n; ++j)
        for (size_t i = 0; i < n; ++i) rows[i][j] = cols[j][i];
    return rows;
}

double weighted_norm_dense(const OperatorSpec& op, const DyadicModel& m,
                           const Weight& u, const Weight& v) {
    int n = m.leaf_count();
    if (n > 256) throw InputError("dense oracle limited to 256 leaves");
    auto rows = dense_matrix(op, m);
    Eigen::MatrixXd S(n, n);
    for (int i = 0; i < n; ++i) {
        double mi = m.mass(m.leaf_at(i));
        double li = std::sqrt(v[static_cast<size_t>(i)] * mi);
        for (int j = 0; j < n; ++j) {
            double mj = m.mass(m.leaf_at(j));
            double rj = std::sqrt(u[static_cast<size_t>(j)] / mj);
            S(i, j) = li * rows[static_cast<size_t>(i)][static_cast<size_t>(j)] * rj;
        }
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(S);
    return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

nlohmann::json operator_to_json(const OperatorSpec& op) {
    nlohmann::json j;
    j["kind"] = op.kind();
    if (const auto* s = std::get_if<SparseOp>(&op.op)) {
        j["members"] = s->family.members;
    } else if (const auto* pd = std::get_if<PositiveDyadicOp>(&op.op)) {
        nlohmann::json c = nlohmann::json::object();
        for (auto& [id, a] : pd->coefficients) c[std::to_string(id)] = a;
        j["coefficients"] = c;
    } else if (const auto* hs = std::get_if<HaarShiftOp>(&op.op)) {
        nlohmann::json b = nlohmann::json::object();
        for (auto& [id, blk] : hs->blocks) b[std::to_string(id)] = blk;
        j["blocks"] = b;
    } else {
        const auto& para = std::get<ParaproductOp>(op.op);
        nlohmann::json sym = nlohmann::json::object();
        for (auto& [id, vals] : para.symbol) sym[std::to_string(id)] = vals;
        j["symbol"] = sym;
    }
    return j;
}

OperatorSpec operator_from_json(const DyadicModel& m, const nlohmann::json& j) {
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "sparse")
        return make_sparse_op(m, j.at("members").get<std::vector<int>>());
    if (kind == "positive_dyadic") {
        std::map<int, double> c;
        for (auto it = j.at("coefficients").begin(); it != j.at("coefficients").end(); ++it)
            c[std::stoi(it.key())] = it.value().get<double>();
        return make_positive_dyadic(m, std::move(c));
    }
    if (kind == "haar_shift") {
        std::map<int, std::vector<double>> b;
        for (auto it = j.at("blocks").begin(); it != j.at("blocks").end(); ++it)
            b[std::stoi(it.key())] = it.value().get<std::vector<double>>();
        return make_haar_shift(m, std::move(b));
    }
    if (kind == "paraproduct") {
        std::map<int, std::vector<double>> s;
        for (auto it = j.at("symbol").begin(); it != j.at("symbol").end(); ++it)
            s[std::stoi(it.key())] = it.value().get<std::vector<double>>();
        return make_paraproduct(m, std::move(s));
    }
    throw InputError("unknown operator kind " + kind);
}

}  // namespace entlab
