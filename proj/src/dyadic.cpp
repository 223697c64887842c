#include "entlab/dyadic.hpp"

#include <algorithm>
#include <numeric>

#include <nlohmann/json.hpp>

namespace entlab {

DyadicModel DyadicModel::from_shape(const std::vector<int>& arity,
                                    const std::vector<double>& leaf_masses) {
    DyadicModel m;
    size_t shape_pos = 0, leaf_idx = 0;
    // Recursive preorder construction; explicit stack of parent ids.
    struct Frame {
        int id;
        int remaining;
    };
    std::vector<Frame> stack;

    auto new_atom = [&](int parent, int depth) {
        Atom a;
        a.id = static_cast<int>(m.atoms_.size());
        a.parent = parent;
        a.depth = depth;
        m.atoms_.push_back(a);
        return a.id;
    };

    auto consume = [&](int parent, int depth) -> int {
        if (shape_pos >= arity.size()) throw InputError("arity list too short");
        int k = arity[shape_pos++];
        if (k < 0) throw InputError("negative child count");
        int id = new_atom(parent, depth);
        if (k == 0) {
            if (leaf_idx >= leaf_masses.size()) throw InputError("leaf mass list too short");
            m.atoms_[static_cast<size_t>(id)].mass = leaf_masses[leaf_idx++];
        } else {
            stack.push_back({id, k});
        }
        return id;
    };

    consume(-1, 0);
    while (!stack.empty()) {
        Frame& f = stack.back();
        if (f.remaining == 0) {
            stack.pop_back();
            continue;
        }
        f.remaining--;
        int parent = f.id;
        int depth = m.atoms_[static_cast<size_t>(parent)].depth + 1;
        int child = consume(parent, depth);
        m.atoms_[static_cast<size_t>(parent)].children.push_back(child);
    }
    if (shape_pos != arity.size()) throw InputError("arity list too long");
    if (leaf_idx != leaf_masses.size()) throw InputError("leaf mass list too long");

    // children were appended in a stack order that reverses siblings at each
    // level interleaved with subtree construction; rebuild masses bottom-up
    // (ids are preorder so children have larger ids).
    for (int id = m.atom_count() - 1; id >= 0; --id) {
        Atom& a = m.atoms_[static_cast<size_t>(id)];
        if (!a.children.empty()) {
            std::sort(a.children.begin(), a.children.end());
            a.mass = 0.0;
            for (int c : a.children) a.mass += m.atoms_[static_cast<size_t>(c)].mass;
        }
    }
    m.finalize();
    return m;
}

DyadicModel DyadicModel::uniform(int depth, int branching, double root_mass) {
    if (depth < 0 || branching < 1) throw InputError("bad uniform model parameters");
    std::vector<int> arity;
    std::vector<double> masses;
    size_t n_leaves = 1;
    for (int d = 0; d < depth; ++d) n_leaves *= static_cast<size_t>(branching);
    double leaf_mass = root_mass / static_cast<double>(n_leaves);
    // preorder
    std::function<void(int)> rec = [&](int d) {
        if (d == depth) {
            arity.push_back(0);
            masses.push_back(leaf_mass);
            return;
        }
        arity.push_back(branching);
        for (int i = 0; i < branching; ++i) rec(d + 1);
    };
    rec(0);
    return from_shape(arity, masses);
}

void DyadicModel::finalize() {
    if (atoms_.empty()) throw InputError("empty model");
    leaves_.clear();
    leaf_pos_.assign(atoms_.size(), -1);

    for (const Atom& a : atoms_) {
        if (!(a.mass > 0.0)) throw ZeroMassAtom("atom " + std::to_string(a.id));
        if (!a.children.empty()) {
            double s = 0.0;
            for (int c : a.children) s += atoms_[static_cast<size_t>(c)].mass;
            if (!eq_tol(s, a.mass))
                throw AdditivityViolation("atom " + std::to_string(a.id));
        }
    }

    // depth-first leaf order, child-index order
    std::function<void(int)> rec = [&](int id) {
        Atom& a = atoms_[static_cast<size_t>(id)];
        a.leaf_begin = static_cast<int>(leaves_.size());
        if (a.children.empty()) {
            leaf_pos_[static_cast<size_t>(id)] = static_cast<int>(leaves_.size());
            leaves_.push_back(id);
        } else {
            for (int c : a.children) rec(c);
        }
        a.leaf_end = static_cast<int>(leaves_.size());
    };
    rec(0);
}

int DyadicModel::max_depth() const {
    int d = 0;
    for (const Atom& a : atoms_) d = std::max(d, a.depth);
    return d;
}

DyadicModel DyadicModel::from_json(const nlohmann::json& j) {
    DyadicModel m;
    const auto& list = j.at("atoms");
    m.atoms_.resize(list.size());
    for (const auto& e : list) {
        int id = e.at("id").get<int>();
        if (id < 0 || id >= static_cast<int>(list.size()))
            throw InputError("atom id out of range");
        Atom& a = m.atoms_[static_cast<size_t>(id)];
        a.id = id;
        a.parent = e.at("parent").get<int>();
        a.mass = e.at("mass").get<double>();
        a.children = e.at("children").get<std::vector<int>>();
    }
    if (m.atoms_.empty() || m.atoms_[0].parent != -1)
        throw InputError("atom 0 must be the root");
    for (Atom& a : m.atoms_)
        a.depth = a.parent < 0 ? 0 : m.atoms_[static_cast<size_t>(a.parent)].depth + 1;
    m.finalize();
    return m;
}

nlohmann::json DyadicModel::to_json() const {
    nlohmann::json list = nlohmann::json::array();
    for (const Atom& a : atoms_) {
        list.push_back({{"id", a.id},
                        {"parent", a.parent},
                        {"children", a.children},
                        {"mass", a.mass}});
    }
    return {{"atoms", list}};
}

void require_nonnegative(const Weight& w, const char* what) {
    for (double v : w.values)
        if (!(v >= 0.0) || !std::isfinite(v)) throw InputError(std::string(what) + " must be finite and >= 0");
}

Weight inverse_weight(const Weight& v) {
    Weight r = v;
    for (auto& x : r.values) {
        if (x == 0.0) throw DivisionByZero("weight has a zero leaf value");
        x = 1.0 / x;
    }
    return r;
}

std::vector<double> subtree_integrals(const DyadicModel& m, const Weight& w) {
    if (static_cast<int>(w.size()) != m.leaf_count())
        throw InputError("weight size does not match model");
    std::vector<double> out(static_cast<size_t>(m.atom_count()), 0.0);
    for (int id = m.atom_count() - 1; id >= 0; --id) {
        const Atom& a = m.atom(id);
        if (a.children.empty()) {
            out[static_cast<size_t>(id)] =
                w[static_cast<size_t>(m.leaf_pos(id))] * a.mass;
        } else {
            double s = 0.0;
            for (int c : a.children) s += out[static_cast<size_t>(c)];
            out[static_cast<size_t>(id)] = s;
        }
    }
    return out;
}

double integral_on(const DyadicModel& m, const Weight& w, int atom_id) {
    const Atom& a = m.atom(atom_id);
    double s = 0.0;
    for (int p = a.leaf_begin; p < a.leaf_end; ++p)
        s += w[static_cast<size_t>(p)] * m.mass(m.leaf_at(p));
    return s;
}

double average(const DyadicModel& m, const Weight& w, int atom_id) {
    return integral_on(m, w, atom_id) / m.mass(atom_id);
}

Weight martingale_difference(const DyadicModel& m, const Weight& w, int atom_id) {
    Weight out = Weight::constant(m, 0.0);
    const Atom& a = m.atom(atom_id);
    if (a.children.size() < 2) return out;  // leaves and single-child atoms
    double avg_i = average(m, w, atom_id);
    for (int c : a.children) {
        double d = average(m, w, c) - avg_i;
        const Atom& ca = m.atom(c);
        for (int p = ca.leaf_begin; p < ca.leaf_end; ++p) out[static_cast<size_t>(p)] = d;
    }
    return out;
}

double martingale_difference_l1(const DyadicModel& m, const Weight& w, int atom_id) {
    const Atom& a = m.atom(atom_id);
    if (a.children.size() < 2) return 0.0;
    double avg_i = average(m, w, atom_id);
    double s = 0.0;
    for (int c : a.children) s += std::abs(average(m, w, c) - avg_i) * m.mass(c);
    return s / a.mass;
}

Weight maximal_function(const DyadicModel& m, const Weight& w, int root_id) {
    Weight out = Weight::constant(m, 0.0);
    std::vector<double> absint(static_cast<size_t>(m.atom_count()), 0.0);
    // |w| integrals bottom-up, restricted to the subtree of root_id
    const Atom& r = m.atom(root_id);
    for (int id = m.atom_count() - 1; id >= root_id; --id) {
        const Atom& a = m.atom(id);
        if (!m.contains(root_id, id)) continue;
        if (a.children.empty())
            absint[static_cast<size_t>(id)] =
                std::abs(w[static_cast<size_t>(m.leaf_pos(id))]) * a.mass;
        else {
            double s = 0.0;
            for (int c : a.children) s += absint[static_cast<size_t>(c)];
            absint[static_cast<size_t>(id)] = s;
        }
    }
    std::function<void(int, double)> rec = [&](int id, double running) {
        const Atom& a = m.atom(id);
        running = std::max(running, absint[static_cast<size_t>(id)] / a.mass);
        if (a.children.empty()) {
            out[static_cast<size_t>(m.leaf_pos(id))] = running;
            return;
        }
        for (int c : a.children) rec(c, running);
    };
    (void)r;
    rec(root_id, 0.0);
    return out;
}

CarlesonSequence make_carleson(const DyadicModel& m, std::map<int, double> entries) {
    for (auto& [id, v] : entries) {
        if (id < 0 || id >= m.atom_count()) throw InputError("carleson entry id out of range");
        if (!(v >= 0.0)) throw InputError("carleson entries must be >= 0");
    }
    // tail sums bottom-up: S(I) = sum_{J <= I} a_J |J|
    std::vector<double> tail(static_cast<size_t>(m.atom_count()), 0.0);
    for (int id = m.atom_count() - 1; id >= 0; --id) {
        const Atom& a = m.atom(id);
        double s = 0.0;
        auto it = entries.find(id);
        if (it != entries.end()) s += it->second * a.mass;
        for (int c : a.children) s += tail[static_cast<size_t>(c)];
        tail[static_cast<size_t>(id)] = s;
    }
    CarlesonSequence seq;
    seq.entries = std::move(entries);
    for (int id = 0; id < m.atom_count(); ++id) {
        double ratio = tail[static_cast<size_t>(id)] / m.mass(id);
        if (ratio > seq.carleson_norm) {
            seq.carleson_norm = ratio;
            seq.attaining_atom = id;
        }
    }
    return seq;
}

SparseCertificate check_sparse(const DyadicModel& m, const std::vector<int>& members) {
    SparseCertificate cert;
    cert.sparse = true;
    std::vector<int> sorted = members;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    for (int id : sorted)
        if (id < 0 || id >= m.atom_count()) throw InputError("family member out of range");

    for (int outer : sorted) {
        // maximal strict sub-members: strict descendants not contained in
        // another strict descendant member
        double union_mass = 0.0;
        for (int inner : sorted) {
            if (inner == outer || !m.contains(outer, inner)) continue;
            bool maximal = true;
            for (int mid : sorted) {
                if (mid == outer || mid == inner) continue;
                if (m.contains(outer, mid) && m.contains(mid, inner)) {
                    maximal = false;
                    break;
                }
            }
            if (maximal) union_mass += m.mass(inner);
        }
        double ratio = union_mass / m.mass(outer);
        if (ratio > cert.worst_ratio) {
            cert.worst_ratio = ratio;
            if (ratio > 0.5 + kRelTol) cert.violating_atom = outer;
        }
    }
    cert.sparse = cert.worst_ratio <= 0.5 + kRelTol;
    return cert;
}

SparseFamily make_sparse_family(const DyadicModel& m, std::vector<int> members) {
    SparseFamily fam;
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    fam.members = std::move(members);
    fam.certificate = check_sparse(m, fam.members);
    return fam;
}

nlohmann::json weight_to_json(const DyadicModel& m, const Weight& w) {
    nlohmann::json j = nlohmann::json::object();
    for (int p = 0; p < m.leaf_count(); ++p)
        j[std::to_string(m.leaf_at(p))] = w[static_cast<size_t>(p)];
    return j;
}

Weight weight_from_json(const DyadicModel& m, const nlohmann::json& j) {
    Weight w = Weight::constant(m, 0.0);
    for (auto it = j.begin(); it != j.end(); ++it) {
        int id = std::stoi(it.key());
        if (id < 0 || id >= m.atom_count() || !m.is_leaf(id))
            throw InputError("weight key is not a leaf id");
        w[static_cast<size_t>(m.leaf_pos(id))] = it.value().get<double>();
    }
    return w;
}

}  // namespace entlab
