#include "kinship/network.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <tuple>

#include "kinship/numeric.hpp"

namespace kinship {

namespace {
constexpr double kCptRowTolerance = 1e-9;
}

Network::Network(std::vector<DiscreteVariable> variables, std::vector<Factor> cpts)
    : variables_(std::move(variables)), cpts_(std::move(cpts)) {
    if (variables_.size() != cpts_.size())
        throw Error("Network: one CPT per variable required");
    auto ds = validate();
    if (has_errors(ds)) throw Error("Network: invalid structure: " + ds.front().message);
}

int Network::position(const std::string& id) const {
    for (std::size_t i = 0; i < variables_.size(); ++i)
        if (variables_[i].id == id) return static_cast<int>(i);
    return -1;
}

bool Network::has_variable(const std::string& id) const { return position(id) >= 0; }

const DiscreteVariable& Network::variable(const std::string& id) const {
    int p = position(id);
    if (p < 0) throw Error("Network: unknown variable: " + id);
    return variables_[p];
}

const Factor& Network::cpt(const std::string& id) const {
    int p = position(id);
    if (p < 0) throw Error("Network: unknown variable: " + id);
    return cpts_[p];
}

std::vector<std::string> Network::parents(const std::string& id) const {
    const Factor& f = cpt(id);
    std::vector<std::string> ps;
    for (const auto& v : f.scope())
        if (v != id) ps.push_back(v);
    return ps;
}

std::size_t Network::joint_size() const {
    std::size_t n = 1;
    for (const auto& v : variables_) n *= static_cast<std::size_t>(v.cardinality);
    return n;
}

std::vector<Diagnostic> Network::validate() const {
    std::vector<Diagnostic> ds;
    auto err = [&](const std::string& code, const std::string& msg) {
        ds.push_back({Severity::Error, 0, 0, code, msg, ""});
    };

    std::map<std::string, int> card;
    for (const auto& v : variables_) {
        if (v.cardinality < 2) err("E_CARDINALITY", "variable " + v.id + " has cardinality < 2");
        if (static_cast<int>(v.state_labels.size()) != v.cardinality)
            err("E_LABELS", "variable " + v.id + " label count != cardinality");
        std::set<std::string> labels;
        for (const auto& l : v.state_labels) {
            if (l.empty()) err("E_LABELS", "variable " + v.id + " has an empty state label");
            if (!labels.insert(l).second)
                err("E_LABELS", "variable " + v.id + " has duplicate state label '" + l + "'");
        }
        if (card.count(v.id)) err("E_DUP_VARIABLE", "duplicate variable id " + v.id);
        card[v.id] = v.cardinality;
    }
    if (!ds.empty()) return ds;

    for (std::size_t i = 0; i < cpts_.size(); ++i) {
        const auto& v = variables_[i];
        const Factor& f = cpts_[i];
        if (f.scope().empty() || f.scope()[0] != v.id) {
            err("E_CPT_SCOPE", "CPT of " + v.id + " must have the variable first in scope");
            continue;
        }
        bool ok = true;
        for (std::size_t j = 0; j < f.scope().size(); ++j) {
            auto it = card.find(f.scope()[j]);
            if (it == card.end()) {
                err("E_CPT_SCOPE", "CPT of " + v.id + " references unknown variable " + f.scope()[j]);
                ok = false;
            } else if (it->second != f.cardinalities()[j]) {
                err("E_CPT_SCOPE", "CPT of " + v.id + " disagrees on cardinality of " + f.scope()[j]);
                ok = false;
            }
        }
        if (!ok) continue;
        // Row normalization: child is scope[0], so the slowest-varying block;
        // each parent configuration r indexes a column across child states.
        const std::size_t parent_configs = f.size() / v.cardinality;
        for (std::size_t r = 0; r < parent_configs; ++r) {
            double s = 0.0;
            for (int c = 0; c < v.cardinality; ++c)
                s += f.values()[c * parent_configs + r];
            if (std::abs(s - 1.0) > kCptRowTolerance) {
                err("E_CPT_NOT_NORMALIZED",
                    "CPT of " + v.id + " row sums to " + format_double(s));
                break;
            }
        }
    }
    if (!ds.empty()) return ds;

    // Acyclicity via Kahn on the parent relation.
    std::map<std::string, int> indegree;
    std::map<std::string, std::vector<std::string>> children;
    for (const auto& v : variables_) indegree[v.id] = 0;
    for (const auto& v : variables_) {
        for (const auto& p : parents(v.id)) {
            children[p].push_back(v.id);
            ++indegree[v.id];
        }
    }
    std::vector<std::string> ready;
    for (const auto& [id, deg] : indegree)
        if (deg == 0) ready.push_back(id);
    std::size_t seen = 0;
    while (!ready.empty()) {
        std::string id = ready.back();
        ready.pop_back();
        ++seen;
        for (const auto& c : children[id])
            if (--indegree[c] == 0) ready.push_back(c);
    }
    if (seen != variables_.size())
        err("E_CYCLE", "parent relation contains a cycle");
    return ds;
}

std::vector<std::string> elimination_order(const Network& net,
                                           const std::set<std::string>& keep) {
    for (const auto& k : keep)
        if (!net.has_variable(k)) throw Error("elimination_order: unknown variable: " + k);

    // Moralized graph: clique over every CPT scope.
    std::map<std::string, std::set<std::string>> adj;
    for (const auto& v : net.variables()) adj[v.id];
    for (const auto& f : net.cpts()) {
        const auto& sc = f.scope();
        for (std::size_t i = 0; i < sc.size(); ++i)
            for (std::size_t j = i + 1; j < sc.size(); ++j) {
                adj[sc[i]].insert(sc[j]);
                adj[sc[j]].insert(sc[i]);
            }
    }

    std::vector<std::string> order;
    std::set<std::string> remaining;
    for (const auto& v : net.variables())
        if (!keep.count(v.id)) remaining.insert(v.id);

    while (!remaining.empty()) {
        // Min degree; ties by ascending (name, id).
        const std::string* best = nullptr;
        std::size_t best_deg = 0;
        for (const auto& id : remaining) {
            std::size_t deg = adj[id].size();
            if (best == nullptr || deg < best_deg ||
                (deg == best_deg &&
                 std::tie(net.variable(id).name, id) <
                     std::tie(net.variable(*best).name, *best))) {
                best = &id;
                best_deg = deg;
            }
        }
        std::string v = *best;
        // Connect neighbors pairwise, then remove v.
        std::vector<std::string> nbrs(adj[v].begin(), adj[v].end());
        for (std::size_t i = 0; i < nbrs.size(); ++i)
            for (std::size_t j = i + 1; j < nbrs.size(); ++j) {
                adj[nbrs[i]].insert(nbrs[j]);
                adj[nbrs[j]].insert(nbrs[i]);
            }
        for (const auto& n : nbrs) adj[n].erase(v);
        adj.erase(v);
        remaining.erase(v);
        order.push_back(std::move(v));
    }
    return order;
}

namespace {

// Shared VE core: reduce all CPTs by the evidence, eliminate everything not
// kept, and return the product of what is left (a factor over `keep`).
Factor eliminate(const Network& net, const std::set<std::string>& keep,
                 const EvidenceAssignment& e) {
    for (const auto& [id, state] : e.assignments) {
        const auto& v = net.variable(id);  // throws on unknown id
        if (state < 0 || state >= v.cardinality)
            throw Error("evidence: state index out of range for " + id);
    }

    std::vector<Factor> pool;
    pool.reserve(net.cpts().size());
    for (const auto& f : net.cpts()) pool.push_back(factor_reduce(f, e));

    std::set<std::string> keep_all(keep);
    for (const auto& [id, _] : e.assignments) keep_all.insert(id);

    for (const auto& v : elimination_order(net, keep_all)) {
        Factor merged(1.0);
        std::vector<Factor> rest;
        rest.reserve(pool.size());
        for (auto& f : pool) {
            if (f.position_of(v) >= 0)
                merged = factor_product(merged, f);
            else
                rest.push_back(std::move(f));
        }
        rest.push_back(factor_marginalize(merged, v));
        pool = std::move(rest);
    }

    Factor result(1.0);
    for (const auto& f : pool) result = factor_product(result, f);
    return result;
}

}  // namespace

QueryResult query(const Network& net, const std::set<std::string>& targets,
                  const EvidenceAssignment& e) {
    if (targets.empty()) throw Error("query: targets must be nonempty");
    for (const auto& t : targets) {
        if (!net.has_variable(t)) throw Error("query: unknown variable: " + t);
        if (e.contains(t))
            throw Error("query: target " + t + " already assigned by evidence");
    }

    Factor joint_over_targets = eliminate(net, targets, e);
    double p_e = joint_over_targets.sum();
    if (p_e <= 0.0)
        return QueryResult{Factor(0.0), 0.0, true};
    return QueryResult{joint_over_targets.normalized(), p_e, false};
}

double evidence_likelihood(const Network& net, const EvidenceAssignment& e) {
    Factor f = eliminate(net, {}, e);
    return f.sum();
}

Factor enumerate_joint(const Network& net) {
    const std::size_t n = net.joint_size();
    if (n > kEnumerationGuard)
        throw Error("enumerate_joint: joint size exceeds guard (2^22)");

    std::vector<std::string> scope;
    std::vector<int> card;
    for (const auto& v : net.variables()) {
        scope.push_back(v.id);
        card.push_back(v.cardinality);
    }

    // Deliberately independent of factor_product: every entry is a direct
    // product of CPT lookups so this can serve as the oracle.
    std::vector<int> pos_in_joint;  // per cpt, per scope var: joint position
    std::vector<std::vector<int>> cpt_positions(net.cpts().size());
    for (std::size_t c = 0; c < net.cpts().size(); ++c) {
        for (const auto& sv : net.cpts()[c].scope()) {
            int p = -1;
            for (std::size_t i = 0; i < scope.size(); ++i)
                if (scope[i] == sv) p = static_cast<int>(i);
            cpt_positions[c].push_back(p);
        }
    }

    std::vector<double> values(n);
    std::vector<int> states(scope.size(), 0);
    std::vector<int> sub;
    for (std::size_t idx = 0; idx < n; ++idx) {
        ProductAccumulator acc;
        for (std::size_t c = 0; c < net.cpts().size(); ++c) {
            const Factor& f = net.cpts()[c];
            sub.assign(cpt_positions[c].size(), 0);
            for (std::size_t i = 0; i < sub.size(); ++i) sub[i] = states[cpt_positions[c][i]];
            acc.multiply(f.values()[f.index_of(sub)]);
        }
        values[idx] = acc.value();
        for (std::size_t i = scope.size(); i-- > 0;) {
            if (++states[i] < card[i]) break;
            states[i] = 0;
        }
    }
    return Factor(std::move(scope), std::move(card), std::move(values));
}

}  // namespace kinship
