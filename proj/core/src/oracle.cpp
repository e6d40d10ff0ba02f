#include "kinship/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace kinship::oracle {

Network random_network(Rng& rng, const CaseOptions& opt) {
    const int n = rng.uniform_int(opt.min_variables, opt.max_variables);

    std::vector<DiscreteVariable> variables;
    std::size_t joint = 1;
    for (int i = 0; i < n; ++i) {
        int card = rng.uniform_int(opt.min_cardinality, opt.max_cardinality);
        while (card > opt.min_cardinality && joint * card > opt.max_joint_size) --card;
        if (joint * card > opt.max_joint_size) break;
        joint *= static_cast<std::size_t>(card);
        DiscreteVariable v;
        v.id = "v" + std::to_string(i);
        v.name = v.id;
        v.cardinality = card;
        for (int s = 0; s < card; ++s) v.state_labels.push_back("s" + std::to_string(s));
        variables.push_back(std::move(v));
    }

    std::vector<Factor> cpts;
    for (std::size_t i = 0; i < variables.size(); ++i) {
        std::vector<std::string> scope{variables[i].id};
        std::vector<int> card{variables[i].cardinality};
        int parents = 0;
        for (std::size_t j = 0; j < i && parents < opt.max_parents; ++j) {
            if (!rng.bernoulli(opt.edge_probability)) continue;
            scope.push_back(variables[j].id);
            card.push_back(variables[j].cardinality);
            ++parents;
        }

        std::size_t parent_configs = 1;
        for (std::size_t k = 1; k < card.size(); ++k)
            parent_configs *= static_cast<std::size_t>(card[k]);
        std::vector<double> values(parent_configs * card[0]);
        for (std::size_t r = 0; r < parent_configs; ++r) {
            double sum = 0.0;
            std::vector<double> row(card[0]);
            for (int c = 0; c < card[0]; ++c) {
                // Strictly positive weights keep all evidence possible.
                row[c] = -std::log(1.0 - rng.uniform01()) + 1e-3;
                sum += row[c];
            }
            for (int c = 0; c < card[0]; ++c)
                values[static_cast<std::size_t>(c) * parent_configs + r] = row[c] / sum;
        }
        cpts.emplace_back(std::move(scope), std::move(card), std::move(values));
    }
    return Network(std::move(variables), std::move(cpts));
}

Case random_case(Rng& rng, const CaseOptions& opt) {
    Case c{random_network(rng, opt), {}, {}};
    const auto& vars = c.network.variables();

    for (const auto& v : vars)
        if (rng.bernoulli(opt.evidence_probability))
            c.evidence.assignments[v.id] = rng.uniform_int(0, v.cardinality - 1);

    std::vector<const DiscreteVariable*> free;
    for (const auto& v : vars)
        if (!c.evidence.contains(v.id)) free.push_back(&v);
    if (free.empty()) {
        // Everything observed: free one variable so a query target exists.
        const auto& v = vars[static_cast<std::size_t>(rng.uniform_int(0, vars.size() - 1))];
        c.evidence.assignments.erase(v.id);
        free.push_back(&v);
    }
    const int targets = std::min<int>(rng.uniform_int(1, 2), static_cast<int>(free.size()));
    for (int t = 0; t < targets; ++t)
        c.targets.insert(free[static_cast<std::size_t>(rng.uniform_int(0, free.size() - 1))]->id);
    return c;
}

double enumerated_likelihood(const Network& net, const EvidenceAssignment& e) {
    return factor_reduce(enumerate_joint(net), e).sum();
}

QueryResult enumerated_query(const Network& net, const std::set<std::string>& targets,
                             const EvidenceAssignment& e) {
    Factor f = factor_reduce(enumerate_joint(net), e);
    for (const auto& v : net.variables())
        if (!targets.count(v.id) && f.position_of(v.id) >= 0) f = factor_marginalize(f, v.id);
    const double p = f.sum();
    if (p <= 0.0) return QueryResult{Factor(0.0), 0.0, true};
    return QueryResult{f.normalized(), p, false};
}

namespace {

std::string describe_case(const Case& c) {
    std::ostringstream os;
    os << "evidence {";
    bool first = true;
    for (const auto& [id, s] : c.evidence.assignments) {
        if (!first) os << ", ";
        os << id << "=" << s;
        first = false;
    }
    os << "} targets {";
    first = true;
    for (const auto& t : c.targets) {
        if (!first) os << ", ";
        os << t;
        first = false;
    }
    os << "}";
    return os.str();
}

}  // namespace

SuiteResult run_suite(std::uint64_t seed, int count, double tolerance, const CaseOptions& opt) {
    SuiteResult result;
    Rng rng(seed);
    for (int i = 0; i < count; ++i) {
        Case c = random_case(rng, opt);
        ++result.cases_run;

        const double lik_ve = evidence_likelihood(c.network, c.evidence);
        const double lik_enum = enumerated_likelihood(c.network, c.evidence);
        std::string failure;
        if (std::abs(lik_ve - lik_enum) > tolerance) {
            std::ostringstream os;
            os << "case " << i << ": evidence likelihood mismatch, elimination="
               << lik_ve << " enumeration=" << lik_enum;
            failure = os.str();
        } else {
            const QueryResult q_ve = query(c.network, c.targets, c.evidence);
            const QueryResult q_enum = enumerated_query(c.network, c.targets, c.evidence);
            if (q_ve.impossible != q_enum.impossible) {
                failure = "case " + std::to_string(i) + ": impossibility flags disagree";
            } else if (!q_ve.impossible &&
                       !q_ve.posterior.same_table(q_enum.posterior, tolerance)) {
                failure = "case " + std::to_string(i) + ": posterior tables disagree";
            }
        }
        if (!failure.empty()) {
            result.ok = false;
            result.failure = failure + " [" + describe_case(c) + "]";
            std::ostringstream ce;
            ce << "# oracle counterexample (seed " << seed << ", case " << i << ")\n";
            ce << "# " << describe_case(c) << "\n";
            ce << oobn::print(document_from_network(c.network));
            result.counterexample = ce.str();
            return result;
        }
    }
    return result;
}

oobn::ModelDocument document_from_network(const Network& net, const std::string& class_name) {
    oobn::NetworkClass cls;
    cls.name = class_name;

    // Dots are reserved in node names; sanitize and de-duplicate.
    std::map<std::string, std::string> rename;
    std::set<std::string> used;
    for (const auto& v : net.variables()) {
        std::string base = v.id;
        std::replace(base.begin(), base.end(), '.', '_');
        std::string name = base;
        int suffix = 1;
        while (!used.insert(name).second) name = base + "_" + std::to_string(suffix++);
        rename[v.id] = name;
    }

    for (const auto& v : net.variables()) {
        oobn::NodeDecl d;
        d.name = rename[v.id];
        d.role = oobn::NodeRole::Internal;
        d.state_labels = v.state_labels;
        const Factor& f = net.cpt(v.id);
        std::size_t parent_configs = 1;
        for (std::size_t i = 1; i < f.scope().size(); ++i) {
            oobn::NodeRef ref;
            ref.node = rename[f.scope()[i]];
            d.parents.push_back(std::move(ref));
            parent_configs *= static_cast<std::size_t>(f.cardinalities()[i]);
        }
        for (std::size_t r = 0; r < parent_configs; ++r) {
            std::vector<double> row(v.cardinality);
            for (int c = 0; c < v.cardinality; ++c)
                row[c] = f.values()[static_cast<std::size_t>(c) * parent_configs + r];
            d.cpt_rows.push_back(std::move(row));
        }
        cls.nodes.push_back(std::move(d));
    }

    oobn::ModelDocument doc;
    doc.classes.push_back(std::move(cls));
    doc.root = class_name;
    return doc;
}

}  // namespace kinship::oracle
