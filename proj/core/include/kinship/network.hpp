#pragma once

#include <set>
#include <string>
#include <vector>

#include "kinship/diagnostics.hpp"
#include "kinship/factor.hpp"

namespace kinship {

// A Bayesian network: one CPT per variable, scope (variable, parents...).
// Immutable after construction; concurrent queries are safe.
class Network {
  public:
    Network() = default;
    Network(std::vector<DiscreteVariable> variables, std::vector<Factor> cpts);

    const std::vector<DiscreteVariable>& variables() const { return variables_; }
    const std::vector<Factor>& cpts() const { return cpts_; }

    const DiscreteVariable& variable(const std::string& id) const;
    const Factor& cpt(const std::string& id) const;
    bool has_variable(const std::string& id) const;
    // Parent ids of a variable (its CPT scope minus itself, in scope order).
    std::vector<std::string> parents(const std::string& id) const;

    std::size_t joint_size() const;

    // Structural checks: aligned cpts, resolvable scopes, acyclic parent
    // relation, rows normalized within 1e-9.
    std::vector<Diagnostic> validate() const;

  private:
    std::vector<DiscreteVariable> variables_;
    std::vector<Factor> cpts_;
    int position(const std::string& id) const;
};

struct QueryResult {
    Factor posterior;      // over the targets, sums to 1; meaningless when impossible
    double evidence_prob = 0.0;
    bool impossible = false;  // evidence has probability 0; posterior undefined
};

// Min-degree elimination order over variables(net) \ keep, computed on the
// moralized graph; ties broken by ascending variable name (then id).
std::vector<std::string> elimination_order(const Network& net,
                                           const std::set<std::string>& keep);

// Exact posterior over targets plus the evidence probability, by variable
// elimination. Targets must be nonempty and disjoint from the evidence.
QueryResult query(const Network& net, const std::set<std::string>& targets,
                  const EvidenceAssignment& e);

// P(e) by variable elimination. Empty evidence yields 1.
double evidence_likelihood(const Network& net, const EvidenceAssignment& e);

// Brute-force joint over all variables in declaration order; the oracle the
// elimination path is verified against. Guarded at 2^22 joint states.
Factor enumerate_joint(const Network& net);

inline constexpr std::size_t kEnumerationGuard = std::size_t{1} << 22;

}  // namespace kinship
