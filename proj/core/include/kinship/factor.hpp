#pragma once

#include <map>
#include <string>
#include <vector>

#include "kinship/diagnostics.hpp"

namespace kinship {

struct DiscreteVariable {
    std::string id;    // unique within a network; qualified dotted names after flattening
    std::string name;  // display name, usually == id
    int cardinality = 0;
    std::vector<std::string> state_labels;
};

// Observed states, one per variable at most.
struct EvidenceAssignment {
    std::map<std::string, int> assignments;  // variable id -> state index

    bool empty() const { return assignments.empty(); }
    bool contains(const std::string& id) const { return assignments.count(id) != 0; }
};

// Dense nonnegative table over an ordered scope of discrete variables,
// row-major in scope order (scope[0] varies slowest). An empty scope is a
// single scalar. Cardinalities travel with the scope so factors are
// self-contained.
class Factor {
  public:
    Factor();  // scalar 1.0
    explicit Factor(double scalar);
    Factor(std::vector<std::string> scope, std::vector<int> cardinalities,
           std::vector<double> values);

    const std::vector<std::string>& scope() const { return scope_; }
    const std::vector<int>& cardinalities() const { return card_; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& mutable_values() { return values_; }

    bool is_scalar() const { return scope_.empty(); }
    double scalar() const;  // requires empty scope
    std::size_t size() const { return values_.size(); }

    int position_of(const std::string& id) const;  // -1 when absent
    int cardinality_of(const std::string& id) const;

    // Row-major index <-> per-variable states.
    std::size_t index_of(const std::vector<int>& states) const;
    std::vector<int> states_of(std::size_t index) const;

    double at(const std::vector<int>& states) const { return values_[index_of(states)]; }

    double sum() const;
    // Divides every entry by sum(); requires sum() > 0.
    Factor normalized() const;

    // True when scopes (as sets), cardinalities and aligned entries match
    // within tol; entry comparison aligns the other factor's scope order.
    bool same_table(const Factor& other, double tol) const;

  private:
    std::vector<std::string> scope_;
    std::vector<int> card_;
    std::vector<double> values_;
};

// Pointwise product over the union scope (a's order first, then b's extras).
// Throws on cardinality mismatch for shared variables.
Factor factor_product(const Factor& a, const Factor& b);

// Sums out one variable; throws when v is not in scope.
Factor factor_marginalize(const Factor& f, const std::string& v);

// Slices the table at the observed states; variables absent from the scope
// are ignored. Throws when a state index is out of range.
Factor factor_reduce(const Factor& f, const EvidenceAssignment& e);

}  // namespace kinship
