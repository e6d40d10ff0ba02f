#include "kinship/factor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kinship/diagnostics.hpp"

namespace kinship {

namespace {

std::size_t table_size(const std::vector<int>& card) {
    std::size_t n = 1;
    for (int c : card) n *= static_cast<std::size_t>(c);
    return n;
}

void check_values(const std::vector<double>& values) {
    for (double v : values) {
        if (!std::isfinite(v)) throw Error("Factor: entries must be finite");
        if (v < 0.0) throw Error("Factor: entries must be nonnegative");
    }
}

}  // namespace

Factor::Factor() : values_{1.0} {}

Factor::Factor(double scalar) : values_{scalar} { check_values(values_); }

Factor::Factor(std::vector<std::string> scope, std::vector<int> cardinalities,
               std::vector<double> values)
    : scope_(std::move(scope)), card_(std::move(cardinalities)), values_(std::move(values)) {
    if (scope_.size() != card_.size())
        throw Error("Factor: scope and cardinality lists differ in length");
    for (int c : card_)
        if (c < 1) throw Error("Factor: cardinalities must be >= 1");
    for (std::size_t i = 0; i < scope_.size(); ++i)
        for (std::size_t j = i + 1; j < scope_.size(); ++j)
            if (scope_[i] == scope_[j]) throw Error("Factor: duplicate variable in scope: " + scope_[i]);
    if (values_.size() != table_size(card_))
        throw Error("Factor: value count does not match scope cardinalities");
    check_values(values_);
}

double Factor::scalar() const {
    if (!is_scalar()) throw Error("Factor: scalar() on a non-scalar factor");
    return values_[0];
}

int Factor::position_of(const std::string& id) const {
    for (std::size_t i = 0; i < scope_.size(); ++i)
        if (scope_[i] == id) return static_cast<int>(i);
    return -1;
}

int Factor::cardinality_of(const std::string& id) const {
    int p = position_of(id);
    if (p < 0) throw Error("Factor: variable not in scope: " + id);
    return card_[p];
}

std::size_t Factor::index_of(const std::vector<int>& states) const {
    if (states.size() != scope_.size())
        throw Error("Factor: state vector length does not match scope");
    std::size_t idx = 0;
    for (std::size_t i = 0; i < scope_.size(); ++i) {
        if (states[i] < 0 || states[i] >= card_[i])
            throw Error("Factor: state index out of range for " + scope_[i]);
        idx = idx * card_[i] + states[i];
    }
    return idx;
}

std::vector<int> Factor::states_of(std::size_t index) const {
    std::vector<int> states(scope_.size());
    for (std::size_t i = scope_.size(); i-- > 0;) {
        states[i] = static_cast<int>(index % card_[i]);
        index /= card_[i];
    }
    return states;
}

double Factor::sum() const {
    return std::accumulate(values_.begin(), values_.end(), 0.0);
}

Factor Factor::normalized() const {
    double s = sum();
    if (s <= 0.0) throw Error("Factor: cannot normalize a zero table");
    std::vector<double> v(values_);
    for (double& x : v) x /= s;
    return Factor(scope_, card_, std::move(v));
}

bool Factor::same_table(const Factor& other, double tol) const {
    if (scope_.size() != other.scope_.size()) return false;
    // Map other's scope positions onto ours.
    std::vector<int> pos(scope_.size());
    for (std::size_t i = 0; i < scope_.size(); ++i) {
        int p = other.position_of(scope_[i]);
        if (p < 0 || other.card_[p] != card_[i]) return false;
        pos[i] = p;
    }
    std::vector<int> their(scope_.size());
    for (std::size_t idx = 0; idx < values_.size(); ++idx) {
        const std::vector<int> ours = states_of(idx);
        for (std::size_t i = 0; i < scope_.size(); ++i) their[pos[i]] = ours[i];
        if (std::abs(values_[idx] - other.values_[other.index_of(their)]) > tol) return false;
    }
    return true;
}

Factor factor_product(const Factor& a, const Factor& b) {
    // Union scope: a's order, then b's extras in b's order.
    std::vector<std::string> scope = a.scope();
    std::vector<int> card = a.cardinalities();
    for (std::size_t i = 0; i < b.scope().size(); ++i) {
        int p = a.position_of(b.scope()[i]);
        if (p >= 0) {
            if (a.cardinalities()[p] != b.cardinalities()[i])
                throw Error("factor_product: cardinality mismatch on shared variable " +
                            b.scope()[i]);
            continue;
        }
        scope.push_back(b.scope()[i]);
        card.push_back(b.cardinalities()[i]);
    }

    std::size_t n = 1;
    for (int c : card) n *= static_cast<std::size_t>(c);

    std::vector<int> a_pos(scope.size()), b_pos(scope.size());
    for (std::size_t i = 0; i < scope.size(); ++i) {
        a_pos[i] = a.position_of(scope[i]);
        b_pos[i] = b.position_of(scope[i]);
    }

    std::vector<double> values(n);
    std::vector<int> states(scope.size(), 0);
    std::vector<int> av(a.scope().size()), bv(b.scope().size());
    for (std::size_t idx = 0; idx < n; ++idx) {
        for (std::size_t i = 0; i < scope.size(); ++i) {
            if (a_pos[i] >= 0) av[a_pos[i]] = states[i];
            if (b_pos[i] >= 0) bv[b_pos[i]] = states[i];
        }
        values[idx] = a.values()[a.index_of(av)] * b.values()[b.index_of(bv)];
        // odometer increment, last position fastest
        for (std::size_t i = scope.size(); i-- > 0;) {
            if (++states[i] < card[i]) break;
            states[i] = 0;
        }
    }
    return Factor(std::move(scope), std::move(card), std::move(values));
}

Factor factor_marginalize(const Factor& f, const std::string& v) {
    int drop = f.position_of(v);
    if (drop < 0) throw Error("factor_marginalize: variable not in scope: " + v);

    std::vector<std::string> scope;
    std::vector<int> card;
    for (std::size_t i = 0; i < f.scope().size(); ++i) {
        if (static_cast<int>(i) == drop) continue;
        scope.push_back(f.scope()[i]);
        card.push_back(f.cardinalities()[i]);
    }
    std::size_t n = 1;
    for (int c : card) n *= static_cast<std::size_t>(c);

    std::vector<double> values(n, 0.0);
    for (std::size_t idx = 0; idx < f.values().size(); ++idx) {
        const std::vector<int> states = f.states_of(idx);
        std::size_t out = 0;
        for (std::size_t i = 0; i < f.scope().size(); ++i) {
            if (static_cast<int>(i) == drop) continue;
            out = out * f.cardinalities()[i] + states[i];
        }
        values[out] += f.values()[idx];
    }
    return Factor(std::move(scope), std::move(card), std::move(values));
}

Factor factor_reduce(const Factor& f, const EvidenceAssignment& e) {
    std::vector<int> fixed(f.scope().size(), -1);
    bool any = false;
    for (std::size_t i = 0; i < f.scope().size(); ++i) {
        auto it = e.assignments.find(f.scope()[i]);
        if (it == e.assignments.end()) continue;
        if (it->second < 0 || it->second >= f.cardinalities()[i])
            throw Error("factor_reduce: state index out of range for " + f.scope()[i]);
        fixed[i] = it->second;
        any = true;
    }
    if (!any) return f;

    std::vector<std::string> scope;
    std::vector<int> card;
    for (std::size_t i = 0; i < f.scope().size(); ++i) {
        if (fixed[i] >= 0) continue;
        scope.push_back(f.scope()[i]);
        card.push_back(f.cardinalities()[i]);
    }
    std::size_t n = 1;
    for (int c : card) n *= static_cast<std::size_t>(c);

    std::vector<double> values(n);
    std::vector<int> full(f.scope().size());
    for (std::size_t out = 0; out < n; ++out) {
        std::size_t rem = out;
        for (std::size_t i = f.scope().size(); i-- > 0;) {
            if (fixed[i] >= 0) {
                full[i] = fixed[i];
            } else {
                full[i] = static_cast<int>(rem % f.cardinalities()[i]);
                rem /= f.cardinalities()[i];
            }
        }
        values[out] = f.values()[f.index_of(full)];
    }
    return Factor(std::move(scope), std::move(card), std::move(values));
}

}  // namespace kinship
