#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kinship/lr_value.hpp"

namespace kinship::evidence {

struct HypothesisPair {
    std::string null_label = "Tomb=NTped";
    std::string alt_label = "Tomb!=NTped";
    double prior_odds = 1.0;  // odds of the alternative against the null
};

enum class ItemKind { Onomasticon, Dna, Direct };

struct EvidenceItem {
    std::string id;
    ItemKind kind = ItemKind::Direct;
    LrValue lr = LrValue::finite(1.0);
    std::string provenance;
    // Absolute likelihoods, when the producing module can supply them (used
    // for the selection-effect probability).
    std::optional<double> alt_likelihood;
    std::optional<double> null_likelihood;
};

struct CombinedResult {
    std::vector<std::pair<std::string, LrValue>> per_item;
    LrValue overall = LrValue::finite(1.0);
};

// Product of the per-item LRs with flag algebra: an infinite item and a zero
// item together (or any undefined item) make the overall undefined; infinity
// alone dominates; zero alone dominates; the empty list is 1.
CombinedResult combine_lrs(const std::vector<EvidenceItem>& items);

struct PosteriorResult {
    LrValue odds;         // prior_odds * overall LR
    LrValue prob_alt;     // odds / (1 + odds); 1 when infinite, 0 when zero
};

PosteriorResult posterior_from_lr(const HypothesisPair& h, const LrValue& overall_lr);

// Probability that at least one of `trials` independent attempts shows an
// event of per-trial probability p.
double selection_adjust(double p, long trials);

struct CountPrior {
    enum class Quantity { OssuaryCount, PopulationSize };
    enum class Kind { Point, UniformRange, Poisson };

    Quantity quantity = Quantity::OssuaryCount;
    Kind kind = Kind::Point;
    long point_value = 0;
    long range_lo = 0, range_hi = 0;
    double poisson_mean = 0.0;

    static CountPrior point(Quantity q, long value);
    static CountPrior uniform_range(Quantity q, long lo, long hi);
    static CountPrior poisson(Quantity q, double mean);
};

// Expectation of f under the count prior. Poisson support is truncated at
// mean + 10*sqrt(mean) and renormalized.
double integrate_over_count(const CountPrior& prior, const std::function<double(long)>& f);

}  // namespace kinship::evidence
