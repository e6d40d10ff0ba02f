#include "kinship/evidence.hpp"

#include <cmath>

#include "kinship/diagnostics.hpp"
#include "kinship/numeric.hpp"

namespace kinship::evidence {

CombinedResult combine_lrs(const std::vector<EvidenceItem>& items) {
    CombinedResult result;
    bool any_zero = false, any_infinite = false, any_undefined = false;
    ProductAccumulator acc;

    for (const auto& item : items) {
        result.per_item.emplace_back(item.id, item.lr);
        switch (item.lr.kind()) {
            case LrValue::Kind::Undefined:
                any_undefined = true;
                break;
            case LrValue::Kind::Infinite:
                any_infinite = true;
                break;
            case LrValue::Kind::Finite:
                if (item.lr.value() == 0.0)
                    any_zero = true;
                else
                    acc.multiply(item.lr.value());
                break;
        }
    }

    if (any_undefined || (any_zero && any_infinite))
        result.overall = LrValue::undefined();
    else if (any_infinite)
        result.overall = LrValue::infinite();
    else if (any_zero)
        result.overall = LrValue::finite(0.0);
    else
        result.overall = LrValue::finite(acc.value());
    return result;
}

PosteriorResult posterior_from_lr(const HypothesisPair& h, const LrValue& overall_lr) {
    if (!(h.prior_odds > 0.0) || !std::isfinite(h.prior_odds))
        throw Error("posterior_from_lr: prior odds must be positive and finite");

    PosteriorResult out{LrValue::undefined(), LrValue::undefined()};
    switch (overall_lr.kind()) {
        case LrValue::Kind::Undefined:
            return out;
        case LrValue::Kind::Infinite:
            out.odds = LrValue::infinite();
            out.prob_alt = LrValue::finite(1.0);
            return out;
        case LrValue::Kind::Finite:
            break;
    }
    const double odds = h.prior_odds * overall_lr.value();
    out.odds = LrValue::finite(odds);
    out.prob_alt = LrValue::finite(odds / (1.0 + odds));
    return out;
}

double selection_adjust(double p, long trials) {
    if (p < 0.0 || p > 1.0) throw Error("selection_adjust: p must lie in [0, 1]");
    if (trials < 1) throw Error("selection_adjust: trials must be >= 1");
    if (p == 1.0) return 1.0;
    // 1 - (1-p)^T, in the numerically stable form.
    return -std::expm1(static_cast<double>(trials) * std::log1p(-p));
}

CountPrior CountPrior::point(Quantity q, long value) {
    if (value < 1) throw Error("CountPrior: point value must be positive");
    CountPrior c;
    c.quantity = q;
    c.kind = Kind::Point;
    c.point_value = value;
    return c;
}

CountPrior CountPrior::uniform_range(Quantity q, long lo, long hi) {
    if (lo < 1 || lo > hi) throw Error("CountPrior: range must satisfy 1 <= lo <= hi");
    CountPrior c;
    c.quantity = q;
    c.kind = Kind::UniformRange;
    c.range_lo = lo;
    c.range_hi = hi;
    return c;
}

CountPrior CountPrior::poisson(Quantity q, double mean) {
    if (!(mean > 0.0)) throw Error("CountPrior: poisson mean must be positive");
    CountPrior c;
    c.quantity = q;
    c.kind = Kind::Poisson;
    c.poisson_mean = mean;
    return c;
}

double integrate_over_count(const CountPrior& prior, const std::function<double(long)>& f) {
    switch (prior.kind) {
        case CountPrior::Kind::Point:
            return f(prior.point_value);
        case CountPrior::Kind::UniformRange: {
            double sum = 0.0;
            for (long n = prior.range_lo; n <= prior.range_hi; ++n) sum += f(n);
            return sum / static_cast<double>(prior.range_hi - prior.range_lo + 1);
        }
        case CountPrior::Kind::Poisson:
            break;
    }
    const double mean = prior.poisson_mean;
    const long hi = static_cast<long>(std::floor(mean + 10.0 * std::sqrt(mean)));
    const double log_mean = std::log(mean);
    double mass = 0.0, sum = 0.0;
    for (long k = 0; k <= hi; ++k) {
        const double w = std::exp(k * log_mean - mean - std::lgamma(k + 1.0));
        mass += w;
        sum += w * f(k);
    }
    if (mass <= 0.0) throw Error("integrate_over_count: empty truncated support");
    return sum / mass;
}

}  // namespace kinship::evidence
