#include "kinship/numeric.hpp"

#include <cstdio>
#include <cstdlib>
#include <limits>

#include "kinship/diagnostics.hpp"

namespace kinship {

namespace {
constexpr double kLogSwitch = 1e-300;
}

void ProductAccumulator::multiply(double factor) {
    if (factor < 0.0 || !std::isfinite(factor))
        throw Error("ProductAccumulator: factors must be finite and nonnegative");
    if (zero_) return;
    if (factor == 0.0) {
        zero_ = true;
        return;
    }
    if (log_mode_) {
        log_sum_ += std::log(factor);
        return;
    }
    product_ *= factor;
    if (product_ < kLogSwitch) {
        log_mode_ = true;
        log_sum_ = std::log(product_);
        product_ = 1.0;
    }
}

double ProductAccumulator::value() const {
    if (zero_) return 0.0;
    return log_mode_ ? std::exp(log_sum_) : product_;
}

double ProductAccumulator::log_value() const {
    if (zero_) return -std::numeric_limits<double>::infinity();
    return log_mode_ ? log_sum_ : std::log(product_);
}

std::string format_double(double v) {
    char buf[64];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

double log_rising_factorial(double x, int m) {
    if (x <= 0.0) throw Error("log_rising_factorial: x must be positive");
    if (m < 0) throw Error("log_rising_factorial: m must be nonnegative");
    // lgamma(x+m) - lgamma(x); explicit product is fine for the small m used
    // here and avoids cancellation for huge x.
    double s = 0.0;
    for (int i = 0; i < m; ++i) s += std::log(x + i);
    return s;
}

}  // namespace kinship
