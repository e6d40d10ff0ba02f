#pragma once

#include <cmath>
#include <string>

namespace kinship {

// Running product that drops to log-space once the partial product would
// underflow (threshold 1e-300). Long chains of per-member or per-entry
// probabilities stay representable this way.
class ProductAccumulator {
  public:
    void multiply(double factor);

    bool is_zero() const { return zero_; }
    // Collapses back to a double; underflows to 0.0 only if the true value
    // really is below DBL_MIN-ish range.
    double value() const;
    // log of the product; -inf when any factor was exactly 0.
    double log_value() const;

  private:
    bool zero_ = false;
    bool log_mode_ = false;
    double product_ = 1.0;
    double log_sum_ = 0.0;
};

// Shortest decimal representation that round-trips to the same double.
// (gcc 11 has no std::format; this is the usual precision-climb.)
std::string format_double(double v);

// Rising factorial x^(m) = x (x+1) ... (x+m-1), in log space for stability.
double log_rising_factorial(double x, int m);

}  // namespace kinship
