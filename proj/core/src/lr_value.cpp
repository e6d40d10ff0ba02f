#include "kinship/lr_value.hpp"

#include "kinship/diagnostics.hpp"
#include "kinship/numeric.hpp"

namespace kinship {

LrValue LrValue::from_ratio(double numerator, double denominator) {
    if (numerator < 0.0 || denominator < 0.0)
        throw Error("likelihood ratio components must be nonnegative");
    if (denominator == 0.0)
        return numerator == 0.0 ? undefined() : infinite();
    return finite(numerator / denominator);
}

double LrValue::value() const {
    if (kind_ != Kind::Finite) throw Error("LrValue: value() on a flagged result");
    return value_;
}

LrValue LrValue::inverted() const {
    switch (kind_) {
        case Kind::Infinite: return finite(0.0);
        case Kind::Undefined: return undefined();
        case Kind::Finite: break;
    }
    if (value_ == 0.0) return infinite();
    return finite(1.0 / value_);
}

std::string LrValue::to_string() const {
    switch (kind_) {
        case Kind::Infinite: return "+infinity";
        case Kind::Undefined: return "undefined";
        case Kind::Finite: break;
    }
    return format_double(value_);
}

}  // namespace kinship
