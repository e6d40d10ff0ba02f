#pragma once

#include <string>

namespace kinship {

// A likelihood ratio outcome. Zero denominators are legitimate results in
// this domain (a mu=0 transmission mismatch annihilates the null pedigree),
// so infinity and 0/0 are first-class states rather than exceptions.
class LrValue {
  public:
    enum class Kind { Finite, Infinite, Undefined };

    LrValue() : kind_(Kind::Undefined), value_(0.0) {}

    static LrValue finite(double v) { return LrValue(Kind::Finite, v); }
    static LrValue infinite() { return LrValue(Kind::Infinite, 0.0); }
    static LrValue undefined() { return LrValue(Kind::Undefined, 0.0); }

    // numerator/denominator with the degenerate cases mapped to flags:
    // x/0 with x>0 -> Infinite, 0/0 -> Undefined.
    static LrValue from_ratio(double numerator, double denominator);

    Kind kind() const { return kind_; }
    bool is_finite() const { return kind_ == Kind::Finite; }
    bool is_infinite() const { return kind_ == Kind::Infinite; }
    bool is_undefined() const { return kind_ == Kind::Undefined; }

    // Only meaningful when finite.
    double value() const;

    // Reciprocal, with flags mapped accordingly (1/inf -> 0, 1/0 -> inf).
    LrValue inverted() const;

    std::string to_string() const;

    friend bool operator==(const LrValue& a, const LrValue& b) {
        if (a.kind_ != b.kind_) return false;
        return a.kind_ != Kind::Finite || a.value_ == b.value_;
    }

  private:
    LrValue(Kind k, double v) : kind_(k), value_(v) {}
    Kind kind_;
    double value_;
};

}  // namespace kinship
