#include "kinship/random.hpp"

#include "kinship/diagnostics.hpp"

namespace kinship {

int Rng::uniform_int(int lo, int hi) {
    if (lo > hi) throw Error("Rng::uniform_int: empty range");
    const std::uint64_t span = static_cast<std::uint64_t>(hi) - lo + 1;
    return lo + static_cast<int>(engine_() % span);
}

std::size_t Rng::categorical(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw Error("Rng::categorical: negative weight");
        total += w;
    }
    if (total <= 0.0) throw Error("Rng::categorical: all weights zero");
    double u = uniform01() * total;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        u -= weights[i];
        if (u < 0.0) return i;
    }
    return weights.size() - 1;
}

}  // namespace kinship
