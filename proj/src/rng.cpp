#include "agp/rng.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace agp {

int Rng::uniform_int(int bound) {
    if (bound <= 0) throw std::invalid_argument("Rng::uniform_int: bound must be positive");
    const uint64_t b = static_cast<uint64_t>(bound);
    // Rejection sampling to avoid modulo bias.
    const uint64_t limit = std::numeric_limits<uint64_t>::max() -
                           (std::numeric_limits<uint64_t>::max() % b);
    uint64_t v;
    do {
        v = next_u64();
    } while (v >= limit);
    return static_cast<int>(v % b);
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    // u1 in (0, 1] keeps the log finite.
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

std::vector<int> Rng::sample_indices(int population, int count) {
    if (count < 0 || count > population) {
        throw std::invalid_argument("Rng::sample_indices: count out of range");
    }
    std::vector<int> idx(population);
    for (int i = 0; i < population; ++i) idx[i] = i;
    // Partial Fisher-Yates: the first `count` entries are the sample.
    for (int i = 0; i < count; ++i) {
        const int j = i + uniform_int(population - i);
        std::swap(idx[i], idx[j]);
    }
    idx.resize(count);
    return idx;
}

void Rng::shuffle(std::vector<int>& v) {
    for (int i = static_cast<int>(v.size()) - 1; i > 0; --i) {
        const int j = uniform_int(i + 1);
        std::swap(v[i], v[j]);
    }
}

}  // namespace agp
