#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace agp {

/// Seeded random source with explicitly implemented draws (bounded ints,
/// Box-Muller normals, Fisher-Yates shuffles). mt19937_64 output is fixed by
/// the standard, so sequences are identical across platforms and compilers;
/// the std distributions are not, which is why they are not used here.
class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    uint64_t next_u64() { return gen_(); }

    /// Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound).
    int uniform_int(int bound);

    /// Standard normal via Box-Muller.
    double normal();

    /// count distinct indices drawn uniformly from [0, population).
    std::vector<int> sample_indices(int population, int count);

    void shuffle(std::vector<int>& v);

private:
    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace agp
