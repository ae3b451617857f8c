#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace tvc {

// mt19937_64 with hand-rolled draws. std:: distributions differ between
// standard libraries, which would break bit-exact reproducibility of
// checkpoints; these keep every draw a pure function of the seed.
class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    uint64_t next_u64() { return gen_(); }

    // uniform in [0, 1) with 53 random bits
    double uniform01() { return double(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // uniform in [0, n), n >= 1
    int below(int n) { return int(next_u64() % uint64_t(n)); }

    // Fisher-Yates
    template <class T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = size_t(next_u64() % i);
            std::swap(v[i - 1], v[j]);
        }
    }

    // index drawn with probability weights[i] / sum(weights); weights >= 0, sum > 0
    int pick_weighted(const std::vector<double>& weights);

    // standard normal via Box-Muller, fully determined by the seed
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

inline int Rng::pick_weighted(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double r = uniform01() * total;
    double acc = 0.0;
    int last = 0;
    for (size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] <= 0.0) continue;
        acc += weights[i];
        last = int(i);
        if (r < acc) return last;
    }
    return last;
}

}  // namespace tvc
