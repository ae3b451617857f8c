#include "tvc/synth.hpp"

#include <algorithm>
#include <cmath>

#include "tvc/error.hpp"
#include "tvc/rng.hpp"

namespace tvc {

namespace {
constexpr double kPi = 3.14159265358979323846;

struct StripeClass {
    double ux, uy;  // stripe direction (gradient of the intensity profile)
    double period;  // pixels
};

// Visual classes differ by orientation; temporal classes by base period. The
// planted cross-modal correspondence is carried by the amplitude-envelope
// family (beat / constant / burst), which reshapes how much code-space radius
// each class occupies in the shared latent cloud.
const StripeClass kStripeClasses[3] = {
    {0.0, 1.0, 6.0},                                  // horizontal stripes
    {1.0, 0.0, 8.0},                                  // vertical stripes
    {0.70710678118654752, 0.70710678118654752, 16.0},  // diagonal
};

const double kBasePeriods[3] = {8.0, 12.0, 18.0};

enum class Envelope { Beat, Flat, Burst };
const Envelope kEnvelopes[3] = {Envelope::Beat, Envelope::Flat, Envelope::Burst};

double envelope_value(Envelope kind, double phase01, bool temporal) {
    // phase01 = 2*pi * position / envelope period + offset. The temporal side
    // swings deeper because instance normalization compresses its range.
    switch (kind) {
        case Envelope::Beat:
            return 0.35 + 0.8 * (0.5 + 0.5 * std::cos(phase01));
        case Envelope::Flat:
            return 1.0;
        case Envelope::Burst: {
            // quiet background with short pronounced bands
            const double c = 0.5 + 0.5 * std::cos(phase01);
            return 0.1 + 1.1 * c * c * c * c * c;
        }
    }
    return 1.0;
}

}  // namespace

std::vector<Image> make_stripe_images(int count, int height, int width, int classes,
                                      uint64_t seed, std::vector<int>* labels) {
    require(count >= 1 && height >= 1 && width >= 1, Err::ShapeMismatch, "bad image geometry");
    require(classes >= 1 && classes <= 3, Err::ShapeMismatch, "classes must be 1..3");
    Rng rng(seed);
    std::vector<Image> out;
    out.reserve(size_t(count));
    if (labels) labels->clear();

    for (int s = 0; s < count; ++s) {
        const int cls = s % classes;
        const StripeClass& sc = kStripeClasses[cls];
        const double period = sc.period * rng.uniform(0.9, 1.15);
        // phase anchored near zero so class centroids stay crisp
        const double p1 = rng.uniform(-0.8, 0.8);
        const double a1 = rng.uniform(0.8, 1.2);
        const bool h2 = rng.uniform01() < 0.5;
        const double a2 = h2 ? rng.uniform(0.08, 0.2) : 0.0;
        const double p2 = rng.uniform(0.0, 2.0 * kPi);
        const double mean = rng.uniform(0.47, 0.53);
        const double contrast = 0.22;
        // contrast envelope runs along the orthogonal direction
        const double env_period = double(width) * rng.uniform(1.2, 2.2);
        const double env_ph = rng.uniform(0.0, 2.0 * kPi);

        Image img(height, width, 1);
        for (int y = 0; y < height; ++y) {
            for (int x = 0; x < width; ++x) {
                const double u = sc.ux * double(x) + sc.uy * double(y);
                const double w = sc.uy * double(x) + sc.ux * double(y);
                const double env =
                    envelope_value(kEnvelopes[cls], 2.0 * kPi * w / env_period + env_ph, false);
                double g = a1 * std::sin(2.0 * kPi * u / period + p1);
                g += a2 * std::sin(4.0 * kPi * u / period + p2);
                g *= env;
                g += 0.08 * rng.normal();
                img.at(y, x, 0) = std::clamp(mean + contrast * g, 0.0, 1.0);
            }
        }
        out.push_back(std::move(img));
        if (labels) labels->push_back(cls);
    }
    return out;
}

std::vector<TimeSeries> make_sine_series(int count, int length, int classes, uint64_t seed,
                                         std::vector<int>* labels) {
    require(count >= 1 && length >= 1, Err::ShapeMismatch, "bad series geometry");
    require(classes >= 1 && classes <= 3, Err::ShapeMismatch, "classes must be 1..3");
    Rng rng(seed);
    std::vector<TimeSeries> out;
    out.reserve(size_t(count));
    if (labels) labels->clear();

    for (int s = 0; s < count; ++s) {
        const int cls = s % classes;
        const double period = kBasePeriods[cls] * rng.uniform(0.9, 1.15);
        const double a1 = rng.uniform(0.8, 1.2);
        const double p1 = rng.uniform(0.0, 2.0 * kPi);
        const bool h2 = rng.uniform01() < 0.5;
        const double a2 = h2 ? rng.uniform(0.08, 0.2) : 0.0;
        const double p2 = rng.uniform(0.0, 2.0 * kPi);
        const double trend = rng.uniform(-0.25, 0.25);
        const double env_period = double(length) * rng.uniform(0.45, 0.8);
        const double env_ph = rng.uniform(0.0, 2.0 * kPi);

        TimeSeries ts;
        ts.values.reserve(size_t(length));
        for (int t = 0; t < length; ++t) {
            const double env =
                envelope_value(kEnvelopes[cls], 2.0 * kPi * t / env_period + env_ph, true);
            double v = a1 * std::sin(2.0 * kPi * t / period + p1);
            v += a2 * std::sin(4.0 * kPi * t / period + p2);
            v *= env;
            v += trend * (double(t) - 0.5 * length) / double(length);
            v += 0.03 * rng.normal();
            ts.values.push_back(v);
        }
        out.push_back(std::move(ts));
        if (labels) labels->push_back(cls);
    }
    return out;
}

namespace {
uint64_t stream_seed(uint64_t base, uint64_t stream) {
    return base ^ (0x9E3779B97F4A7C15ULL * (stream + 1));
}
constexpr int kTrainCount = 256;
}  // namespace

std::vector<Image> desk_train_images(int height, int width, uint64_t seed,
                                     std::vector<int>* labels) {
    return make_stripe_images(kTrainCount, height, width, 3, stream_seed(seed, 11), labels);
}

std::vector<TimeSeries> desk_train_series(int length, uint64_t seed, std::vector<int>* labels) {
    return make_sine_series(kTrainCount, length, 3, stream_seed(seed, 12), labels);
}

std::vector<Image> desk_heldout_images(int height, int width, uint64_t seed, int count,
                                       std::vector<int>* labels) {
    return make_stripe_images(count, height, width, 3, stream_seed(seed, 13), labels);
}

std::vector<TimeSeries> desk_heldout_series(int length, uint64_t seed, int count,
                                            std::vector<int>* labels) {
    return make_sine_series(count, length, 3, stream_seed(seed, 14), labels);
}

}  // namespace tvc
