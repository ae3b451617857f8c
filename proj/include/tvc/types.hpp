#pragma once

#include <optional>
#include <vector>

#include "tvc/mat.hpp"

namespace tvc {

enum class Modality { Visual, Temporal };

struct NormStats {
    double mean = 0.0;
    double std = 1.0;
};

// Univariate series; norm_stats is set once instance_normalize has run so the
// transform can be inverted exactly.
struct TimeSeries {
    std::vector<double> values;
    std::optional<NormStats> norm_stats;

    int length() const { return int(values.size()); }
};

// H x W x C raster, pixels in [0,1], row-major (y, x, c), C in {1,3}.
struct Image {
    int height = 0, width = 0, channels = 1;
    std::vector<double> pixels;

    Image() = default;
    Image(int h, int w, int c, double fill = 0.0)
        : height(h), width(w), channels(c), pixels(size_t(h) * w * c, fill) {}

    double& at(int y, int x, int c) { return pixels[(size_t(y) * width + x) * channels + c]; }
    double at(int y, int x, int c) const { return pixels[(size_t(y) * width + x) * channels + c]; }
};

struct VisualGeometry {
    int height = 0, width = 0, factor = 1, channels = 1;
};

struct TemporalGeometry {
    int length = 0, segment = 1;
    int pad = 0;  // left pad added in lenient mode, stripped on assembly
};

// N x P token matrix plus the geometry needed to invert tokenization.
struct TokenSequence {
    Mat tokens;  // N x P
    Modality origin = Modality::Visual;
    VisualGeometry vis;    // valid when origin == Visual
    TemporalGeometry temp;  // valid when origin == Temporal
};

}  // namespace tvc
