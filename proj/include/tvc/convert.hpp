#pragma once

#include <span>
#include <vector>

#include "tvc/bundle.hpp"
#include "tvc/types.hpp"

namespace tvc {

// normalize -> segment -> temporal encode -> quantize -> visual decode ->
// unpatchify (clamped). Deterministic on a frozen bundle.
Image series_to_image(const TimeSeries& x, const TokenizerBundle& bundle);

// Same pipeline but standardizing with caller-supplied stats, so several
// windows of one series can share a frame of reference.
Image series_to_image_with_stats(const TimeSeries& x, const NormStats& stats,
                                 const TokenizerBundle& bundle);

// patchify -> visual encode -> quantize -> temporal decode -> assemble ->
// denormalize with the supplied stats. Output length is always N * l.
TimeSeries image_to_series(const Image& img, const TokenizerBundle& bundle,
                           const NormStats& stats);

// Decode helpers shared by the alignment-driven paths.
Image indices_to_image(const IndexSequence& indices, const TokenizerBundle& bundle);
TimeSeries indices_to_series(const IndexSequence& indices, const TokenizerBundle& bundle,
                             const NormStats& stats);

// Widens an image to the right; the left prefix must be preserved exactly.
class Outpainter {
public:
    virtual ~Outpainter() = default;
    virtual Image outpaint(const Image& observed, int out_width) const = 0;
};

// Repeats the trailing dominant-period column block. The period is the
// autocorrelation argmax of the column-mean profile over lags [2, W/2],
// ties to the smallest lag.
class TileOutpainter : public Outpainter {
public:
    Image outpaint(const Image& observed, int out_width) const override;
    static int dominant_period(const Image& observed);
};

// Paints the ground-truth future through the bundle; bounds the forecast
// pipeline by pure round-trip error in tests.
class OracleOutpainter : public Outpainter {
public:
    OracleOutpainter(const TokenizerBundle& bundle, TimeSeries future, NormStats obs_stats)
        : bundle_(bundle), future_(std::move(future)), stats_(obs_stats) {}
    Image outpaint(const Image& observed, int out_width) const override;

private:
    const TokenizerBundle& bundle_;
    TimeSeries future_;
    NormStats stats_;
};

struct ForecastConfig {
    int context_length = 64;  // L
    int horizon = 128;        // H_f
    int w_obs = 16;
    int w_out = 48;

    void validate(const BundleConfig& cfg) const;
};

// Observation -> image -> outpaint -> decode the extension column blocks with
// the observation's normalization stats -> trim/pad to the horizon.
TimeSeries forecast(const TimeSeries& observed, const ForecastConfig& cfg,
                    const TokenizerBundle& bundle, const Outpainter& outpainter);

// Element-wise sum of the two quantized embeddings, decoded by the visual
// decoder without re-quantization.
Image stylize(const Image& img, const TimeSeries& x, const TokenizerBundle& bundle);

struct ForecastErrors {
    double mse = 0.0;
    double mae = 0.0;
};

ForecastErrors eval_forecast(std::span<const double> pred, std::span<const double> truth);

// One sample: channels x T.
using MultiSeries = std::vector<std::vector<double>>;

// (1/10) sum_{i,j} |corr_real(i,j) - corr_synth(i,j)| with population
// covariances pooled over each set; zero-variance channels contribute 0.
double correlational_score(const std::vector<MultiSeries>& real,
                           const std::vector<MultiSeries>& synth);

}  // namespace tvc
