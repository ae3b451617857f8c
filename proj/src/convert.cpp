#include "tvc/convert.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tvc/tokenize.hpp"

namespace tvc {

namespace {

TokenSequence segment_for_bundle(const std::vector<double>& normalized, const BundleConfig& cfg) {
    TimeSeries tmp;
    tmp.values = normalized;
    const int want = cfg.series_length();
    const int len = tmp.length();
    if (len == want) return segment_series(tmp, cfg.segment);
    require(len < want && want - len < cfg.segment, Err::GeometryMismatch,
            "series length incompatible with bundle geometry");
    return segment_series(tmp, cfg.segment, SegmentMode::Lenient);
}

Image quantized_to_image(const Mat& q, const TokenizerBundle& bundle) {
    const Mat tokens = decode(q, bundle.visual.dec);
    TokenSequence ts;
    ts.tokens = tokens;
    ts.origin = Modality::Visual;
    ts.vis = {bundle.cfg.image_height(), bundle.cfg.image_width(), bundle.cfg.factor,
              bundle.cfg.image_channels()};
    return unpatchify_image(ts);
}

Mat series_to_quantized(const TimeSeries& x, const NormStats& stats,
                        const TokenizerBundle& bundle) {
    std::vector<double> normalized;
    normalized.reserve(x.values.size());
    for (double v : x.values) normalized.push_back((v - stats.mean) / stats.std);
    const TokenSequence tok = segment_for_bundle(normalized, bundle.cfg);
    const Mat e = encode(tok.tokens, bundle.temporal.enc);
    return quantize(e, bundle.book).quantized;
}

}  // namespace

Image series_to_image_with_stats(const TimeSeries& x, const NormStats& stats,
                                 const TokenizerBundle& bundle) {
    require(bundle.frozen, Err::BundleNotFrozen, "conversion needs a frozen bundle");
    return quantized_to_image(series_to_quantized(x, stats, bundle), bundle);
}

Image series_to_image(const TimeSeries& x, const TokenizerBundle& bundle) {
    require(bundle.frozen, Err::BundleNotFrozen, "conversion needs a frozen bundle");
    const NormStats stats = compute_norm_stats(x.values);
    return series_to_image_with_stats(x, stats, bundle);
}

TimeSeries image_to_series(const Image& img, const TokenizerBundle& bundle,
                           const NormStats& stats) {
    require(bundle.frozen, Err::BundleNotFrozen, "conversion needs a frozen bundle");
    require(img.height == bundle.cfg.image_height() && img.width == bundle.cfg.image_width() &&
                img.channels == bundle.cfg.image_channels(),
            Err::GeometryMismatch, "image does not match bundle geometry");
    const TokenSequence tok = patchify_image(img, bundle.cfg.factor);
    const Mat e = encode(tok.tokens, bundle.visual.enc);
    const QuantizeResult qr = quantize(e, bundle.book);
    const Mat tokens = decode(qr.quantized, bundle.temporal.dec);

    TokenSequence out_tok;
    out_tok.tokens = tokens;
    out_tok.origin = Modality::Temporal;
    out_tok.temp = {bundle.cfg.series_length(), bundle.cfg.segment, 0};
    const TimeSeries normalized = assemble_series(out_tok);
    TimeSeries out = denormalize(normalized.values, stats);
    out.norm_stats = stats;
    return out;
}

Image indices_to_image(const IndexSequence& indices, const TokenizerBundle& bundle) {
    require(bundle.frozen, Err::BundleNotFrozen, "conversion needs a frozen bundle");
    require(indices.tokens == bundle.cfg.n_tokens, Err::GeometryMismatch,
            "index grid does not match bundle");
    return quantized_to_image(lookup(indices, bundle.book), bundle);
}

TimeSeries indices_to_series(const IndexSequence& indices, const TokenizerBundle& bundle,
                             const NormStats& stats) {
    require(bundle.frozen, Err::BundleNotFrozen, "conversion needs a frozen bundle");
    require(indices.tokens == bundle.cfg.n_tokens, Err::GeometryMismatch,
            "index grid does not match bundle");
    const Mat tokens = decode(lookup(indices, bundle.book), bundle.temporal.dec);
    TokenSequence out_tok;
    out_tok.tokens = tokens;
    out_tok.origin = Modality::Temporal;
    out_tok.temp = {bundle.cfg.series_length(), bundle.cfg.segment, 0};
    const TimeSeries normalized = assemble_series(out_tok);
    TimeSeries out = denormalize(normalized.values, stats);
    out.norm_stats = stats;
    return out;
}

int TileOutpainter::dominant_period(const Image& observed) {
    const int w = observed.width;
    require(w >= 4, Err::GeometryMismatch, "image too narrow for period detection");
    std::vector<double> profile(size_t(w), 0.0);
    for (int x = 0; x < w; ++x) {
        double s = 0.0;
        for (int y = 0; y < observed.height; ++y)
            for (int c = 0; c < observed.channels; ++c) s += observed.at(y, x, c);
        profile[size_t(x)] = s / double(observed.height * observed.channels);
    }
    double mean = 0.0;
    for (double v : profile) mean += v;
    mean /= double(w);

    int best_lag = 2;
    double best_corr = -std::numeric_limits<double>::infinity();
    for (int lag = 2; lag <= w / 2; ++lag) {
        double corr = 0.0;
        for (int x = 0; x + lag < w; ++x)
            corr += (profile[size_t(x)] - mean) * (profile[size_t(x + lag)] - mean);
        corr /= double(w - lag);
        if (corr > best_corr) {
            best_corr = corr;
            best_lag = lag;
        }
    }
    return best_lag;
}

Image TileOutpainter::outpaint(const Image& observed, int out_width) const {
    require(out_width > observed.width, Err::GeometryMismatch, "output must be wider than input");
    const int period = dominant_period(observed);
    Image out(observed.height, out_width, observed.channels);
    for (int y = 0; y < observed.height; ++y)
        for (int x = 0; x < observed.width; ++x)
            for (int c = 0; c < observed.channels; ++c) out.at(y, x, c) = observed.at(y, x, c);
    // repeat the trailing period-wide column block
    for (int x = observed.width; x < out_width; ++x) {
        const int src = observed.width - period + (x - observed.width) % period;
        for (int y = 0; y < observed.height; ++y)
            for (int c = 0; c < observed.channels; ++c) out.at(y, x, c) = out.at(y, src, c);
    }
    return out;
}

Image OracleOutpainter::outpaint(const Image& observed, int out_width) const {
    require(out_width > observed.width, Err::GeometryMismatch, "output must be wider than input");
    const int w = bundle_.cfg.image_width();
    require(observed.width == w, Err::GeometryMismatch, "observation width must match bundle");
    require((out_width - observed.width) % w == 0, Err::GeometryMismatch,
            "extension must be a whole number of image blocks");
    const int blocks = (out_width - observed.width) / w;
    const int l = bundle_.cfg.series_length();

    Image out(observed.height, out_width, observed.channels);
    for (int y = 0; y < observed.height; ++y)
        for (int x = 0; x < observed.width; ++x)
            for (int c = 0; c < observed.channels; ++c) out.at(y, x, c) = observed.at(y, x, c);

    for (int b = 0; b < blocks; ++b) {
        TimeSeries chunk;
        chunk.values.reserve(size_t(l));
        for (int t = 0; t < l; ++t) {
            const size_t at = size_t(b) * l + size_t(t);
            chunk.values.push_back(at < future_.values.size() ? future_.values[at]
                                                              : future_.values.back());
        }
        const Image painted = series_to_image_with_stats(chunk, stats_, bundle_);
        for (int y = 0; y < out.height; ++y)
            for (int x = 0; x < w; ++x)
                for (int c = 0; c < out.channels; ++c)
                    out.at(y, observed.width + b * w + x, c) = painted.at(y, x, c);
    }
    return out;
}

void ForecastConfig::validate(const BundleConfig& cfg) const {
    require(w_out > w_obs, Err::GeometryMismatch, "forecast image must widen the observation");
    require(w_obs == cfg.image_width(), Err::GeometryMismatch,
            "observation width must equal the bundle image width");
    require((w_out - w_obs) % w_obs == 0, Err::GeometryMismatch,
            "extension must be a whole number of observation widths");
    require(context_length == cfg.series_length(), Err::GeometryMismatch,
            "context length must equal the bundle series length");
    require(horizon >= 1, Err::GeometryMismatch, "horizon must be >= 1");
}

TimeSeries forecast(const TimeSeries& observed, const ForecastConfig& cfg,
                    const TokenizerBundle& bundle, const Outpainter& outpainter) {
    require(bundle.frozen, Err::BundleNotFrozen, "forecast needs a frozen bundle");
    cfg.validate(bundle.cfg);
    require(observed.length() == cfg.context_length, Err::GeometryMismatch,
            "observation length must equal the configured context");

    const NormStats stats = compute_norm_stats(observed.values);
    const Image obs_img = series_to_image_with_stats(observed, stats, bundle);
    const Image painted = outpainter.outpaint(obs_img, cfg.w_out);

    require(painted.height == obs_img.height && painted.width == cfg.w_out &&
                painted.channels == obs_img.channels,
            Err::OutpainterContractViolation, "outpainter changed the raster geometry");
    for (int y = 0; y < obs_img.height; ++y)
        for (int x = 0; x < obs_img.width; ++x)
            for (int c = 0; c < obs_img.channels; ++c)
                require(painted.at(y, x, c) == obs_img.at(y, x, c),
                        Err::OutpainterContractViolation,
                        "outpainter modified the observed prefix");

    // decode only the extension, one observation-width block at a time
    const int w = cfg.w_obs;
    const int blocks = (cfg.w_out - cfg.w_obs) / w;
    std::vector<double> future;
    future.reserve(size_t(blocks) * size_t(bundle.cfg.series_length()));
    for (int b = 0; b < blocks; ++b) {
        Image block(painted.height, w, painted.channels);
        for (int y = 0; y < painted.height; ++y)
            for (int x = 0; x < w; ++x)
                for (int c = 0; c < painted.channels; ++c)
                    block.at(y, x, c) = painted.at(y, cfg.w_obs + b * w + x, c);
        const TimeSeries decoded = image_to_series(block, bundle, stats);
        future.insert(future.end(), decoded.values.begin(), decoded.values.end());
    }

    TimeSeries out;
    out.norm_stats = stats;
    if (int(future.size()) >= cfg.horizon) {
        out.values.assign(future.begin(), future.begin() + cfg.horizon);
    } else {
        out.values = future;
        while (int(out.values.size()) < cfg.horizon) out.values.push_back(future.back());
    }
    return out;
}

Image stylize(const Image& img, const TimeSeries& x, const TokenizerBundle& bundle) {
    require(bundle.frozen, Err::BundleNotFrozen, "stylize needs a frozen bundle");
    require(img.height == bundle.cfg.image_height() && img.width == bundle.cfg.image_width() &&
                img.channels == bundle.cfg.image_channels(),
            Err::GeometryMismatch, "image does not match bundle geometry");

    const NormStats stats = compute_norm_stats(x.values);
    Mat q_t = series_to_quantized(x, stats, bundle);

    const TokenSequence tok = patchify_image(img, bundle.cfg.factor);
    const Mat e_v = encode(tok.tokens, bundle.visual.enc);
    const Mat q_v = quantize(e_v, bundle.book).quantized;

    add_inplace(q_t, q_v);
    return quantized_to_image(q_t, bundle);
}

ForecastErrors eval_forecast(std::span<const double> pred, std::span<const double> truth) {
    require(pred.size() == truth.size(), Err::LengthMismatch, "prediction/truth length mismatch");
    require(!pred.empty(), Err::LengthMismatch, "empty prediction");
    ForecastErrors out;
    for (size_t i = 0; i < pred.size(); ++i) {
        const double d = pred[i] - truth[i];
        out.mse += d * d;
        out.mae += std::fabs(d);
    }
    out.mse /= double(pred.size());
    out.mae /= double(pred.size());
    return out;
}

namespace {

// Pooled population covariance of channels i and j over a set of samples.
Mat pooled_correlation(const std::vector<MultiSeries>& set) {
    const int d = int(set.front().size());
    Mat cov(d, d, 0.0);
    std::vector<double> mean(size_t(d), 0.0);
    long long total = 0;
    for (const auto& sample : set) {
        require(int(sample.size()) == d, Err::ShapeMismatch, "channel count differs across set");
        const size_t t = sample.front().size();
        for (const auto& ch : sample)
            require(ch.size() == t, Err::ShapeMismatch, "channel lengths differ within sample");
        total += (long long)t;
        for (int i = 0; i < d; ++i)
            for (size_t s = 0; s < t; ++s) mean[size_t(i)] += sample[size_t(i)][s];
    }
    for (int i = 0; i < d; ++i) mean[size_t(i)] /= double(total);
    for (const auto& sample : set) {
        const size_t t = sample.front().size();
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                for (size_t s = 0; s < t; ++s)
                    cov(i, j) += (sample[size_t(i)][s] - mean[size_t(i)]) *
                                 (sample[size_t(j)][s] - mean[size_t(j)]);
    }
    for (double& v : cov.a) v /= double(total);

    Mat corr(d, d, 0.0);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            const double denom = std::sqrt(cov(i, i) * cov(j, j));
            corr(i, j) = denom > 0.0 ? cov(i, j) / denom : 0.0;  // degenerate channels give 0
        }
    return corr;
}

}  // namespace

double correlational_score(const std::vector<MultiSeries>& real,
                           const std::vector<MultiSeries>& synth) {
    require(!real.empty() && !synth.empty(), Err::ShapeMismatch, "empty series set");
    const int d = int(real.front().size());
    require(d >= 2, Err::ShapeMismatch, "need at least two channels");
    require(int(synth.front().size()) == d, Err::ShapeMismatch, "channel count mismatch");

    const Mat cr = pooled_correlation(real);
    const Mat cf = pooled_correlation(synth);
    double sum = 0.0;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) sum += std::fabs(cr(i, j) - cf(i, j));
    return sum / 10.0;
}

}  // namespace tvc
