#include "tvc/tokenize.hpp"

#include <algorithm>
#include <cmath>

namespace tvc {

TokenSequence patchify_image(const Image& img, int factor) {
    require(img.height >= 1 && img.width >= 1, Err::GeometryMismatch, "empty image");
    require(img.channels == 1 || img.channels == 3, Err::GeometryMismatch, "channels must be 1 or 3");
    require(factor >= 1, Err::NonDivisibleGeometry, "factor must be >= 1");
    require(img.height % factor == 0 && img.width % factor == 0, Err::NonDivisibleGeometry,
            "downsample factor must divide height and width");

    const int py = img.height / factor;
    const int px = img.width / factor;
    const int n = py * px;
    const int p = factor * factor * img.channels;

    TokenSequence out;
    out.origin = Modality::Visual;
    out.vis = {img.height, img.width, factor, img.channels};
    out.tokens = Mat(n, p);
    for (int by = 0; by < py; ++by) {
        for (int bx = 0; bx < px; ++bx) {
            const int tok = by * px + bx;
            int feat = 0;
            for (int y = 0; y < factor; ++y)
                for (int x = 0; x < factor; ++x)
                    for (int c = 0; c < img.channels; ++c)
                        out.tokens(tok, feat++) = img.at(by * factor + y, bx * factor + x, c);
        }
    }
    return out;
}

Image unpatchify_image(const TokenSequence& tokens) {
    require(tokens.origin == Modality::Visual, Err::GeometryMismatch, "tokens are not visual");
    const auto& g = tokens.vis;
    const long long need = (long long)g.height * g.width * g.channels;
    const long long have = (long long)tokens.tokens.rows * tokens.tokens.cols;
    require(need == have, Err::GeometryMismatch, "token count does not match claimed geometry");
    require(g.height % g.factor == 0 && g.width % g.factor == 0, Err::GeometryMismatch,
            "geometry not divisible by factor");
    const int py = g.height / g.factor;
    const int px = g.width / g.factor;
    require(tokens.tokens.rows == py * px, Err::GeometryMismatch, "patch grid mismatch");
    require(tokens.tokens.cols == g.factor * g.factor * g.channels, Err::GeometryMismatch,
            "patch feature count mismatch");

    Image img(g.height, g.width, g.channels);
    for (int by = 0; by < py; ++by) {
        for (int bx = 0; bx < px; ++bx) {
            const int tok = by * px + bx;
            int feat = 0;
            for (int y = 0; y < g.factor; ++y)
                for (int x = 0; x < g.factor; ++x)
                    for (int c = 0; c < g.channels; ++c)
                        img.at(by * g.factor + y, bx * g.factor + x, c) =
                            std::clamp(tokens.tokens(tok, feat++), 0.0, 1.0);
        }
    }
    return img;
}

TokenSequence segment_series(const TimeSeries& x, int segment, SegmentMode mode) {
    const int len = x.length();
    require(len >= 1, Err::GeometryMismatch, "empty series");
    require(segment >= 1, Err::NonDivisibleLength, "segment must be >= 1");

    int pad = 0;
    if (len % segment != 0) {
        require(mode == SegmentMode::Lenient, Err::NonDivisibleLength,
                "segment length must divide series length in strict mode");
        pad = segment - len % segment;
    }

    const int total = len + pad;
    const int n = total / segment;

    TokenSequence out;
    out.origin = Modality::Temporal;
    out.temp = {len, segment, pad};
    out.tokens = Mat(n, segment);
    for (int i = 0; i < total; ++i) {
        const double v = i < pad ? x.values.front() : x.values[size_t(i - pad)];
        out.tokens(i / segment, i % segment) = v;
    }
    return out;
}

TimeSeries assemble_series(const TokenSequence& tokens) {
    require(tokens.origin == Modality::Temporal, Err::GeometryMismatch, "tokens are not temporal");
    const auto& g = tokens.temp;
    const long long have = (long long)tokens.tokens.rows * tokens.tokens.cols;
    require(have == (long long)g.length + g.pad, Err::GeometryMismatch,
            "token count does not match claimed length");
    require(tokens.tokens.cols == g.segment, Err::GeometryMismatch, "segment width mismatch");

    TimeSeries out;
    out.values.reserve(size_t(g.length));
    for (long long i = g.pad; i < have; ++i)
        out.values.push_back(tokens.tokens(int(i / g.segment), int(i % g.segment)));
    return out;
}

NormStats compute_norm_stats(const std::vector<double>& values) {
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= double(values.size());
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= double(values.size());
    double sd = std::sqrt(var);
    if (sd < 1e-8) sd = 1.0;
    return {mean, sd};
}

TimeSeries instance_normalize(const TimeSeries& x) {
    require(x.length() >= 1, Err::GeometryMismatch, "empty series");
    const NormStats st = compute_norm_stats(x.values);
    TimeSeries out;
    out.norm_stats = st;
    out.values.reserve(x.values.size());
    for (double v : x.values) out.values.push_back((v - st.mean) / st.std);
    return out;
}

TimeSeries denormalize(const std::vector<double>& values, const NormStats& stats) {
    TimeSeries out;
    out.values.reserve(values.size());
    for (double v : values) out.values.push_back(v * stats.std + stats.mean);
    return out;
}

TimeSeries denormalize(const TimeSeries& x) {
    require(x.norm_stats.has_value(), Err::GeometryMismatch, "series carries no norm stats");
    return denormalize(x.values, *x.norm_stats);
}

}  // namespace tvc
