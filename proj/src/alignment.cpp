#include "tvc/alignment.hpp"

#include <algorithm>
#include <cmath>

#include "tvc/rng.hpp"
#include "tvc/tokenize.hpp"

namespace tvc {

namespace {

uint64_t sub_seed(uint64_t seed, uint64_t stream) {
    return seed ^ (0x9E3779B97F4A7C15ULL * (stream + 1));
}

void init_uniform(Mat& m, int fan_in, Rng& rng) {
    const double s = 1.0 / std::sqrt(double(fan_in));
    for (double& v : m.a) v = rng.uniform(-s, s);
}

struct AlignTape {
    Mat x, q, k, v, p, att, y;
};

void softmax_rows(Mat& m) {
    for (int i = 0; i < m.rows; ++i) {
        double mx = m(i, 0);
        for (int j = 1; j < m.cols; ++j) mx = std::max(mx, m(i, j));
        double sum = 0.0;
        for (int j = 0; j < m.cols; ++j) {
            m(i, j) = std::exp(m(i, j) - mx);
            sum += m(i, j);
        }
        for (int j = 0; j < m.cols; ++j) m(i, j) /= sum;
    }
}

std::vector<Mat> forward(const AlignmentModel& model, const IndexSequence& src, AlignTape* tape) {
    require(src.tokens == model.n_tokens && src.heads == model.heads, Err::ShapeMismatch,
            "source index grid does not match model");
    const int n = model.n_tokens, e = model.embed_dim;

    Mat x(n, e);
    for (int i = 0; i < n; ++i) {
        for (int m = 0; m < model.heads; ++m) {
            const int32_t c = src.at(i, m);
            require(c >= 0 && c < model.codes, Err::IndexOutOfRange, "source index out of range");
            for (int j = 0; j < e; ++j) x(i, j) += model.code_embed[size_t(m)](c, j);
        }
        for (int j = 0; j < e; ++j) x(i, j) += model.pos(i, j);
    }

    Mat q = matmul(x, model.wq), k = matmul(x, model.wk), v = matmul(x, model.wv);
    Mat s = matmul_nt(q, k);
    const double scale = 1.0 / std::sqrt(double(e));
    for (double& val : s.a) val *= scale;
    softmax_rows(s);
    Mat att = matmul(s, v);
    Mat y = x;
    add_inplace(y, matmul(att, model.wo));

    std::vector<Mat> logits;
    logits.reserve(size_t(model.heads));
    for (int m = 0; m < model.heads; ++m) {
        Mat lg = matmul(y, model.out_w[size_t(m)]);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < model.codes; ++j) lg(i, j) += model.out_b[size_t(m)][size_t(j)];
        logits.push_back(std::move(lg));
    }

    if (tape) {
        tape->x = std::move(x);
        tape->q = std::move(q);
        tape->k = std::move(k);
        tape->v = std::move(v);
        tape->p = std::move(s);
        tape->att = std::move(att);
        tape->y = std::move(y);
    }
    return logits;
}

// Cross-entropy of one pair plus parameter gradients; scale multiplies the
// per-pair contribution (1 / batch size).
double pair_backward(const AlignmentModel& model, const IndexSequence& src,
                     const IndexSequence& target, double scale, AlignmentModel& grad) {
    AlignTape tape;
    std::vector<Mat> logits = forward(model, src, &tape);
    const int n = model.n_tokens, e = model.embed_dim;
    const double inv_nm = 1.0 / double(n * model.heads);

    double loss = 0.0;
    Mat d_y(n, e);
    for (int m = 0; m < model.heads; ++m) {
        Mat prob = logits[size_t(m)];
        softmax_rows(prob);
        Mat d_logit(n, model.codes);
        for (int i = 0; i < n; ++i) {
            const int32_t t = target.at(i, m);
            require(t >= 0 && t < model.codes, Err::IndexOutOfRange, "target index out of range");
            loss -= inv_nm * std::log(std::max(prob(i, t), 1e-300));
            for (int j = 0; j < model.codes; ++j) {
                d_logit(i, j) = scale * inv_nm * (prob(i, j) - (j == t ? 1.0 : 0.0));
            }
        }
        add_inplace(grad.out_w[size_t(m)], matmul_tn(tape.y, d_logit));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < model.codes; ++j)
                grad.out_b[size_t(m)][size_t(j)] += d_logit(i, j);
        add_inplace(d_y, matmul_nt(d_logit, model.out_w[size_t(m)]));
    }

    // y = x + att * wo
    Mat d_x = d_y;
    add_inplace(grad.wo, matmul_tn(tape.att, d_y));
    Mat d_att = matmul_nt(d_y, model.wo);

    // att = p * v
    Mat d_p = matmul_nt(d_att, tape.v);
    Mat d_v = matmul_tn(tape.p, d_att);

    // softmax backward, row-wise
    Mat d_s(n, n);
    for (int i = 0; i < n; ++i) {
        double dot = 0.0;
        for (int j = 0; j < n; ++j) dot += d_p(i, j) * tape.p(i, j);
        for (int j = 0; j < n; ++j) d_s(i, j) = tape.p(i, j) * (d_p(i, j) - dot);
    }
    const double sc = 1.0 / std::sqrt(double(e));
    for (double& val : d_s.a) val *= sc;

    Mat d_q = matmul(d_s, tape.k);
    Mat d_k = matmul_tn(d_s, tape.q);

    add_inplace(grad.wq, matmul_tn(tape.x, d_q));
    add_inplace(grad.wk, matmul_tn(tape.x, d_k));
    add_inplace(grad.wv, matmul_tn(tape.x, d_v));
    add_inplace(d_x, matmul_nt(d_q, model.wq));
    add_inplace(d_x, matmul_nt(d_k, model.wk));
    add_inplace(d_x, matmul_nt(d_v, model.wv));

    add_inplace(grad.pos, d_x);
    for (int i = 0; i < n; ++i)
        for (int m = 0; m < model.heads; ++m) {
            const int32_t c = src.at(i, m);
            for (int j = 0; j < e; ++j) grad.code_embed[size_t(m)](c, j) += d_x(i, j);
        }
    return loss;
}

}  // namespace

AlignmentModel zeros_alignment(int n_tokens, int heads, int codes, int embed_dim,
                               Direction direction) {
    require(n_tokens >= 1 && heads >= 1 && codes >= 2 && embed_dim >= 1, Err::ShapeMismatch,
            "bad alignment shape");
    AlignmentModel m;
    m.direction = direction;
    m.n_tokens = n_tokens;
    m.heads = heads;
    m.codes = codes;
    m.embed_dim = embed_dim;
    m.code_embed.assign(size_t(heads), Mat(codes, embed_dim));
    m.pos = Mat(n_tokens, embed_dim);
    m.wq = Mat(embed_dim, embed_dim);
    m.wk = Mat(embed_dim, embed_dim);
    m.wv = Mat(embed_dim, embed_dim);
    m.wo = Mat(embed_dim, embed_dim);
    m.out_w.assign(size_t(heads), Mat(embed_dim, codes));
    m.out_b.assign(size_t(heads), std::vector<double>(size_t(codes), 0.0));
    return m;
}

AlignmentModel init_alignment(int n_tokens, int heads, int codes, int embed_dim,
                              Direction direction, uint64_t seed) {
    AlignmentModel m = zeros_alignment(n_tokens, heads, codes, embed_dim, direction);
    Rng rng(seed);
    for (auto& t : m.code_embed) init_uniform(t, embed_dim, rng);
    init_uniform(m.pos, embed_dim, rng);
    init_uniform(m.wq, embed_dim, rng);
    init_uniform(m.wk, embed_dim, rng);
    init_uniform(m.wv, embed_dim, rng);
    init_uniform(m.wo, embed_dim, rng);
    for (auto& t : m.out_w) init_uniform(t, embed_dim, rng);
    return m;
}

std::vector<TensorRef> tensor_refs(AlignmentModel& m) {
    std::vector<TensorRef> out;
    auto push_mat = [&](const std::string& name, Mat& t) {
        out.push_back({name, {t.rows, t.cols}, t.a.data(), t.a.size()});
    };
    for (size_t h = 0; h < m.code_embed.size(); ++h)
        push_mat("embed" + std::to_string(h), m.code_embed[h]);
    push_mat("pos", m.pos);
    push_mat("wq", m.wq);
    push_mat("wk", m.wk);
    push_mat("wv", m.wv);
    push_mat("wo", m.wo);
    for (size_t h = 0; h < m.out_w.size(); ++h) push_mat("out_w" + std::to_string(h), m.out_w[h]);
    for (size_t h = 0; h < m.out_b.size(); ++h)
        out.push_back({"out_b" + std::to_string(h), {int(m.out_b[h].size())}, m.out_b[h].data(),
                       m.out_b[h].size()});
    return out;
}

AlignPrediction align_predict(const AlignmentModel& model, const IndexSequence& src) {
    AlignPrediction pred;
    pred.logits = forward(model, src, nullptr);
    pred.argmax = IndexSequence(model.n_tokens, model.heads);
    for (int m = 0; m < model.heads; ++m) {
        const Mat& lg = pred.logits[size_t(m)];
        for (int i = 0; i < model.n_tokens; ++i) {
            int best = 0;
            for (int j = 1; j < model.codes; ++j)
                if (lg(i, j) > lg(i, best)) best = j;
            pred.argmax.at(i, m) = best;
        }
    }
    return pred;
}

namespace {

TokenSequence tokenize_series_for_bundle(const TimeSeries& x, const BundleConfig& cfg) {
    const int want = cfg.series_length();
    const int len = x.length();
    if (len == want) return segment_series(instance_normalize(x), cfg.segment);
    // lenient fit: left pad may absorb a shortfall of less than one segment
    require(len < want && want - len < cfg.segment, Err::GeometryMismatch,
            "series length incompatible with bundle geometry");
    return segment_series(instance_normalize(x), cfg.segment, SegmentMode::Lenient);
}

}  // namespace

IndexSequence extract_indices(const TimeSeries& x, const TokenizerBundle& bundle) {
    require(bundle.frozen, Err::BundleNotFrozen, "extract_indices needs a frozen bundle");
    const TokenSequence tok = tokenize_series_for_bundle(x, bundle.cfg);
    const Mat e = encode(tok.tokens, bundle.temporal.enc);
    return quantize(e, bundle.book).indices;
}

IndexSequence extract_indices(const Image& img, const TokenizerBundle& bundle) {
    require(bundle.frozen, Err::BundleNotFrozen, "extract_indices needs a frozen bundle");
    require(img.height == bundle.cfg.image_height() && img.width == bundle.cfg.image_width() &&
                img.channels == bundle.cfg.image_channels(),
            Err::GeometryMismatch, "image does not match bundle geometry");
    const TokenSequence tok = patchify_image(img, bundle.cfg.factor);
    const Mat e = encode(tok.tokens, bundle.visual.enc);
    return quantize(e, bundle.book).indices;
}

AlignTrainResult train_alignment(const std::vector<PairedSample>& pairs,
                                 const TokenizerBundle& bundle, Direction direction,
                                 const AlignTrainConfig& cfg) {
    require(!pairs.empty(), Err::EmptyCorpus, "no training pairs");
    require(bundle.frozen, Err::BundleNotFrozen, "alignment trains over a frozen bundle");
    const int n = bundle.cfg.n_tokens, m = bundle.cfg.heads, k = bundle.cfg.codes;
    for (const auto& p : pairs) {
        require(p.source.tokens == n && p.source.heads == m && p.target.tokens == n &&
                    p.target.heads == m,
                Err::ShapeMismatch, "pair does not match bundle shape");
    }

    AlignTrainResult result;
    result.model = init_alignment(n, m, k, cfg.embed_dim, direction, sub_seed(cfg.seed, 1));
    AlignmentModel& model = result.model;

    Rng shuffle_rng(sub_seed(cfg.seed, 2));
    std::vector<int> order(pairs.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = int(i);
    shuffle_rng.shuffle(order);
    size_t pos = 0;

    AlignmentModel grad = zeros_alignment(n, m, k, cfg.embed_dim, direction);
    auto model_refs = tensor_refs(model);
    auto grad_refs = tensor_refs(grad);

    result.loss_curve.reserve(size_t(cfg.steps));
    for (int step = 0; step < cfg.steps; ++step) {
        for (auto& r : grad_refs) std::fill(r.data, r.data + r.size, 0.0);
        double loss = 0.0;
        const int bs = std::min<int>(cfg.batch_size, int(pairs.size()));
        for (int b = 0; b < bs; ++b) {
            if (pos >= order.size()) {
                shuffle_rng.shuffle(order);
                pos = 0;
            }
            const auto& p = pairs[size_t(order[pos++])];
            loss += pair_backward(model, p.source, p.target, 1.0 / double(bs), grad) / double(bs);
        }
        for (size_t t = 0; t < model_refs.size(); ++t)
            for (size_t i = 0; i < model_refs[t].size; ++i)
                model_refs[t].data[i] -= cfg.learning_rate * grad_refs[t].data[i];
        result.loss_curve.push_back(loss);
    }
    return result;
}

double alignment_pair_gradients(const AlignmentModel& model, const IndexSequence& src,
                                const IndexSequence& target, AlignmentModel& grad) {
    return pair_backward(model, src, target, 1.0, grad);
}

double alignment_cross_entropy(const AlignmentModel& model,
                               const std::vector<PairedSample>& pairs) {
    require(!pairs.empty(), Err::EmptyCorpus, "no pairs");
    double total = 0.0;
    const double inv_nm = 1.0 / double(model.n_tokens * model.heads);
    for (const auto& p : pairs) {
        std::vector<Mat> logits = forward(model, p.source, nullptr);
        for (int m = 0; m < model.heads; ++m) {
            Mat prob = logits[size_t(m)];
            softmax_rows(prob);
            for (int i = 0; i < model.n_tokens; ++i)
                total -= inv_nm * std::log(std::max(prob(i, p.target.at(i, m)), 1e-300));
        }
    }
    return total / double(pairs.size());
}

std::vector<PairedSample> build_sliding_pairs(const TimeSeries& series, const Image& image,
                                              int window, int stride,
                                              const TokenizerBundle& bundle) {
    require(bundle.frozen, Err::BundleNotFrozen, "sliding pairs need a frozen bundle");
    require(window == bundle.cfg.series_length(), Err::GeometryMismatch,
            "window must equal the bundle series length");
    require(stride >= 1, Err::ShapeMismatch, "stride must be >= 1");
    const int total = series.length();
    require(window <= total, Err::WindowTooLarge, "window exceeds series length");
    const int w = bundle.cfg.image_width();
    require(image.height == bundle.cfg.image_height() && image.channels == 1,
            Err::GeometryMismatch, "image height/channels do not match bundle");
    require(image.width >= w, Err::GeometryMismatch, "image too narrow for synchronized crops");

    const int span = total - window;
    const int count = span / stride + 1;
    std::vector<PairedSample> out;
    out.reserve(size_t(count));
    for (int kk = 0; kk < count; ++kk) {
        const int s_off = kk * stride;
        int x_off = 0;
        if (span > 0) {
            x_off = int(std::llround(double(s_off) * double(image.width - w) / double(span)));
            x_off = std::clamp(x_off, 0, image.width - w);
        }

        TimeSeries sub;
        sub.values.assign(series.values.begin() + s_off, series.values.begin() + s_off + window);
        Image crop(image.height, w, 1);
        for (int y = 0; y < image.height; ++y)
            for (int x = 0; x < w; ++x) crop.at(y, x, 0) = image.at(y, x_off + x, 0);

        PairedSample pair;
        pair.source = extract_indices(sub, bundle);
        pair.target = extract_indices(crop, bundle);
        pair.provenance = PairProvenance::SlidingWindow;
        out.push_back(std::move(pair));
    }
    return out;
}

}  // namespace tvc
