#include "tvc/training.hpp"

#include <cmath>

#include "tvc/rng.hpp"
#include "tvc/tokenize.hpp"

namespace tvc {

namespace {

uint64_t sub_seed(uint64_t seed, uint64_t stream) {
    return seed ^ (0x9E3779B97F4A7C15ULL * (stream + 1));
}

const AutoencoderParams& modality_params(const TokenizerBundle& b, Modality m) {
    return m == Modality::Visual ? b.visual : b.temporal;
}

AutoencoderParams& modality_params(TokenizerBundle& b, Modality m) {
    return m == Modality::Visual ? b.visual : b.temporal;
}

void check_batch(const std::vector<TokenSequence>& batch, const TokenizerBundle& bundle,
                 Modality* modality_out) {
    require(!batch.empty(), Err::EmptyCorpus, "empty batch");
    const Modality m = batch.front().origin;
    for (const auto& s : batch)
        require(s.origin == m, Err::MixedModalityBatch, "batch mixes visual and temporal samples");
    const int want_p = m == Modality::Visual ? bundle.cfg.visual_token_dim()
                                             : bundle.cfg.temporal_token_dim();
    for (const auto& s : batch) {
        require(s.tokens.rows == bundle.cfg.n_tokens, Err::ShapeMismatch,
                "token count does not match bundle config");
        require(s.tokens.cols == want_p, Err::ShapeMismatch,
                "token width does not match bundle config");
    }
    *modality_out = m;
}

void sgd_apply(std::vector<TensorRef>& params, std::vector<TensorRef>& grads,
               std::vector<TensorRef>& vel, double lr, double momentum) {
    for (size_t t = 0; t < params.size(); ++t) {
        double* p = params[t].data;
        const double* g = grads[t].data;
        double* v = vel[t].data;
        for (size_t i = 0; i < params[t].size; ++i) {
            v[i] = momentum * v[i] + g[i];
            p[i] -= lr * v[i];
        }
    }
}

}  // namespace

LossBreakdown compute_losses(const std::vector<TokenSequence>& batch, const TokenizerBundle& bundle,
                             WarmupGrads* grads, std::vector<SampleCapture>* captures) {
    Modality modality;
    check_batch(batch, bundle, &modality);
    const AutoencoderParams& ae = modality_params(bundle, modality);
    const double inv_b = 1.0 / double(batch.size());

    if (grads) {
        grads->ae = zeros_like(ae);
        grads->book = MultiHeadCodebook(bundle.book.heads, bundle.book.codes_per_head,
                                        bundle.book.sub_dim);
        grads->modality = modality;
    }
    if (captures) captures->clear();

    LossBreakdown out;
    out.modality = modality;
    for (const auto& sample : batch) {
        StackTape enc_tape, dec_tape;
        const Mat e = encode(sample.tokens, ae.enc, grads ? &enc_tape : nullptr);
        QuantizeResult qr = quantize(e, bundle.book);
        const Mat recon = decode(qr.quantized, ae.dec, grads ? &dec_tape : nullptr);

        out.recon += inv_b * sumsq_diff(sample.tokens, recon);
        out.quant += inv_b * qr.residual_sq;
        out.commit += inv_b * qr.residual_sq;

        if (grads) {
            // reconstruction term through the decoder
            Mat d_recon(recon.rows, recon.cols);
            for (int i = 0; i < recon.rows; ++i)
                for (int j = 0; j < recon.cols; ++j)
                    d_recon(i, j) = 2.0 * inv_b * (recon(i, j) - sample.tokens(i, j));
            Mat d_q;
            decode_backward(ae.dec, dec_tape, d_recon, grads->ae.dec, &d_q);

            // straight-through copy of dL/dq plus the commitment pull on e
            Mat d_e = d_q;
            for (int i = 0; i < e.rows; ++i)
                for (int j = 0; j < e.cols; ++j)
                    d_e(i, j) += 2.0 * inv_b * (e(i, j) - qr.quantized(i, j));
            encode_backward(ae.enc, enc_tape, d_e, grads->ae.enc);

            // quantization term moves only the selected codes
            const int sub = bundle.book.sub_dim;
            for (int i = 0; i < e.rows; ++i) {
                for (int h = 0; h < bundle.book.heads; ++h) {
                    const int32_t c = qr.indices.at(i, h);
                    for (int d = 0; d < sub; ++d) {
                        const double q_v = qr.quantized(i, h * sub + d);
                        const double e_v = e(i, h * sub + d);
                        grads->book.at(h, c, d) += 2.0 * inv_b * (q_v - e_v);
                    }
                }
            }
        }
        if (captures) captures->push_back({e, qr.quantized, qr.indices});
    }
    out.total = out.recon + out.quant + out.commit;
    if (!std::isfinite(out.total)) fail(Err::NonFiniteLoss, "warmup loss is non-finite");
    return out;
}

double frozen_surrogate_loss(const std::vector<TokenSequence>& batch,
                             const TokenizerBundle& bundle,
                             const std::vector<SampleCapture>& captures) {
    Modality modality;
    check_batch(batch, bundle, &modality);
    require(captures.size() == batch.size(), Err::ShapeMismatch,
            "captures must match batch size");
    const AutoencoderParams& ae = modality_params(bundle, modality);
    const double inv_b = 1.0 / double(batch.size());

    double loss = 0.0;
    for (size_t b = 0; b < batch.size(); ++b) {
        const auto& cap = captures[b];
        const Mat e = encode(batch[b].tokens, ae.enc);

        // q = e + sg[q0 - e0]
        Mat q_st = e;
        for (int i = 0; i < q_st.rows; ++i)
            for (int j = 0; j < q_st.cols; ++j)
                q_st(i, j) += cap.quantized(i, j) - cap.embedding(i, j);

        const Mat recon = decode(q_st, ae.dec);
        loss += inv_b * sumsq_diff(batch[b].tokens, recon);

        // |sg[e0] - q|^2 with the assignment frozen
        const Mat q_now = lookup(cap.indices, bundle.book);
        loss += inv_b * sumsq_diff(cap.embedding, q_now);

        // |sg[q0] - e|^2
        loss += inv_b * sumsq_diff(cap.quantized, e);
    }
    return loss;
}

LossBreakdown warmup_step(const std::vector<TokenSequence>& batch, TokenizerBundle& bundle,
                          OptState& opt, const WarmupConfig& cfg,
                          std::vector<SampleCapture>* captures) {
    require(!bundle.frozen, Err::FrozenBundle, "bundle is frozen");

    WarmupGrads grads;
    const LossBreakdown loss = compute_losses(batch, bundle, &grads, captures);

    if (!opt.ready) {
        opt.vis_vel = zeros_like(bundle.visual);
        opt.temp_vel = zeros_like(bundle.temporal);
        opt.book_vel = MultiHeadCodebook(bundle.book.heads, bundle.book.codes_per_head,
                                         bundle.book.sub_dim);
        opt.ready = true;
    }

    AutoencoderParams& ae = modality_params(bundle, grads.modality);
    AutoencoderParams& vel = grads.modality == Modality::Visual ? opt.vis_vel : opt.temp_vel;

    auto p_refs = tensor_refs(ae, "p");
    auto g_refs = tensor_refs(grads.ae, "g");
    auto v_refs = tensor_refs(vel, "v");
    sgd_apply(p_refs, g_refs, v_refs, cfg.learning_rate, cfg.momentum);

    auto pb = tensor_refs(bundle.book, "p");
    auto gb = tensor_refs(grads.book, "g");
    auto vb = tensor_refs(opt.book_vel, "v");
    sgd_apply(pb, gb, vb, cfg.learning_rate, cfg.momentum);

    return loss;
}

WarmupResult run_warmup(const std::vector<TimeSeries>& series_corpus,
                        const std::vector<Image>& image_corpus, const BundleConfig& cfg,
                        const WarmupConfig& warm) {
    require(!series_corpus.empty(), Err::EmptyCorpus, "series corpus is empty");
    require(!image_corpus.empty(), Err::EmptyCorpus, "image corpus is empty");
    cfg.validate();
    require(warm.learning_rate >= 0.0 && warm.steps >= 1 && warm.batch_size >= 1,
            Err::ShapeMismatch, "bad warmup config");

    std::vector<TokenSequence> visual_tokens;
    visual_tokens.reserve(image_corpus.size());
    for (const auto& img : image_corpus) {
        require(img.height == cfg.image_height() && img.width == cfg.image_width() &&
                    img.channels == cfg.image_channels(),
                Err::GeometryMismatch, "image does not match bundle geometry");
        visual_tokens.push_back(patchify_image(img, cfg.factor));
    }
    std::vector<TokenSequence> temporal_tokens;
    temporal_tokens.reserve(series_corpus.size());
    for (const auto& s : series_corpus) {
        require(s.length() == cfg.series_length(), Err::GeometryMismatch,
                "series does not match bundle geometry");
        temporal_tokens.push_back(segment_series(instance_normalize(s), cfg.segment));
    }

    WarmupResult result;
    TokenizerBundle& bundle = result.bundle;
    bundle.cfg = cfg;
    bundle.visual = init_autoencoder(cfg.n_tokens, cfg.visual_token_dim(), cfg.dim, cfg.depth,
                                     sub_seed(warm.seed, 1));
    set_pixel_map(bundle.visual, kVisualInShift, kVisualInScale);
    bundle.temporal = init_autoencoder(cfg.n_tokens, cfg.temporal_token_dim(), cfg.dim, cfg.depth,
                                       sub_seed(warm.seed, 2));

    // seed the shared codebook from initial embeddings of both corpora
    {
        const int take_v = int(std::min<size_t>(64, visual_tokens.size()));
        const int take_t = int(std::min<size_t>(64, temporal_tokens.size()));
        Mat stack((take_v + take_t) * cfg.n_tokens, cfg.dim);
        int row = 0;
        for (int s = 0; s < take_v; ++s) {
            const Mat e = encode(visual_tokens[size_t(s)].tokens, bundle.visual.enc);
            for (int i = 0; i < e.rows; ++i, ++row)
                for (int j = 0; j < e.cols; ++j) stack(row, j) = e(i, j);
        }
        for (int s = 0; s < take_t; ++s) {
            const Mat e = encode(temporal_tokens[size_t(s)].tokens, bundle.temporal.enc);
            for (int i = 0; i < e.rows; ++i, ++row)
                for (int j = 0; j < e.cols; ++j) stack(row, j) = e(i, j);
        }
        bundle.book = init_codebooks(stack, cfg.heads, cfg.codes, sub_seed(warm.seed, 3));
    }

    Rng shuffle_vis(sub_seed(warm.seed, 4));
    Rng shuffle_temp(sub_seed(warm.seed, 5));
    std::vector<int> order_vis(image_corpus.size()), order_temp(series_corpus.size());
    for (size_t i = 0; i < order_vis.size(); ++i) order_vis[i] = int(i);
    for (size_t i = 0; i < order_temp.size(); ++i) order_temp[i] = int(i);
    shuffle_vis.shuffle(order_vis);
    shuffle_temp.shuffle(order_temp);
    size_t pos_vis = 0, pos_temp = 0;

    auto next_batch = [&](Modality m) {
        std::vector<TokenSequence> batch;
        batch.reserve(size_t(warm.batch_size));
        for (int i = 0; i < warm.batch_size; ++i) {
            if (m == Modality::Visual) {
                if (pos_vis >= order_vis.size()) {
                    shuffle_vis.shuffle(order_vis);
                    pos_vis = 0;
                }
                batch.push_back(visual_tokens[size_t(order_vis[pos_vis++])]);
            } else {
                if (pos_temp >= order_temp.size()) {
                    shuffle_temp.shuffle(order_temp);
                    pos_temp = 0;
                }
                batch.push_back(temporal_tokens[size_t(order_temp[pos_temp++])]);
            }
        }
        return batch;
    };

    OptState opt;
    std::vector<IndexSequence> tail_history;
    result.curve.reserve(size_t(warm.steps));
    for (int step = 0; step < warm.steps; ++step) {
        const Modality m = (step % 2 == 0) ? Modality::Visual : Modality::Temporal;
        const auto batch = next_batch(m);
        const bool in_tail = step >= warm.steps - 100;
        std::vector<SampleCapture> captures;
        const LossBreakdown loss =
            warmup_step(batch, bundle, opt, warm, in_tail ? &captures : nullptr);
        if (in_tail)
            for (auto& cap : captures) tail_history.push_back(std::move(cap.indices));
        result.curve.push_back(loss);
    }

    bundle.frozen = true;
    result.tail_utilization = utilization(tail_history, bundle.book);
    return result;
}

}  // namespace tvc
