#include "tvc/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <ostream>
#include <sstream>

#include "tvc/classpair.hpp"
#include "tvc/convert.hpp"
#include "tvc/gradcheck.hpp"
#include "tvc/hungarian.hpp"
#include "tvc/io.hpp"
#include "tvc/rng.hpp"
#include "tvc/training.hpp"

namespace tvc {

namespace {

TokenizerBundle make_random_bundle(int n, int d, int m, int k, uint64_t seed, bool frozen) {
    TokenizerBundle b;
    b.cfg = {n, d, m, k, 2, 3, 1};
    b.visual = init_autoencoder(n, b.cfg.visual_token_dim(), d, b.cfg.depth, seed + 1);
    b.temporal = init_autoencoder(n, b.cfg.temporal_token_dim(), d, b.cfg.depth, seed + 2);
    b.book = MultiHeadCodebook(m, k, d / m);
    Rng rng(seed + 3);
    for (double& v : b.book.codes) v = rng.uniform(-1.0, 1.0);
    b.frozen = frozen;
    return b;
}

std::vector<TokenSequence> random_batch(const TokenizerBundle& b, Modality mod, int count,
                                        uint64_t seed) {
    Rng rng(seed);
    const int p = mod == Modality::Visual ? b.cfg.visual_token_dim() : b.cfg.temporal_token_dim();
    std::vector<TokenSequence> out;
    for (int s = 0; s < count; ++s) {
        TokenSequence t;
        t.origin = mod;
        t.tokens = Mat(b.cfg.n_tokens, p);
        for (double& v : t.tokens.a) v = rng.uniform(-1.0, 1.0);
        out.push_back(std::move(t));
    }
    return out;
}

bool suite_gradients(std::string* detail) {
    const int dims[][3] = {{2, 4, 1}, {4, 8, 2}, {4, 16, 4}, {2, 16, 4}, {4, 4, 2}, {2, 8, 1}};
    double worst = 0.0;
    for (int inst = 0; inst < 6; ++inst) {
        const int n = dims[inst][0], d = dims[inst][1], m = dims[inst][2];
        TokenizerBundle bundle = make_random_bundle(n, d, m, 5, 900 + uint64_t(inst) * 17, false);
        auto bv = random_batch(bundle, Modality::Visual, 2, 40 + uint64_t(inst));
        auto bt = random_batch(bundle, Modality::Temporal, 2, 80 + uint64_t(inst));
        std::vector<SampleCapture> cv, ct;

        auto refs = tensor_refs(bundle);
        auto loss_fn = [&]() {
            return frozen_surrogate_loss(bv, bundle, cv) + frozen_surrogate_loss(bt, bundle, ct);
        };
        auto grad_fn = [&]() {
            WarmupGrads gv, gt;
            compute_losses(bv, bundle, &gv, &cv);
            compute_losses(bt, bundle, &gt, &ct);
            std::vector<double> flat;
            for (auto& r : tensor_refs(gv.ae, "v")) flat.insert(flat.end(), r.data, r.data + r.size);
            for (auto& r : tensor_refs(gt.ae, "t")) flat.insert(flat.end(), r.data, r.data + r.size);
            for (size_t i = 0; i < gv.book.codes.size(); ++i)
                flat.push_back(gv.book.codes[i] + gt.book.codes[i]);
            return flat;
        };
        worst = std::max(worst, gradient_check(refs, loss_fn, grad_fn, 1e-6));
    }
    std::ostringstream msg;
    msg << "max relative error " << worst;
    *detail = msg.str();
    return worst < 1e-4;
}

bool suite_quantizer(std::string* detail) {
    Rng rng(2024);
    for (int trial = 0; trial < 400; ++trial) {
        const int m = 1 + rng.below(4);
        const int sub = 1 + rng.below(4);
        const int k = 2 + rng.below(63);
        const int n = 1 + rng.below(6);
        MultiHeadCodebook book(m, k, sub);
        for (double& v : book.codes) v = rng.uniform(-1.0, 1.0);
        Mat e(n, m * sub);
        for (double& v : e.a) v = rng.uniform(-1.0, 1.0);

        const QuantizeResult qr = quantize(e, book);
        for (int i = 0; i < n; ++i)
            for (int h = 0; h < m; ++h) {
                int best = 0;
                double best_d = 1e300;
                for (int c = 0; c < k; ++c) {
                    double dist = 0.0;
                    for (int j = 0; j < sub; ++j) {
                        const double t = e(i, h * sub + j) - book.at(h, c, j);
                        dist += t * t;
                    }
                    if (dist < best_d) {
                        best_d = dist;
                        best = c;
                    }
                }
                if (qr.indices.at(i, h) != best) {
                    *detail = "argmin disagreement with brute force";
                    return false;
                }
            }

        const Mat q2 = lookup(qr.indices, book);
        if (q2.a != qr.quantized.a) {
            *detail = "lookup(indices) differs from quantized output";
            return false;
        }
        const auto [quant, commit] = codebook_losses(e, qr);
        if (quant != qr.residual_sq || commit != qr.residual_sq) {
            *detail = "losses do not equal the residual";
            return false;
        }
    }
    *detail = "400 random instances";
    return true;
}

bool suite_straight_through(std::string* detail) {
    TokenizerBundle bundle = make_random_bundle(4, 8, 2, 6, 321, false);
    auto batch = random_batch(bundle, Modality::Temporal, 1, 99);
    const auto& ae = bundle.temporal;

    StackTape enc_tape, dec_tape;
    const Mat e = encode(batch[0].tokens, ae.enc, &enc_tape);
    const QuantizeResult qr = quantize(e, bundle.book);
    const Mat recon = decode(qr.quantized, ae.dec, &dec_tape);

    Mat d_recon(recon.rows, recon.cols);
    for (int i = 0; i < recon.rows; ++i)
        for (int j = 0; j < recon.cols; ++j)
            d_recon(i, j) = 2.0 * (recon(i, j) - batch[0].tokens(i, j));

    // production route: full gradient, then subtract the commitment part
    WarmupGrads full;
    compute_losses(batch, bundle, &full);
    AutoencoderParams commit_only = zeros_like(ae);
    Mat d_commit(e.rows, e.cols);
    for (int i = 0; i < e.rows; ++i)
        for (int j = 0; j < e.cols; ++j) d_commit(i, j) = 2.0 * (e(i, j) - qr.quantized(i, j));
    encode_backward(ae.enc, enc_tape, d_commit, commit_only.enc);

    // identity route: decoder backward chained straight into the encoder
    DecoderParams dec_grads = zeros_like(ae).dec;
    Mat d_q;
    decode_backward(ae.dec, dec_tape, d_recon, dec_grads, &d_q);
    AutoencoderParams ident = zeros_like(ae);
    encode_backward(ae.enc, enc_tape, d_q, ident.enc);

    auto full_refs = tensor_refs(full.ae, "a");
    auto commit_refs = tensor_refs(commit_only, "b");
    auto ident_refs = tensor_refs(ident, "c");
    double worst = 0.0;
    for (size_t t = 0; t < full_refs.size(); ++t) {
        if (full_refs[t].name.find(".enc.") == std::string::npos) continue;
        for (size_t i = 0; i < full_refs[t].size; ++i) {
            const double decoder_path = full_refs[t].data[i] - commit_refs[t].data[i];
            worst = std::max(worst, std::fabs(decoder_path - ident_refs[t].data[i]));
        }
    }
    std::ostringstream msg;
    msg << "max deviation " << worst;
    *detail = msg.str();
    return worst < 1e-10;
}

void enumerate_assignments(const Mat& c, int row, std::vector<char>& used, double acc,
                           std::vector<int>& cur, double* best_cost, std::vector<int>* best) {
    if (row == c.rows) {
        if (acc < *best_cost) {
            *best_cost = acc;
            *best = cur;
        }
        return;
    }
    for (int j = 0; j < c.cols; ++j) {
        if (used[size_t(j)]) continue;
        used[size_t(j)] = 1;
        cur.push_back(j);
        enumerate_assignments(c, row + 1, used, acc + c(row, j), cur, best_cost, best);
        cur.pop_back();
        used[size_t(j)] = 0;
    }
}

bool suite_hungarian(std::string* detail) {
    Rng rng(77);
    int cases = 0;
    for (int n = 1; n <= 7; ++n) {
        for (int m = n; m <= 7; ++m) {
            for (int trial = 0; trial < 20; ++trial) {
                Mat c(n, m);
                for (double& v : c.a) v = rng.uniform(0.0, 1.0);
                const Assignment got = hungarian_assign(c);
                double best_cost = 1e300;
                std::vector<int> best, cur;
                std::vector<char> used(size_t(m), 0);
                enumerate_assignments(c, 0, used, 0.0, cur, &best_cost, &best);
                double canon = 0.0;
                for (int r = 0; r < n; ++r) canon += c(r, best[size_t(r)]);
                if (got.cost != canon) {
                    *detail = "optimal cost differs from exhaustive search";
                    return false;
                }
                ++cases;
            }
        }
    }
    std::ostringstream msg;
    msg << cases << " matrices up to 7x7";
    *detail = msg.str();
    return true;
}

IndexHistogram random_hist(int heads, int codes, Rng& rng) {
    IndexHistogram h;
    h.heads = heads;
    h.codes = codes;
    h.counts.assign(size_t(heads) * codes, 0);
    h.probs.assign(size_t(heads) * codes, 0.0);
    for (int m = 0; m < heads; ++m) {
        double total = 0.0;
        for (int k = 0; k < codes; ++k) {
            const double w = rng.uniform01() < 0.2 ? 0.0 : rng.uniform(0.05, 1.0);
            h.probs[size_t(m) * codes + k] = w;
            total += w;
        }
        if (total == 0.0) {
            h.probs[size_t(m) * codes] = 1.0;
            total = 1.0;
        }
        for (int k = 0; k < codes; ++k) h.probs[size_t(m) * codes + k] /= total;
    }
    return h;
}

bool suite_jsd(std::string* detail) {
    Rng rng(555);
    const double ln2 = std::log(2.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const int heads = 1 + rng.below(4);
        const int codes = 2 + rng.below(15);
        IndexHistogram p = random_hist(heads, codes, rng);
        IndexHistogram q = random_hist(heads, codes, rng);
        const double pq = js_divergence(p, q);
        const double qp = js_divergence(q, p);
        if (std::fabs(pq - qp) > 1e-12 || pq < 0.0 || pq > ln2 + 1e-12) {
            *detail = "symmetry or bound violated";
            return false;
        }
        if (js_divergence(p, p) != 0.0) {
            *detail = "JSD(p, p) must be exactly zero";
            return false;
        }
    }
    IndexHistogram d0, d1;
    d0.heads = d1.heads = 1;
    d0.codes = d1.codes = 4;
    d0.probs = {1.0, 0.0, 0.0, 0.0};
    d1.probs = {0.0, 1.0, 0.0, 0.0};
    if (std::fabs(js_divergence(d0, d1) - ln2) > 1e-12) {
        *detail = "disjoint supports must give ln 2";
        return false;
    }
    *detail = "1000 random pairs";
    return true;
}

bool suite_persistence(std::string* detail) {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "tvc_selftest";
    fs::create_directories(dir);
    const std::string path = (dir / "bundle.tart").string();

    TokenizerBundle bundle = make_random_bundle(4, 8, 2, 6, 1234, true);
    save_bundle(bundle, path);
    TokenizerBundle loaded = load_bundle(path);
    if (bundle_digest(loaded) != bundle_digest(bundle)) {
        *detail = "bundle round trip not bit-exact";
        return false;
    }

    // flipped payload byte must be caught by the CRC
    auto bytes = encode_checkpoint({{"x", {2}, {1.0, 2.0}}});
    bytes[bytes.size() - 6] ^= 0x40;
    bool caught = false;
    try {
        decode_checkpoint(bytes);
    } catch (const Error& e) {
        caught = e.kind() == Err::ChecksumMismatch;
    }
    if (!caught) {
        *detail = "corrupted payload not detected";
        return false;
    }

    // future version must be refused
    auto v2 = encode_checkpoint({{"x", {1}, {3.0}}});
    v2[4] = 2;
    const uint32_t crc = crc32(v2.data(), v2.size() - 4);
    for (int i = 0; i < 4; ++i) v2[v2.size() - 4 + size_t(i)] = (unsigned char)((crc >> (8 * i)) & 0xFF);
    caught = false;
    try {
        decode_checkpoint(v2);
    } catch (const Error& e) {
        caught = e.kind() == Err::VersionUnsupported;
    }
    if (!caught) {
        *detail = "version 2 not refused";
        return false;
    }
    *detail = "round trip, CRC, version gate";
    return true;
}

bool suite_correlational(std::string* detail) {
    Rng rng(31);
    MultiSeries sample(2, std::vector<double>(64));
    for (int t = 0; t < 64; ++t) {
        sample[0][size_t(t)] = rng.uniform(-1.0, 1.0);
        sample[1][size_t(t)] = 0.5 * sample[0][size_t(t)] + rng.uniform(-0.2, 0.2);
    }
    if (correlational_score({sample}, {sample}) != 0.0) {
        *detail = "identical sets must score 0";
        return false;
    }

    MultiSeries correlated(2), anti(2);
    for (int t = 0; t < 64; ++t) {
        const double v = std::sin(0.3 * t) + 0.1 * rng.uniform(-1.0, 1.0);
        correlated[0].push_back(v);
        correlated[1].push_back(v);
        anti[0].push_back(v);
        anti[1].push_back(-v);
    }
    const double score = correlational_score({correlated}, {anti});
    // |1-(-1)| on both off-diagonal entries, diagonals zero: 4/10
    if (std::fabs(score - 0.4) > 1e-10) {
        std::ostringstream msg;
        msg << "correlation construction scored " << score << ", expected 0.4";
        *detail = msg.str();
        return false;
    }
    *detail = "closed-form cases";
    return true;
}

}  // namespace

int run_selftest(std::ostream& out) {
    using Suite = std::pair<const char*, std::function<bool(std::string*)>>;
    const Suite suites[] = {
        {"gradient finite differences", suite_gradients},
        {"quantizer brute force", suite_quantizer},
        {"straight-through routing", suite_straight_through},
        {"assignment brute force", suite_hungarian},
        {"divergence properties", suite_jsd},
        {"persistence round trips", suite_persistence},
        {"correlational closed forms", suite_correlational},
    };
    int failures = 0;
    for (const auto& [name, fn] : suites) {
        std::string detail;
        bool ok = false;
        try {
            ok = fn(&detail);
        } catch (const std::exception& e) {
            detail = e.what();
        }
        out << (ok ? "[ok]   " : "[FAIL] ") << name << " (" << detail << ")\n";
        if (!ok) ++failures;
    }
    return failures;
}

}  // namespace tvc
