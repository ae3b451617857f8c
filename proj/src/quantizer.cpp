#include "tvc/quantizer.hpp"

#include <algorithm>
#include <cstring>

#include "tvc/rng.hpp"

namespace tvc {

QuantizeResult quantize(const Mat& embedding, const MultiHeadCodebook& book) {
    require(book.heads >= 1 && book.codes_per_head >= 1, Err::ShapeMismatch, "empty codebook");
    require(embedding.cols == book.dim(), Err::ShapeMismatch,
            "embedding dim does not match codebook dim");

    const int n = embedding.rows;
    const int m = book.heads;
    const int k = book.codes_per_head;
    const int sub = book.sub_dim;

    QuantizeResult out;
    out.quantized = Mat(n, embedding.cols);
    out.indices = IndexSequence(n, m);
    out.residual_sq = 0.0;

    for (int i = 0; i < n; ++i) {
        for (int h = 0; h < m; ++h) {
            const double* e = &embedding.a[size_t(i) * embedding.cols + size_t(h) * sub];
            int best = 0;
            double best_d = 0.0;
            for (int c = 0; c < k; ++c) {
                const double* z = &book.codes[(size_t(h) * k + c) * sub];
                double d = 0.0;
                for (int j = 0; j < sub; ++j) {
                    const double t = e[j] - z[j];
                    d += t * t;
                }
                if (c == 0 || d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            out.indices.at(i, h) = best;
            out.residual_sq += best_d;
            const double* z = &book.codes[(size_t(h) * k + best) * sub];
            double* q = &out.quantized.a[size_t(i) * embedding.cols + size_t(h) * sub];
            std::memcpy(q, z, sizeof(double) * size_t(sub));
        }
    }
    return out;
}

Mat lookup(const IndexSequence& indices, const MultiHeadCodebook& book) {
    require(indices.heads == book.heads, Err::ShapeMismatch, "head count mismatch");
    const int n = indices.tokens;
    const int sub = book.sub_dim;
    Mat q(n, book.dim());
    for (int i = 0; i < n; ++i) {
        for (int h = 0; h < book.heads; ++h) {
            const int32_t c = indices.at(i, h);
            require(c >= 0 && c < book.codes_per_head, Err::IndexOutOfRange,
                    "code index out of range");
            const double* z = &book.codes[(size_t(h) * book.codes_per_head + c) * sub];
            std::memcpy(&q.a[size_t(i) * q.cols + size_t(h) * sub], z, sizeof(double) * size_t(sub));
        }
    }
    return q;
}

std::pair<double, double> codebook_losses(const Mat& embedding, const QuantizeResult& result) {
    require(embedding.same_shape(result.quantized), Err::ShapeMismatch, "e/q shapes differ");
    // same per-token, per-head grouping as quantize so the value matches its
    // residual bit-exactly
    const int heads = result.indices.heads;
    const int sub = embedding.cols / heads;
    double r = 0.0;
    for (int i = 0; i < embedding.rows; ++i)
        for (int h = 0; h < heads; ++h) {
            double d = 0.0;
            for (int j = 0; j < sub; ++j) {
                const double t = embedding(i, h * sub + j) - result.quantized(i, h * sub + j);
                d += t * t;
            }
            r += d;
        }
    return {r, r};
}

std::vector<double> utilization(const std::vector<IndexSequence>& history,
                                const MultiHeadCodebook& book) {
    require(!history.empty(), Err::EmptyHistory, "utilization needs at least one index sequence");
    std::vector<char> seen(size_t(book.heads) * book.codes_per_head, 0);
    for (const auto& seq : history) {
        require(seq.heads == book.heads, Err::ShapeMismatch, "head count mismatch in history");
        for (int i = 0; i < seq.tokens; ++i)
            for (int h = 0; h < seq.heads; ++h) {
                const int32_t c = seq.at(i, h);
                require(c >= 0 && c < book.codes_per_head, Err::IndexOutOfRange, "history index");
                seen[size_t(h) * book.codes_per_head + c] = 1;
            }
    }
    std::vector<double> frac(size_t(book.heads), 0.0);
    for (int h = 0; h < book.heads; ++h) {
        int hit = 0;
        for (int c = 0; c < book.codes_per_head; ++c)
            hit += seen[size_t(h) * book.codes_per_head + c];
        frac[size_t(h)] = double(hit) / double(book.codes_per_head);
    }
    return frac;
}

MultiHeadCodebook init_codebooks(const Mat& sample, int heads, int codes_per_head, uint64_t seed) {
    require(heads >= 1 && codes_per_head >= 2, Err::ShapeMismatch, "need M >= 1, K >= 2");
    require(sample.cols % heads == 0, Err::ShapeMismatch, "sample dim not divisible by heads");
    require(sample.rows >= codes_per_head, Err::InsufficientSamples,
            "need at least K sample tokens");

    const int sub = sample.cols / heads;
    const int t = sample.rows;
    MultiHeadCodebook book(heads, codes_per_head, sub);
    Rng rng(seed);

    std::vector<double> d2(static_cast<size_t>(t), 0.0);
    for (int h = 0; h < heads; ++h) {
        auto sub_at = [&](int row) { return &sample.a[size_t(row) * sample.cols + size_t(h) * sub]; };

        // distinct sub-vector count gates K
        {
            std::vector<std::vector<double>> rows(static_cast<size_t>(t));
            for (int i = 0; i < t; ++i) rows[size_t(i)].assign(sub_at(i), sub_at(i) + sub);
            std::sort(rows.begin(), rows.end());
            const auto last = std::unique(rows.begin(), rows.end());
            const long long distinct = last - rows.begin();
            require(distinct >= codes_per_head, Err::InsufficientSamples,
                    "fewer distinct sample sub-vectors than requested codes");
        }

        const int first = rng.below(t);
        std::memcpy(&book.codes[(size_t(h) * codes_per_head) * sub], sub_at(first),
                    sizeof(double) * size_t(sub));
        for (int i = 0; i < t; ++i) {
            double d = 0.0;
            const double* a = sub_at(i);
            const double* b = sub_at(first);
            for (int j = 0; j < sub; ++j) d += (a[j] - b[j]) * (a[j] - b[j]);
            d2[size_t(i)] = d;
        }

        for (int c = 1; c < codes_per_head; ++c) {
            const int pick = rng.pick_weighted(d2);
            std::memcpy(&book.codes[(size_t(h) * codes_per_head + c) * sub], sub_at(pick),
                        sizeof(double) * size_t(sub));
            for (int i = 0; i < t; ++i) {
                double d = 0.0;
                const double* a = sub_at(i);
                const double* b = sub_at(pick);
                for (int j = 0; j < sub; ++j) d += (a[j] - b[j]) * (a[j] - b[j]);
                d2[size_t(i)] = std::min(d2[size_t(i)], d);
            }
        }
    }
    return book;
}

}  // namespace tvc
