#include "tvc/classpair.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tvc/convert.hpp"
#include "tvc/rng.hpp"

namespace tvc {

IndexHistogram index_histogram(const std::vector<IndexSequence>& subset, int heads, int codes) {
    require(!subset.empty(), Err::EmptySubset, "empty class subset");
    IndexHistogram h;
    h.heads = heads;
    h.codes = codes;
    h.counts.assign(size_t(heads) * codes, 0);
    for (const auto& seq : subset) {
        require(seq.heads == heads, Err::ShapeMismatch, "head count mismatch in subset");
        for (int i = 0; i < seq.tokens; ++i)
            for (int m = 0; m < heads; ++m) {
                const int32_t c = seq.at(i, m);
                require(c >= 0 && c < codes, Err::IndexOutOfRange, "index out of range");
                ++h.counts[size_t(m) * codes + c];
            }
    }
    long long per_head = 0;
    for (int k = 0; k < codes; ++k) per_head += h.counts[size_t(k)];
    h.total_per_head = per_head;
    h.probs.assign(h.counts.size(), 0.0);
    for (int m = 0; m < heads; ++m) {
        long long t = 0;
        for (int k = 0; k < codes; ++k) t += h.counts[size_t(m) * codes + k];
        for (int k = 0; k < codes; ++k)
            h.probs[size_t(m) * codes + k] = double(h.counts[size_t(m) * codes + k]) / double(t);
    }
    return h;
}

IndexHistogram index_histogram(const std::vector<TimeSeries>& subset,
                               const TokenizerBundle& bundle) {
    require(!subset.empty(), Err::EmptySubset, "empty class subset");
    std::vector<IndexSequence> indices;
    indices.reserve(subset.size());
    for (const auto& s : subset) indices.push_back(extract_indices(s, bundle));
    return index_histogram(indices, bundle.cfg.heads, bundle.cfg.codes);
}

IndexHistogram index_histogram(const std::vector<Image>& subset, const TokenizerBundle& bundle) {
    require(!subset.empty(), Err::EmptySubset, "empty class subset");
    std::vector<IndexSequence> indices;
    indices.reserve(subset.size());
    for (const auto& img : subset) indices.push_back(extract_indices(img, bundle));
    return index_histogram(indices, bundle.cfg.heads, bundle.cfg.codes);
}

double js_divergence(const IndexHistogram& p, const IndexHistogram& q) {
    require(p.heads == q.heads && p.codes == q.codes, Err::ShapeMismatch,
            "histogram shapes differ");
    double sum = 0.0;
    for (int m = 0; m < p.heads; ++m) {
        double head = 0.0;
        for (int k = 0; k < p.codes; ++k) {
            const double pv = p.prob_at(m, k);
            const double qv = q.prob_at(m, k);
            const double mv = 0.5 * (pv + qv);
            if (pv > 0.0) head += 0.5 * pv * std::log(pv / mv);
            if (qv > 0.0) head += 0.5 * qv * std::log(qv / mv);
        }
        sum += head;
    }
    return sum / double(p.heads);
}

Mat cost_matrix(const std::vector<IndexHistogram>& temporal,
                const std::vector<IndexHistogram>& visual) {
    require(!temporal.empty() && !visual.empty(), Err::ShapeMismatch, "empty histogram list");
    Mat c(int(temporal.size()), int(visual.size()));
    for (size_t i = 0; i < temporal.size(); ++i)
        for (size_t j = 0; j < visual.size(); ++j)
            c(int(i), int(j)) = js_divergence(temporal[i], visual[j]);
    return c;
}

std::vector<PairedSample> build_paired_dataset(
    const std::vector<std::vector<IndexSequence>>& temporal_subsets,
    const std::vector<std::vector<IndexSequence>>& visual_subsets, const Assignment& assignment,
    uint64_t seed) {
    require(assignment.col_of_row.size() == temporal_subsets.size(), Err::ShapeMismatch,
            "assignment does not cover the temporal classes");
    Rng rng(seed);
    std::vector<PairedSample> out;

    for (size_t m = 0; m < temporal_subsets.size(); ++m) {
        const auto& ts = temporal_subsets[m];
        const int v_cls = assignment.col_of_row[m];
        require(v_cls >= 0 && v_cls < int(visual_subsets.size()), Err::IndexOutOfRange,
                "assignment target out of range");
        const auto& vs = visual_subsets[size_t(v_cls)];
        require(!ts.empty() && !vs.empty(), Err::EmptySubset, "empty class subset");

        const bool temporal_larger = ts.size() >= vs.size();
        const size_t big = std::max(ts.size(), vs.size());
        const size_t small = std::min(ts.size(), vs.size());

        // cover the smaller side with a permutation, then draw with replacement
        std::vector<int> cover(small);
        for (size_t i = 0; i < small; ++i) cover[i] = int(i);
        rng.shuffle(cover);
        for (size_t i = 0; i < big; ++i) {
            const int small_idx = i < small ? cover[i] : rng.below(int(small));
            const size_t t_idx = temporal_larger ? i : size_t(small_idx);
            const size_t v_idx = temporal_larger ? size_t(small_idx) : i;
            PairedSample pair;
            pair.source = ts[t_idx];
            pair.target = vs[v_idx];
            pair.provenance = PairProvenance::ClassAssigned;
            pair.label = int(m);
            out.push_back(std::move(pair));
        }
    }
    return out;
}

NearestCentroidClassifier::NearestCentroidClassifier(
    const std::vector<std::vector<Image>>& refs_per_class) {
    require(!refs_per_class.empty(), Err::NoReferences, "no reference classes");
    for (const auto& refs : refs_per_class) {
        require(!refs.empty(), Err::NoReferences, "a class has no reference images");
        Image centroid(refs.front().height, refs.front().width, refs.front().channels);
        for (const auto& img : refs) {
            require(img.height == centroid.height && img.width == centroid.width &&
                        img.channels == centroid.channels,
                    Err::GeometryMismatch, "reference images disagree on geometry");
            for (size_t i = 0; i < img.pixels.size(); ++i) centroid.pixels[i] += img.pixels[i];
        }
        for (double& v : centroid.pixels) v /= double(refs.size());
        centroids_.push_back(std::move(centroid));
    }
}

int NearestCentroidClassifier::classify(const Image& img) const {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (size_t cls = 0; cls < centroids_.size(); ++cls) {
        const Image& c = centroids_[cls];
        require(img.pixels.size() == c.pixels.size(), Err::GeometryMismatch,
                "image geometry does not match references");
        double d = 0.0;
        for (size_t i = 0; i < img.pixels.size(); ++i) {
            const double diff = img.pixels[i] - c.pixels[i];
            d += diff * diff;
        }
        d /= double(img.pixels.size());
        if (d < best_d) {  // strict: ties stay with the smallest class id
            best_d = d;
            best = int(cls);
        }
    }
    return best;
}

int classify_series(const TimeSeries& x, const AlignmentModel& model,
                    const TokenizerBundle& bundle, const ImageClassifier& classifier) {
    require(model.direction == Direction::TemporalToVisual, Err::ShapeMismatch,
            "classification needs a temporal-to-visual alignment model");
    const IndexSequence src = extract_indices(x, bundle);
    const AlignPrediction pred = align_predict(model, src);
    const Image img = indices_to_image(pred.argmax, bundle);
    return classifier.classify(img);
}

}  // namespace tvc
