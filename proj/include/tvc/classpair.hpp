#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "tvc/alignment.hpp"
#include "tvc/bundle.hpp"
#include "tvc/hungarian.hpp"
#include "tvc/types.hpp"

namespace tvc {

// Per-head empirical code distribution of a class subset: counts over all
// samples' N x M index grids, normalized per head.
struct IndexHistogram {
    int heads = 0, codes = 0;
    std::vector<long long> counts;  // M x K
    std::vector<double> probs;      // M x K, rows sum to 1
    long long total_per_head = 0;

    long long count_at(int m, int k) const { return counts[size_t(m) * codes + k]; }
    double prob_at(int m, int k) const { return probs[size_t(m) * codes + k]; }
};

IndexHistogram index_histogram(const std::vector<IndexSequence>& subset, int heads, int codes);
IndexHistogram index_histogram(const std::vector<TimeSeries>& subset, const TokenizerBundle& bundle);
IndexHistogram index_histogram(const std::vector<Image>& subset, const TokenizerBundle& bundle);

// Mean over heads of JSD(p_m || q_m), natural log, with 0 log(0/x) := 0.
// Bounded by ln 2; zero iff the distributions coincide.
double js_divergence(const IndexHistogram& p, const IndexHistogram& q);

// C(m, n) = js_divergence(temporal[m], visual[n]).
Mat cost_matrix(const std::vector<IndexHistogram>& temporal,
                const std::vector<IndexHistogram>& visual);

// Pair samples inside each matched class: every sample of the larger side
// appears exactly once; the smaller side is first covered by a seeded
// permutation, then drawn uniformly with replacement.
std::vector<PairedSample> build_paired_dataset(
    const std::vector<std::vector<IndexSequence>>& temporal_subsets,
    const std::vector<std::vector<IndexSequence>>& visual_subsets, const Assignment& assignment,
    uint64_t seed);

// Stand-in for a frozen vision model; pluggable so a real classifier can
// replace it behind the same call.
class ImageClassifier {
public:
    virtual ~ImageClassifier() = default;
    virtual int classify(const Image& img) const = 0;
};

// Nearest reference-centroid in pixel space (mean squared distance), ties to
// the smallest class id.
class NearestCentroidClassifier : public ImageClassifier {
public:
    explicit NearestCentroidClassifier(const std::vector<std::vector<Image>>& refs_per_class);
    int classify(const Image& img) const override;
    const Image& centroid(int cls) const { return centroids_[size_t(cls)]; }

private:
    std::vector<Image> centroids_;
};

// Series -> image through the trained alignment, then the frozen classifier.
int classify_series(const TimeSeries& x, const AlignmentModel& model,
                    const TokenizerBundle& bundle, const ImageClassifier& classifier);

}  // namespace tvc
