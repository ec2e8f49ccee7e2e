#ifndef PPSCAN_TRAIN_HPP
#define PPSCAN_TRAIN_HPP

#include <cstdint>
#include <random>
#include <vector>

#include "ppscan/annotated.hpp"
#include "ppscan/evaluate.hpp"
#include "ppscan/model_bundle.hpp"
#include "ppscan/tokenize.hpp"

namespace ppscan::classify {

struct TrainConfig {
    std::size_t epochs = 10;
    std::size_t batch_size = 32;
    double peak_lr = 0.5;
    double warmup_fraction = 0.3;  // share of steps spent warming up
    double lr_div = 25.0;          // floor learning rate = peak_lr / lr_div
    double l2 = 0.0;
    std::uint32_t seed = 1;
    bool downsample = false;  // balance each category by downsampling the majority class
    std::size_t max_tokens = kDefaultMaxTokens;
};

// One-cycle schedule: linear warmup from the floor to peak_lr over the first
// warmup_fraction of steps (peak reached on the last warmup step), then
// linear decay back to the floor on the final step.
double one_cycle_lr(std::size_t step, std::size_t total_steps, const TrainConfig& config);

// Fisher-Yates with draws taken directly from the generator, so the
// permutation does not depend on the standard library's std::shuffle details.
template <typename T>
void seeded_shuffle(std::vector<T>& v, std::mt19937& rng) {
    for (std::size_t i = v.size(); i > 1; --i)
        std::swap(v[i - 1], v[rng() % i]);
}

// Nine one-vs-rest logistic heads over a shared TF-IDF vocabulary, trained by
// mini-batch gradient descent under the one-cycle schedule. The returned
// bundle's metadata records the config, a hash of the training data, the
// per-category positive counts, and the per-epoch full-train loss curves.
// Deterministic for a fixed seed and input order.
ModelBundle train_linear(const std::vector<AnnotatedSegment>& data, const TrainConfig& config,
                         const prep::StopwordSet& stopwords);

struct SplitResult {
    std::vector<AnnotatedSegment> train;
    std::vector<AnnotatedSegment> test;
};

// Deterministic stratified split: segments are grouped by gold-label
// signature, each group is shuffled with the seeded generator, and items are
// dealt to the test side at the configured rate by a counter that runs
// across groups (so small groups still contribute proportionally).
SplitResult stratified_split(const std::vector<AnnotatedSegment>& data, double test_fraction,
                             std::uint32_t seed);

// Stratified k-fold assignment by the same dealing scheme; returns the index
// sets of each fold. Throws KTooLarge unless 2 <= k <= data.size().
std::vector<std::vector<std::size_t>> stratified_folds(const std::vector<AnnotatedSegment>& data,
                                                       std::size_t k, std::uint32_t seed);

struct CrossValidation {
    std::vector<EvalReport> folds;
    EvalReport mean;
};

CrossValidation cross_validate(const std::vector<AnnotatedSegment>& data, std::size_t k,
                               const TrainConfig& config, const prep::StopwordSet& stopwords);

// FNV-1a over the segment texts and label signatures; identifies the
// training set in bundle metadata.
std::string data_fingerprint(const std::vector<AnnotatedSegment>& data);

}  // namespace ppscan::classify

#endif
