#ifndef PPSCAN_LABEL_SCORES_HPP
#define PPSCAN_LABEL_SCORES_HPP

#include <array>

#include "ppscan/category.hpp"

namespace ppscan::classify {

using ScoreVector = std::array<double, kNumCategories>;
using DecisionVector = std::array<bool, kNumCategories>;
using ThresholdVector = std::array<double, kNumCategories>;

inline ThresholdVector uniform_thresholds(double t) {
    ThresholdVector v;
    v.fill(t);
    return v;
}

// Nine scores in [0,1] plus the thresholded decisions, categories in
// canonical order. decision(c) == (score(c) >= threshold(c)).
struct LabelScores {
    ScoreVector scores{};
    DecisionVector decisions{};
    ThresholdVector thresholds = uniform_thresholds(0.5);

    double score(Category c) const { return scores[category_index(c)]; }
    bool decision(Category c) const { return decisions[category_index(c)]; }

    static LabelScores from_scores(const ScoreVector& scores, const ThresholdVector& thresholds);
};

inline LabelScores LabelScores::from_scores(const ScoreVector& scores,
                                            const ThresholdVector& thresholds) {
    LabelScores out;
    out.scores = scores;
    out.thresholds = thresholds;
    for (std::size_t i = 0; i < kNumCategories; ++i)
        out.decisions[i] = scores[i] >= thresholds[i];
    return out;
}

}  // namespace ppscan::classify

#endif
