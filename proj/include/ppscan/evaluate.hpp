#ifndef PPSCAN_EVALUATE_HPP
#define PPSCAN_EVALUATE_HPP

#include <array>
#include <cstddef>
#include <vector>

#include "ppscan/annotated.hpp"
#include "ppscan/model_bundle.hpp"
#include "ppscan/tokenize.hpp"

namespace ppscan::classify {

// Binary confusion counts and the derived metrics for one category.
// Degenerate cases follow the usual conventions: precision is 1.0 with no
// predicted positives, recall is 1.0 with no actual positives, f1 is 0.0
// when precision + recall is 0, accuracy is 1.0 on an empty count set.
struct CategoryEval {
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

CategoryEval eval_from_counts(std::size_t tp, std::size_t fp, std::size_t tn, std::size_t fn);

struct EvalReport {
    std::array<CategoryEval, kNumCategories> per_category{};
    double overall = 0.0;  // unweighted mean of per-category accuracy
    std::size_t segment_count = 0;

    const CategoryEval& category(Category c) const { return per_category[category_index(c)]; }
};

// Confusion counting over parallel gold/predicted vectors.
EvalReport evaluate_decisions(const std::vector<CategorySet>& gold,
                              const std::vector<DecisionVector>& predicted);

// Wraps an annotated segment the way prep would present it to a classifier.
prep::TokenizedSegment to_segment(const AnnotatedSegment& seg, const prep::StopwordSet& stopwords,
                                  std::size_t index = 0);

// Scores every test segment with the bundle and tallies the confusion per
// category. Throws EmptyTestSet on empty input.
EvalReport evaluate(const ModelBundle& model, const std::vector<AnnotatedSegment>& test,
                    const prep::StopwordSet& stopwords);

// Fold mean: metrics averaged across reports, confusion counts summed.
EvalReport mean_report(const std::vector<EvalReport>& reports);

}  // namespace ppscan::classify

#endif
