#include "ppscan/evaluate.hpp"

#include "ppscan/errors.hpp"
#include "ppscan/extract.hpp"

namespace ppscan::classify {

CategoryEval eval_from_counts(std::size_t tp, std::size_t fp, std::size_t tn, std::size_t fn) {
    CategoryEval e;
    e.tp = tp;
    e.fp = fp;
    e.tn = tn;
    e.fn = fn;
    std::size_t total = tp + fp + tn + fn;
    e.accuracy = total == 0 ? 1.0
                            : static_cast<double>(tp + tn) / static_cast<double>(total);
    e.precision = tp + fp == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
    e.recall = tp + fn == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
    e.f1 = e.precision + e.recall == 0.0
               ? 0.0
               : 2.0 * e.precision * e.recall / (e.precision + e.recall);
    return e;
}

EvalReport evaluate_decisions(const std::vector<CategorySet>& gold,
                              const std::vector<DecisionVector>& predicted) {
    if (gold.size() != predicted.size())
        throw Error("evaluate_decisions: gold and predicted sizes differ");
    if (gold.empty()) throw EmptyTestSet();

    EvalReport report;
    report.segment_count = gold.size();
    for (std::size_t c = 0; c < kNumCategories; ++c) {
        std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
        for (std::size_t i = 0; i < gold.size(); ++i) {
            bool actual = gold[i].bits[c];
            bool pred = predicted[i][c];
            if (actual && pred)
                ++tp;
            else if (!actual && pred)
                ++fp;
            else if (actual && !pred)
                ++fn;
            else
                ++tn;
        }
        report.per_category[c] = eval_from_counts(tp, fp, tn, fn);
        report.overall += report.per_category[c].accuracy;
    }
    report.overall /= static_cast<double>(kNumCategories);
    return report;
}

prep::TokenizedSegment to_segment(const AnnotatedSegment& seg, const prep::StopwordSet& stopwords,
                                  std::size_t index) {
    prep::TokenizedSegment out;
    out.paragraph.index = index;
    out.paragraph.text = seg.text;
    out.paragraph.word_count = extract::count_words(seg.text);
    out.paragraph.emphasis = false;
    out.tokens = prep::tokenize(seg.text, stopwords);
    out.kept = true;
    return out;
}

EvalReport evaluate(const ModelBundle& model, const std::vector<AnnotatedSegment>& test,
                    const prep::StopwordSet& stopwords) {
    if (test.empty()) throw EmptyTestSet();
    std::vector<CategorySet> gold;
    std::vector<DecisionVector> predicted;
    gold.reserve(test.size());
    predicted.reserve(test.size());
    for (std::size_t i = 0; i < test.size(); ++i) {
        gold.push_back(test[i].gold);
        predicted.push_back(classify_segment(to_segment(test[i], stopwords, i), model).decisions);
    }
    return evaluate_decisions(gold, predicted);
}

EvalReport mean_report(const std::vector<EvalReport>& reports) {
    if (reports.empty()) throw EmptyTestSet();
    EvalReport mean;
    for (const auto& r : reports) {
        mean.segment_count += r.segment_count;
        mean.overall += r.overall;
        for (std::size_t c = 0; c < kNumCategories; ++c) {
            mean.per_category[c].tp += r.per_category[c].tp;
            mean.per_category[c].fp += r.per_category[c].fp;
            mean.per_category[c].tn += r.per_category[c].tn;
            mean.per_category[c].fn += r.per_category[c].fn;
            mean.per_category[c].accuracy += r.per_category[c].accuracy;
            mean.per_category[c].precision += r.per_category[c].precision;
            mean.per_category[c].recall += r.per_category[c].recall;
            mean.per_category[c].f1 += r.per_category[c].f1;
        }
    }
    auto n = static_cast<double>(reports.size());
    mean.overall /= n;
    for (auto& e : mean.per_category) {
        e.accuracy /= n;
        e.precision /= n;
        e.recall /= n;
        e.f1 /= n;
    }
    return mean;
}

}  // namespace ppscan::classify
