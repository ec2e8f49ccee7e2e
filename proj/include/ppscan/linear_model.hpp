#ifndef PPSCAN_LINEAR_MODEL_HPP
#define PPSCAN_LINEAR_MODEL_HPP

#include <cstddef>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ppscan/category.hpp"

namespace ppscan::classify {

// Sparse feature vector: (vocabulary index, value) pairs, indices strictly
// increasing.
using SparseVector = std::vector<std::pair<std::size_t, double>>;

// TF-IDF featurizer over the analysis tokenization.
//   tf(t)  = count(t) / segment_length          (length = tokens considered)
//   idf(t) = ln((1 + N) / (1 + df(t))) + 1
// and the resulting vector is L2-normalized.
class TfidfVectorizer {
public:
    TfidfVectorizer() = default;

    // Builds vocabulary (sorted) and document frequencies from training token
    // lists. Token lists must already be truncated to the model's max_tokens.
    static TfidfVectorizer fit(const std::vector<std::vector<std::string>>& documents);

    // Reconstructs a fitted vectorizer from serialized state.
    TfidfVectorizer(std::vector<std::string> vocabulary, std::vector<double> idf);

    SparseVector transform(const std::vector<std::string>& tokens) const;

    const std::vector<std::string>& vocabulary() const { return vocabulary_; }
    const std::vector<double>& idf() const { return idf_; }
    std::size_t dim() const { return vocabulary_.size(); }

private:
    std::vector<std::string> vocabulary_;
    std::vector<double> idf_;
    std::unordered_map<std::string, std::size_t> index_;
};

// One binary logistic head: score = sigmoid(w . x + b).
struct LinearHead {
    std::vector<double> weights;
    double bias = 0.0;
};

double sigmoid(double z);
double dot(const LinearHead& head, const SparseVector& x);
double score_linear(const LinearHead& head, const SparseVector& x);

// Mean binary cross-entropy over the batch plus (l2/2)*||w||^2, with its
// analytic gradient. Exposed so tests can check the gradient against finite
// differences.
struct LossGrad {
    double loss = 0.0;
    std::vector<double> grad_weights;
    double grad_bias = 0.0;
};

LossGrad logistic_loss_grad(const LinearHead& head,
                            const std::vector<SparseVector>& batch,
                            const std::vector<int>& labels, double l2 = 0.0);

double logistic_loss(const LinearHead& head, const std::vector<SparseVector>& batch,
                     const std::vector<int>& labels, double l2 = 0.0);

}  // namespace ppscan::classify

#endif
