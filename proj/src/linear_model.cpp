#include "ppscan/linear_model.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace ppscan::classify {

TfidfVectorizer TfidfVectorizer::fit(const std::vector<std::vector<std::string>>& documents) {
    // std::map keeps the vocabulary sorted, which pins the feature order.
    std::map<std::string, std::size_t> df;
    for (const auto& doc : documents) {
        std::map<std::string, bool> seen;
        for (const auto& t : doc) seen.emplace(t, true);
        for (const auto& [t, _] : seen) ++df[t];
    }

    TfidfVectorizer v;
    v.vocabulary_.reserve(df.size());
    v.idf_.reserve(df.size());
    const double n = static_cast<double>(documents.size());
    for (const auto& [term, count] : df) {
        v.vocabulary_.push_back(term);
        v.idf_.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0);
    }
    for (std::size_t i = 0; i < v.vocabulary_.size(); ++i) v.index_[v.vocabulary_[i]] = i;
    return v;
}

TfidfVectorizer::TfidfVectorizer(std::vector<std::string> vocabulary, std::vector<double> idf)
    : vocabulary_(std::move(vocabulary)), idf_(std::move(idf)) {
    for (std::size_t i = 0; i < vocabulary_.size(); ++i) index_[vocabulary_[i]] = i;
}

SparseVector TfidfVectorizer::transform(const std::vector<std::string>& tokens) const {
    std::map<std::size_t, double> counts;
    for (const auto& t : tokens) {
        auto it = index_.find(t);
        if (it != index_.end()) counts[it->second] += 1.0;
    }
    SparseVector x;
    if (counts.empty()) return x;

    const double len = static_cast<double>(tokens.size());
    double norm_sq = 0.0;
    x.reserve(counts.size());
    for (const auto& [idx, count] : counts) {
        double value = (count / len) * idf_[idx];
        x.emplace_back(idx, value);
        norm_sq += value * value;
    }
    if (norm_sq > 0.0) {
        double inv = 1.0 / std::sqrt(norm_sq);
        for (auto& [idx, value] : x) value *= inv;
    }
    return x;
}

double sigmoid(double z) {
    if (z >= 0) {
        double e = std::exp(-z);
        return 1.0 / (1.0 + e);
    }
    double e = std::exp(z);
    return e / (1.0 + e);
}

double dot(const LinearHead& head, const SparseVector& x) {
    double z = head.bias;
    for (const auto& [idx, value] : x) z += head.weights[idx] * value;
    return z;
}

double score_linear(const LinearHead& head, const SparseVector& x) {
    return sigmoid(dot(head, x));
}

namespace {

// log(1 + e^z) without overflow.
double log1p_exp(double z) {
    if (z > 0) return z + std::log1p(std::exp(-z));
    return std::log1p(std::exp(z));
}

}  // namespace

LossGrad logistic_loss_grad(const LinearHead& head, const std::vector<SparseVector>& batch,
                            const std::vector<int>& labels, double l2) {
    LossGrad out;
    out.grad_weights.assign(head.weights.size(), 0.0);
    const double n = static_cast<double>(batch.size());

    for (std::size_t i = 0; i < batch.size(); ++i) {
        double z = dot(head, batch[i]);
        double y = static_cast<double>(labels[i]);
        // -y*log(p) - (1-y)*log(1-p) == log(1+e^z) - y*z
        out.loss += log1p_exp(z) - y * z;
        double residual = sigmoid(z) - y;
        for (const auto& [idx, value] : batch[i]) out.grad_weights[idx] += residual * value;
        out.grad_bias += residual;
    }
    out.loss /= n;
    out.grad_bias /= n;
    for (double& g : out.grad_weights) g /= n;

    if (l2 > 0.0) {
        double reg = 0.0;
        for (std::size_t j = 0; j < head.weights.size(); ++j) {
            reg += head.weights[j] * head.weights[j];
            out.grad_weights[j] += l2 * head.weights[j];
        }
        out.loss += 0.5 * l2 * reg;
    }
    return out;
}

double logistic_loss(const LinearHead& head, const std::vector<SparseVector>& batch,
                     const std::vector<int>& labels, double l2) {
    double loss = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        double z = dot(head, batch[i]);
        loss += log1p_exp(z) - static_cast<double>(labels[i]) * z;
    }
    loss /= static_cast<double>(batch.size());
    if (l2 > 0.0) {
        double reg = 0.0;
        for (double w : head.weights) reg += w * w;
        loss += 0.5 * l2 * reg;
    }
    return loss;
}

}  // namespace ppscan::classify
