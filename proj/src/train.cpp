#include "ppscan/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>

#include "ppscan/errors.hpp"

namespace ppscan::classify {

double one_cycle_lr(std::size_t step, std::size_t total_steps, const TrainConfig& config) {
    double floor_lr = config.peak_lr / config.lr_div;
    if (total_steps == 0) return floor_lr;
    auto warmup = static_cast<std::size_t>(config.warmup_fraction *
                                           static_cast<double>(total_steps));
    if (warmup < 1) warmup = 1;
    if (warmup > total_steps) warmup = total_steps;
    if (step < warmup)
        return floor_lr + (config.peak_lr - floor_lr) *
                              (static_cast<double>(step + 1) / static_cast<double>(warmup));
    double progress = static_cast<double>(step - warmup + 1) /
                      static_cast<double>(total_steps - warmup);
    return config.peak_lr - (config.peak_lr - floor_lr) * progress;
}

std::string data_fingerprint(const std::vector<AnnotatedSegment>& data) {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](const std::string& s) {
        for (unsigned char ch : s) {
            h ^= ch;
            h *= 1099511628211ull;
        }
        h ^= 0x1f;
        h *= 1099511628211ull;
    };
    for (const auto& seg : data) {
        mix(seg.text);
        mix(seg.gold.signature());
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ModelBundle train_linear(const std::vector<AnnotatedSegment>& data, const TrainConfig& config,
                         const prep::StopwordSet& stopwords) {
    if (config.epochs < 1) throw Error("training requires at least one epoch");
    if (config.batch_size < 1) throw Error("training requires a positive batch size");

    std::vector<std::vector<std::string>> docs;
    docs.reserve(data.size());
    for (const auto& seg : data) {
        auto tokens = prep::tokenize(seg.text, stopwords);
        if (tokens.size() > config.max_tokens) tokens.resize(config.max_tokens);
        docs.push_back(std::move(tokens));
    }
    TfidfVectorizer vectorizer = TfidfVectorizer::fit(docs);
    std::vector<SparseVector> features;
    features.reserve(docs.size());
    for (const auto& doc : docs) features.push_back(vectorizer.transform(doc));

    std::array<LinearHead, kNumCategories> heads;
    std::array<std::vector<double>, kNumCategories> loss_curves;
    std::array<std::size_t, kNumCategories> positive_counts{};

    for (std::size_t c = 0; c < kNumCategories; ++c) {
        const std::string& cat_name = category_name(kAllCategories[c]);

        std::vector<std::size_t> pos_idx, neg_idx;
        for (std::size_t i = 0; i < data.size(); ++i)
            (data[i].gold.bits[c] ? pos_idx : neg_idx).push_back(i);
        positive_counts[c] = pos_idx.size();
        if (pos_idx.size() < 2 || neg_idx.size() < 2) throw InsufficientData(cat_name);

        std::seed_seq seq{config.seed, static_cast<std::uint32_t>(c)};
        std::mt19937 rng(seq);

        std::vector<std::size_t> examples;
        if (config.downsample && pos_idx.size() != neg_idx.size()) {
            auto& majority = pos_idx.size() > neg_idx.size() ? pos_idx : neg_idx;
            auto& minority = pos_idx.size() > neg_idx.size() ? neg_idx : pos_idx;
            seeded_shuffle(majority, rng);
            majority.resize(minority.size());
            examples = minority;
            examples.insert(examples.end(), majority.begin(), majority.end());
            std::sort(examples.begin(), examples.end());
        } else {
            examples.resize(data.size());
            std::iota(examples.begin(), examples.end(), 0);
        }

        std::vector<SparseVector> xs;
        std::vector<int> ys;
        xs.reserve(examples.size());
        ys.reserve(examples.size());
        for (std::size_t i : examples) {
            xs.push_back(features[i]);
            ys.push_back(data[i].gold.bits[c] ? 1 : 0);
        }

        LinearHead head;
        head.weights.assign(vectorizer.dim(), 0.0);

        std::size_t n = xs.size();
        std::size_t batches = (n + config.batch_size - 1) / config.batch_size;
        std::size_t total_steps = config.epochs * batches;
        std::size_t step = 0;

        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);

        for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
            seeded_shuffle(order, rng);
            for (std::size_t b = 0; b < batches; ++b) {
                std::size_t lo = b * config.batch_size;
                std::size_t hi = std::min(lo + config.batch_size, n);
                std::vector<SparseVector> batch;
                std::vector<int> labels;
                batch.reserve(hi - lo);
                labels.reserve(hi - lo);
                for (std::size_t k = lo; k < hi; ++k) {
                    batch.push_back(xs[order[k]]);
                    labels.push_back(ys[order[k]]);
                }
                LossGrad g = logistic_loss_grad(head, batch, labels, config.l2);
                if (!std::isfinite(g.loss)) throw NonFiniteLoss();
                double lr = one_cycle_lr(step++, total_steps, config);
                for (std::size_t j = 0; j < head.weights.size(); ++j)
                    head.weights[j] -= lr * g.grad_weights[j];
                head.bias -= lr * g.grad_bias;
            }
            double epoch_loss = logistic_loss(head, xs, ys, config.l2);
            if (!std::isfinite(epoch_loss)) throw NonFiniteLoss();
            loss_curves[c].push_back(epoch_loss);
        }
        heads[c] = std::move(head);
    }

    ModelBundle bundle = ModelBundle::make_linear(std::move(vectorizer), std::move(heads));
    bundle.set_max_tokens(config.max_tokens);

    nlohmann::ordered_json training;
    training["epochs"] = config.epochs;
    training["batch_size"] = config.batch_size;
    training["peak_lr"] = config.peak_lr;
    training["warmup_fraction"] = config.warmup_fraction;
    training["lr_div"] = config.lr_div;
    training["l2"] = config.l2;
    training["seed"] = config.seed;
    training["downsample"] = config.downsample;
    training["segments"] = data.size();
    training["data_hash"] = data_fingerprint(data);
    nlohmann::ordered_json positives = nlohmann::ordered_json::object();
    nlohmann::ordered_json losses = nlohmann::ordered_json::object();
    for (std::size_t c = 0; c < kNumCategories; ++c) {
        positives[category_name(kAllCategories[c])] = positive_counts[c];
        losses[category_name(kAllCategories[c])] = loss_curves[c];
    }
    training["positives"] = std::move(positives);
    training["loss_per_epoch"] = std::move(losses);
    bundle.metadata()["training"] = std::move(training);
    return bundle;
}

namespace {

// Gold-signature groups in signature order, each shuffled with the shared
// generator. The flattened order is what the dealing schemes walk.
std::vector<std::size_t> stratified_order(const std::vector<AnnotatedSegment>& data,
                                          std::uint32_t seed) {
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < data.size(); ++i)
        groups[data[i].gold.signature()].push_back(i);

    std::seed_seq seq{seed};
    std::mt19937 rng(seq);
    std::vector<std::size_t> order;
    order.reserve(data.size());
    for (auto& [signature, members] : groups) {
        seeded_shuffle(members, rng);
        order.insert(order.end(), members.begin(), members.end());
    }
    return order;
}

}  // namespace

SplitResult stratified_split(const std::vector<AnnotatedSegment>& data, double test_fraction,
                             std::uint32_t seed) {
    if (test_fraction < 0.0 || test_fraction >= 1.0)
        throw Error("test fraction must be in [0, 1)");

    std::vector<bool> is_test(data.size(), false);
    double due = 0.0;
    for (std::size_t i : stratified_order(data, seed)) {
        due += test_fraction;
        if (due >= 1.0 - 1e-9) {
            is_test[i] = true;
            due -= 1.0;
        }
    }

    SplitResult out;
    for (std::size_t i = 0; i < data.size(); ++i)
        (is_test[i] ? out.test : out.train).push_back(data[i]);
    return out;
}

std::vector<std::vector<std::size_t>> stratified_folds(const std::vector<AnnotatedSegment>& data,
                                                       std::size_t k, std::uint32_t seed) {
    if (k < 2 || k > data.size()) throw KTooLarge(k, data.size());
    std::vector<std::vector<std::size_t>> folds(k);
    std::size_t next = 0;
    for (std::size_t i : stratified_order(data, seed)) folds[next++ % k].push_back(i);
    for (auto& fold : folds) std::sort(fold.begin(), fold.end());
    return folds;
}

CrossValidation cross_validate(const std::vector<AnnotatedSegment>& data, std::size_t k,
                               const TrainConfig& config, const prep::StopwordSet& stopwords) {
    auto folds = stratified_folds(data, k, config.seed);

    CrossValidation cv;
    for (std::size_t f = 0; f < k; ++f) {
        std::vector<bool> held_out(data.size(), false);
        for (std::size_t i : folds[f]) held_out[i] = true;

        std::vector<AnnotatedSegment> train_set, test_set;
        for (std::size_t i = 0; i < data.size(); ++i)
            (held_out[i] ? test_set : train_set).push_back(data[i]);

        ModelBundle model = train_linear(train_set, config, stopwords);
        cv.folds.push_back(evaluate(model, test_set, stopwords));
    }
    cv.mean = mean_report(cv.folds);
    return cv;
}

}  // namespace ppscan::classify
