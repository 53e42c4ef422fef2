#include "charisma/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "charisma/errors.hpp"

namespace charisma {

void deterministic_shuffle(std::vector<std::size_t>& values, std::mt19937_64& rng) {
    for (std::size_t i = values.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rng() % i);
        std::swap(values[i - 1], values[j]);
    }
}

namespace {

struct Cut {
    std::size_t train = 0;
    std::size_t val = 0;
    std::size_t test = 0;
};

Cut cut_sizes(std::size_t n, const SplitSpec& spec) {
    Cut cut;
    auto train_pool =
        static_cast<std::size_t>(std::floor((1.0 - spec.test_fraction) * static_cast<double>(n)));
    cut.test = n - train_pool;
    cut.train = static_cast<std::size_t>(
        std::floor((1.0 - spec.val_fraction_of_train) * static_cast<double>(train_pool)));
    cut.val = train_pool - cut.train;
    return cut;
}

void partition_indices(std::vector<std::size_t>& indices, const SplitSpec& spec,
                       std::mt19937_64& rng, std::vector<std::size_t>& train,
                       std::vector<std::size_t>& val, std::vector<std::size_t>& test) {
    deterministic_shuffle(indices, rng);
    Cut cut = cut_sizes(indices.size(), spec);
    train.insert(train.end(), indices.begin(), indices.begin() + cut.train);
    val.insert(val.end(), indices.begin() + cut.train, indices.begin() + cut.train + cut.val);
    test.insert(test.end(), indices.begin() + cut.train + cut.val, indices.end());
}

Corpus gather(const Corpus& corpus, std::vector<std::size_t>& indices) {
    std::sort(indices.begin(), indices.end());
    Corpus out;
    out.sentences.reserve(indices.size());
    for (std::size_t index : indices) {
        out.sentences.push_back(corpus.sentences[index]);
    }
    return out;
}

}  // namespace

DatasetSplits split(const Corpus& corpus, const SplitSpec& spec) {
    if (!(spec.test_fraction > 0.0 && spec.test_fraction < 1.0)) {
        throw ArgumentError("test_fraction must be in (0, 1)");
    }
    if (!(spec.val_fraction_of_train >= 0.0 && spec.val_fraction_of_train < 1.0)) {
        throw ArgumentError("val_fraction_of_train must be in [0, 1)");
    }
    if (spec.stratified && corpus.size() < 10) {
        throw ArgumentError("stratified split needs a corpus of size >= 10, got " +
                            std::to_string(corpus.size()));
    }

    std::mt19937_64 rng(spec.seed);
    std::vector<std::size_t> train_idx, val_idx, test_idx;

    if (spec.stratified) {
        for (CLTLabel label : all_labels()) {
            std::vector<std::size_t> class_indices;
            for (std::size_t i = 0; i < corpus.size(); ++i) {
                if (corpus.sentences[i].label == label) {
                    class_indices.push_back(i);
                }
            }
            if (class_indices.empty()) {
                continue;
            }
            partition_indices(class_indices, spec, rng, train_idx, val_idx, test_idx);
        }
    } else {
        std::vector<std::size_t> indices(corpus.size());
        for (std::size_t i = 0; i < indices.size(); ++i) {
            indices[i] = i;
        }
        partition_indices(indices, spec, rng, train_idx, val_idx, test_idx);
    }

    DatasetSplits splits;
    splits.train = gather(corpus, train_idx);
    splits.val = gather(corpus, val_idx);
    splits.test = gather(corpus, test_idx);
    return splits;
}

ClassWeights class_weights(const Corpus& corpus) {
    if (corpus.empty()) {
        throw ArgumentError("class_weights needs a non-empty corpus");
    }
    std::map<CLTLabel, std::size_t> counts;
    for (const auto& sentence : corpus.sentences) {
        counts[sentence.label] += 1;
    }
    const auto n = static_cast<double>(corpus.size());
    const auto k = static_cast<double>(counts.size());
    ClassWeights weights;
    for (const auto& [label, count] : counts) {
        weights.weights[label] = n / (k * static_cast<double>(count));
    }
    return weights;
}

nlohmann::ordered_json split_summary(const DatasetSplits& splits, const SplitSpec& spec) {
    nlohmann::ordered_json summary;
    summary["seed"] = spec.seed;
    summary["test_fraction"] = spec.test_fraction;
    summary["val_fraction_of_train"] = spec.val_fraction_of_train;
    summary["stratified"] = spec.stratified;
    summary["sizes"] = {
        {"train", splits.train.size()},
        {"val", splits.val.size()},
        {"test", splits.test.size()},
        {"total", splits.train.size() + splits.val.size() + splits.test.size()},
    };
    nlohmann::ordered_json per_class = nlohmann::ordered_json::object();
    auto train_stats = corpus_stats(splits.train);
    auto val_stats = corpus_stats(splits.val);
    auto test_stats = corpus_stats(splits.test);
    for (CLTLabel label : all_labels()) {
        per_class[std::string(label_name(label))] = {
            {"train", train_stats.per_label[label]},
            {"val", val_stats.per_label[label]},
            {"test", test_stats.per_label[label]},
        };
    }
    summary["per_class_counts"] = per_class;
    return summary;
}

}  // namespace charisma
