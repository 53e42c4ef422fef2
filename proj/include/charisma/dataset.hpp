#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "charisma/corpus.hpp"

namespace charisma {

// Explicit Fisher-Yates; std::shuffle's output is not pinned down by the
// standard and seeded runs must be reproducible everywhere.
void deterministic_shuffle(std::vector<std::size_t>& values, std::mt19937_64& rng);

struct SplitSpec {
    double test_fraction = 0.2;
    double val_fraction_of_train = 0.1;
    std::uint64_t seed = 0;
    bool stratified = true;
};

struct DatasetSplits {
    Corpus train;
    Corpus val;
    Corpus test;
};

struct ClassWeights {
    // Present labels only; weight(c) = N / (k * count(c)) with k the number
    // of nonempty classes. The per-sample mean of these weights is 1.
    std::map<CLTLabel, double> weights;
};

// Deterministic shuffle-and-cut split. Sizes follow the floor rule:
// train_pool = floor((1 - test_fraction) * N), test = N - train_pool,
// then train = floor((1 - val_fraction) * train_pool), val = the rest.
// Stratified mode applies the rule per class and merges. Each output
// keeps the input corpus order.
DatasetSplits split(const Corpus& corpus, const SplitSpec& spec);

ClassWeights class_weights(const Corpus& corpus);

/// Split summary (seed, fractions, sizes, per-class counts) for manifests.
nlohmann::ordered_json split_summary(const DatasetSplits& splits, const SplitSpec& spec);

}  // namespace charisma
