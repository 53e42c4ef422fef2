#pragma once

// Brute-force counting re-implementation of the evaluation metrics, kept
// free of the library's metric code so the two routes stay independent.

#include <cstdint>
#include <vector>

namespace charisma::testsupport {

struct OracleClassRow {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::int64_t support = 0;
    bool no_predictions = false;
};

struct OracleResult {
    std::vector<std::vector<std::int64_t>> counts;  // [actual][predicted]
    std::vector<OracleClassRow> rows;
    double accuracy = 0.0;
    double macro_p = 0.0, macro_r = 0.0, macro_f1 = 0.0;
    double weighted_p = 0.0, weighted_r = 0.0, weighted_f1 = 0.0;
};

inline OracleResult oracle_metrics(const std::vector<int>& y_true,
                                   const std::vector<int>& y_pred, int k) {
    OracleResult out;
    out.counts.assign(static_cast<std::size_t>(k),
                      std::vector<std::int64_t>(static_cast<std::size_t>(k), 0));
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        out.counts[static_cast<std::size_t>(y_true[i])]
                  [static_cast<std::size_t>(y_pred[i])] += 1;
    }

    std::int64_t hits = 0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        if (y_true[i] == y_pred[i]) {
            ++hits;
        }
    }
    out.accuracy =
        y_true.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(y_true.size());

    std::int64_t total_support = 0;
    for (int c = 0; c < k; ++c) {
        std::int64_t tp = 0, fp = 0, fn = 0, support = 0;
        for (std::size_t i = 0; i < y_true.size(); ++i) {
            const bool actual = y_true[i] == c;
            const bool predicted = y_pred[i] == c;
            if (actual) {
                ++support;
            }
            if (actual && predicted) {
                ++tp;
            } else if (!actual && predicted) {
                ++fp;
            } else if (actual && !predicted) {
                ++fn;
            }
        }
        OracleClassRow row;
        row.support = support;
        if (tp + fp == 0) {
            row.precision = 0.0;
            row.no_predictions = true;
        } else {
            row.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
        }
        row.recall = tp + fn == 0 ? 0.0
                                  : static_cast<double>(tp) / static_cast<double>(tp + fn);
        row.f1 = row.precision + row.recall == 0.0
                     ? 0.0
                     : 2.0 * row.precision * row.recall / (row.precision + row.recall);
        out.rows.push_back(row);
        total_support += support;
    }

    for (const auto& row : out.rows) {
        out.macro_p += row.precision;
        out.macro_r += row.recall;
        out.macro_f1 += row.f1;
        const double w = static_cast<double>(row.support);
        out.weighted_p += row.precision * w;
        out.weighted_r += row.recall * w;
        out.weighted_f1 += row.f1 * w;
    }
    out.macro_p /= k;
    out.macro_r /= k;
    out.macro_f1 /= k;
    if (total_support > 0) {
        const double n = static_cast<double>(total_support);
        out.weighted_p /= n;
        out.weighted_r /= n;
        out.weighted_f1 /= n;
    }
    return out;
}

}  // namespace charisma::testsupport
