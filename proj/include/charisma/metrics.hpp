#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "charisma/classifier.hpp"
#include "charisma/corpus.hpp"

namespace charisma {

// k x k count matrix over the fixed label order. Rows are the actual
// class, columns the predicted class.
struct ConfusionMatrix {
    int k = kNumLabels;
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> counts;

    ConfusionMatrix()
        : counts(Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>::Zero(
              kNumLabels, kNumLabels)) {}

    std::int64_t total() const { return counts.sum(); }
};

struct ClassMetrics {
    CLTLabel label = CLTLabel::metaphor_simile;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::int64_t support = 0;
    bool undefined_precision = false;  // class was never predicted
};

struct AverageMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct MetricsReport {
    std::int64_t n = 0;
    double accuracy = 0.0;
    std::vector<ClassMetrics> per_class;
    AverageMetrics macro;
    AverageMetrics weighted;
};

ConfusionMatrix confusion_matrix(const std::vector<CLTLabel>& y_true,
                                 const std::vector<CLTLabel>& y_pred);

std::vector<ClassMetrics> per_class_metrics(const ConfusionMatrix& cm);

AverageMetrics macro_average(const std::vector<ClassMetrics>& per_class);

// Support-weighted mean. All-zero supports raise ArgumentError.
AverageMetrics weighted_average(const std::vector<ClassMetrics>& per_class);

double accuracy(const ConfusionMatrix& cm);

MetricsReport metrics_report(const ConfusionMatrix& cm);

nlohmann::ordered_json metrics_report_to_json(const MetricsReport& report);

// Table-style text with values rounded to 4 decimals.
std::string format_metrics_report(const MetricsReport& report);

void write_metrics_report(const MetricsReport& report, const std::string& path);

// Writes an SVG heatmap at path plus a CSV with the same stem. Both are
// byte-deterministic for a given matrix.
void render_confusion_matrix(const ConfusionMatrix& cm, const std::string& path);

std::string confusion_matrix_csv(const ConfusionMatrix& cm);
std::string confusion_matrix_svg(const ConfusionMatrix& cm);

struct EvaluationResult {
    ConfusionMatrix cm;
    MetricsReport report;
};

// predict -> confusion matrix -> metrics, in input order.
EvaluationResult evaluate(const Checkpoint& ckpt, const Corpus& test);

}  // namespace charisma
