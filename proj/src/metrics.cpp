#include "charisma/metrics.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "charisma/errors.hpp"

namespace charisma {

ConfusionMatrix confusion_matrix(const std::vector<CLTLabel>& y_true,
                                 const std::vector<CLTLabel>& y_pred) {
    if (y_true.size() != y_pred.size()) {
        throw ArgumentError("label list length mismatch: " +
                            std::to_string(y_true.size()) + " vs " +
                            std::to_string(y_pred.size()));
    }
    if (y_true.empty()) {
        throw ArgumentError("confusion_matrix needs at least one sample");
    }
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        ++cm.counts(label_index(y_true[i]), label_index(y_pred[i]));
    }
    return cm;
}

std::vector<ClassMetrics> per_class_metrics(const ConfusionMatrix& cm) {
    std::vector<ClassMetrics> metrics;
    metrics.reserve(static_cast<std::size_t>(cm.k));
    for (int c = 0; c < cm.k; ++c) {
        ClassMetrics m;
        m.label = label_from_index(c);
        const std::int64_t diag = cm.counts(c, c);
        const std::int64_t col_sum = cm.counts.col(c).sum();
        const std::int64_t row_sum = cm.counts.row(c).sum();
        if (col_sum == 0) {
            m.precision = 0.0;
            m.undefined_precision = true;
        } else {
            m.precision = static_cast<double>(diag) / static_cast<double>(col_sum);
        }
        m.recall = row_sum == 0
                       ? 0.0
                       : static_cast<double>(diag) / static_cast<double>(row_sum);
        m.f1 = (m.precision + m.recall) > 0.0
                   ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
                   : 0.0;
        m.support = row_sum;
        metrics.push_back(m);
    }
    return metrics;
}

AverageMetrics macro_average(const std::vector<ClassMetrics>& per_class) {
    if (per_class.empty()) {
        throw ArgumentError("macro_average needs at least one class");
    }
    AverageMetrics avg;
    for (const auto& m : per_class) {
        avg.precision += m.precision;
        avg.recall += m.recall;
        avg.f1 += m.f1;
    }
    const double k = static_cast<double>(per_class.size());
    avg.precision /= k;
    avg.recall /= k;
    avg.f1 /= k;
    return avg;
}

AverageMetrics weighted_average(const std::vector<ClassMetrics>& per_class) {
    double total_support = 0.0;
    AverageMetrics avg;
    for (const auto& m : per_class) {
        const double w = static_cast<double>(m.support);
        avg.precision += m.precision * w;
        avg.recall += m.recall * w;
        avg.f1 += m.f1 * w;
        total_support += w;
    }
    if (total_support <= 0.0) {
        throw ArgumentError("weighted_average needs a positive total support");
    }
    avg.precision /= total_support;
    avg.recall /= total_support;
    avg.f1 /= total_support;
    return avg;
}

double accuracy(const ConfusionMatrix& cm) {
    const std::int64_t total = cm.total();
    if (total < 1) {
        throw ArgumentError("accuracy needs at least one sample");
    }
    return static_cast<double>(cm.counts.trace()) / static_cast<double>(total);
}

MetricsReport metrics_report(const ConfusionMatrix& cm) {
    MetricsReport report;
    report.n = cm.total();
    report.accuracy = accuracy(cm);
    report.per_class = per_class_metrics(cm);
    report.macro = macro_average(report.per_class);
    report.weighted = weighted_average(report.per_class);
    return report;
}

nlohmann::ordered_json metrics_report_to_json(const MetricsReport& report) {
    nlohmann::ordered_json object;
    object["n"] = report.n;
    object["accuracy"] = report.accuracy;
    nlohmann::ordered_json per_class = nlohmann::ordered_json::array();
    for (const auto& m : report.per_class) {
        nlohmann::ordered_json row;
        row["label"] = std::string(label_name(m.label));
        row["precision"] = m.precision;
        row["recall"] = m.recall;
        row["f1"] = m.f1;
        row["support"] = m.support;
        if (m.undefined_precision) {
            row["undefined_precision"] = true;
        }
        per_class.push_back(std::move(row));
    }
    object["per_class"] = per_class;
    object["macro"] = {{"precision", report.macro.precision},
                       {"recall", report.macro.recall},
                       {"f1", report.macro.f1}};
    object["weighted"] = {{"precision", report.weighted.precision},
                          {"recall", report.weighted.recall},
                          {"f1", report.weighted.f1}};
    return object;
}

namespace {

std::string fixed4(double v) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(4) << v;
    return out.str();
}

}  // namespace

std::string format_metrics_report(const MetricsReport& report) {
    std::ostringstream out;
    out << std::left << std::setw(28) << "class" << std::right << std::setw(10)
        << "precision" << std::setw(8) << "recall" << std::setw(8) << "f1"
        << std::setw(9) << "support" << '\n';
    for (const auto& m : report.per_class) {
        out << std::left << std::setw(28) << label_display_name(m.label) << std::right
            << std::setw(10) << fixed4(m.precision) << std::setw(8) << fixed4(m.recall)
            << std::setw(8) << fixed4(m.f1) << std::setw(9) << m.support;
        if (m.undefined_precision) {
            out << "  (precision undefined)";
        }
        out << '\n';
    }
    out << '\n';
    out << std::left << std::setw(28) << "macro avg" << std::right << std::setw(10)
        << fixed4(report.macro.precision) << std::setw(8) << fixed4(report.macro.recall)
        << std::setw(8) << fixed4(report.macro.f1) << std::setw(9) << report.n << '\n';
    out << std::left << std::setw(28) << "weighted avg" << std::right << std::setw(10)
        << fixed4(report.weighted.precision) << std::setw(8)
        << fixed4(report.weighted.recall) << std::setw(8) << fixed4(report.weighted.f1)
        << std::setw(9) << report.n << '\n';
    out << '\n';
    out << "accuracy " << fixed4(report.accuracy) << " on " << report.n << " samples\n";
    return out.str();
}

void write_metrics_report(const MetricsReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw IoError("cannot write metrics report to " + path);
    }
    out << metrics_report_to_json(report).dump(2) << '\n';
    if (!out) {
        throw IoError("failed writing " + path);
    }
}

std::string confusion_matrix_csv(const ConfusionMatrix& cm) {
    std::ostringstream out;
    out << "actual";
    for (int c = 0; c < cm.k; ++c) {
        out << ',' << label_name(label_from_index(c));
    }
    out << '\n';
    for (int r = 0; r < cm.k; ++r) {
        out << label_name(label_from_index(r));
        for (int c = 0; c < cm.k; ++c) {
            out << ',' << cm.counts(r, c);
        }
        out << '\n';
    }
    return out.str();
}

std::string confusion_matrix_svg(const ConfusionMatrix& cm) {
    const int cell = 58;
    const int left = 190;
    const int top = 150;
    const int grid = cell * cm.k;
    const int width = left + grid + 30;
    const int height = top + grid + 60;
    const std::int64_t max_count = std::max<std::int64_t>(1, cm.counts.maxCoeff());

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' ' << height
        << "\">\n";
    out << "<style>text{font-family:Helvetica,Arial,sans-serif;font-size:12px;}"
           ".count{font-size:13px;}.axis{font-size:14px;font-weight:bold;}</style>\n";
    out << "<rect width=\"" << width << "\" height=\"" << height
        << "\" fill=\"white\"/>\n";

    for (int r = 0; r < cm.k; ++r) {
        for (int c = 0; c < cm.k; ++c) {
            const std::int64_t count = cm.counts(r, c);
            // 0 keeps the cell white; the max lands on full blue.
            const int shade = static_cast<int>((count * 200) / max_count);
            const int red = 245 - shade;
            const int green = 247 - shade / 2;
            const int x = left + c * cell;
            const int y = top + r * cell;
            out << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell
                << "\" height=\"" << cell << "\" fill=\"rgb(" << red << ',' << green
                << ",255)\" stroke=\"#cccccc\"/>\n";
            const char* text_fill = shade > 120 ? "white" : "black";
            out << "<text class=\"count\" x=\"" << x + cell / 2 << "\" y=\""
                << y + cell / 2 + 5 << "\" text-anchor=\"middle\" fill=\"" << text_fill
                << "\">" << count << "</text>\n";
        }
    }

    for (int r = 0; r < cm.k; ++r) {
        out << "<text x=\"" << left - 8 << "\" y=\"" << top + r * cell + cell / 2 + 4
            << "\" text-anchor=\"end\">" << label_display_name(label_from_index(r))
            << "</text>\n";
    }
    for (int c = 0; c < cm.k; ++c) {
        const int x = left + c * cell + cell / 2;
        const int y = top - 10;
        out << "<text x=\"" << x << "\" y=\"" << y << "\" text-anchor=\"start\" "
            << "transform=\"rotate(-45 " << x << ' ' << y << ")\">"
            << label_display_name(label_from_index(c)) << "</text>\n";
    }

    out << "<text class=\"axis\" x=\"" << left + grid / 2 << "\" y=\""
        << top + grid + 40 << "\" text-anchor=\"middle\">Predicted label</text>\n";
    out << "<text class=\"axis\" x=\"18\" y=\"" << top + grid / 2
        << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " << top + grid / 2
        << ")\">Actual label</text>\n";
    out << "</svg>\n";
    return out.str();
}

namespace {

std::string csv_sibling_path(const std::string& path) {
    const auto dot = path.find_last_of('.');
    const auto slash = path.find_last_of('/');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
        return path + ".csv";
    }
    return path.substr(0, dot) + ".csv";
}

}  // namespace

void render_confusion_matrix(const ConfusionMatrix& cm, const std::string& path) {
    std::ofstream svg_out(path, std::ios::binary | std::ios::trunc);
    if (!svg_out) {
        throw IoError("cannot write confusion matrix image to " + path);
    }
    svg_out << confusion_matrix_svg(cm);
    if (!svg_out) {
        throw IoError("failed writing " + path);
    }

    const std::string csv_path = csv_sibling_path(path);
    std::ofstream csv_out(csv_path, std::ios::binary | std::ios::trunc);
    if (!csv_out) {
        throw IoError("cannot write confusion matrix CSV to " + csv_path);
    }
    csv_out << confusion_matrix_csv(cm);
    if (!csv_out) {
        throw IoError("failed writing " + csv_path);
    }
}

EvaluationResult evaluate(const Checkpoint& ckpt, const Corpus& test) {
    if (test.empty()) {
        throw ArgumentError("evaluation corpus is empty");
    }
    std::vector<std::string> texts;
    std::vector<CLTLabel> y_true;
    texts.reserve(test.size());
    y_true.reserve(test.size());
    for (const auto& s : test.sentences) {
        texts.push_back(s.text);
        y_true.push_back(s.label);
    }
    auto predictions = predict(ckpt, texts);
    std::vector<CLTLabel> y_pred;
    y_pred.reserve(predictions.size());
    for (const auto& p : predictions) {
        y_pred.push_back(p.label);
    }
    EvaluationResult result;
    result.cm = confusion_matrix(y_true, y_pred);
    result.report = metrics_report(result.cm);
    return result;
}

}  // namespace charisma
