#include "eegpoison/metrics.hpp"

#include <cmath>
#include <cstdio>

#include "eegpoison/errors.hpp"
#include "json.hpp"

namespace eegpoison {

std::int64_t ConfusionMatrix::total() const {
  std::int64_t sum = 0;
  for (const auto& row : counts) {
    for (const auto cell : row) sum += cell;
  }
  return sum;
}

std::int64_t ConfusionMatrix::row_sum(std::size_t row) const {
  std::int64_t sum = 0;
  for (const auto cell : counts[row]) sum += cell;
  return sum;
}

std::int64_t ConfusionMatrix::col_sum(std::size_t col) const {
  std::int64_t sum = 0;
  for (const auto& row : counts) sum += row[col];
  return sum;
}

ConfusionMatrix confusion(const std::vector<RiskLabel>& y_true,
                          const std::vector<RiskLabel>& y_pred) {
  if (y_true.size() != y_pred.size()) {
    throw Error(ErrorKind::LengthMismatch,
                "y_true has " + std::to_string(y_true.size()) +
                    " entries, y_pred has " + std::to_string(y_pred.size()));
  }
  if (y_true.empty()) {
    throw Error(ErrorKind::EmptyInput, "cannot build confusion matrix of nothing");
  }
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    cm.counts[static_cast<std::size_t>(y_true[i])]
             [static_cast<std::size_t>(y_pred[i])] += 1;
  }
  return cm;
}

MetricsReport summarize(const ConfusionMatrix& cm) {
  const std::int64_t total = cm.total();
  if (total <= 0) {
    throw Error(ErrorKind::EmptyInput, "empty confusion matrix");
  }

  MetricsReport report;
  report.n_evaluated = total;

  std::int64_t trace = 0;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const std::int64_t tp = cm.counts[c][c];
    const std::int64_t support = cm.row_sum(c);
    const std::int64_t predicted = cm.col_sum(c);
    trace += tp;

    // Zero-division convention: absent class or never-predicted class
    // contributes 0 to the macro average.
    const double recall =
        support > 0 ? static_cast<double>(tp) / static_cast<double>(support) : 0.0;
    const double precision =
        predicted > 0 ? static_cast<double>(tp) / static_cast<double>(predicted)
                      : 0.0;
    const double f1 = precision + recall > 0.0
                          ? 2.0 * precision * recall / (precision + recall)
                          : 0.0;
    report.per_class_recall[c] = recall;
    report.per_class_precision[c] = precision;
    report.per_class_f1[c] = f1;
    report.macro_recall += recall;
    report.macro_precision += precision;
    report.macro_f1 += f1;
  }
  report.macro_recall /= static_cast<double>(kNumClasses);
  report.macro_precision /= static_cast<double>(kNumClasses);
  report.macro_f1 /= static_cast<double>(kNumClasses);
  report.accuracy = static_cast<double>(trace) / static_cast<double>(total);
  return report;
}

std::string metrics_to_json(const MetricsReport& report,
                            const ConfusionMatrix& cm) {
  nlohmann::json doc;
  doc["accuracy"] = report.accuracy;
  doc["macro_recall"] = report.macro_recall;
  doc["macro_precision"] = report.macro_precision;
  doc["macro_f1"] = report.macro_f1;
  doc["per_class"] = {
      {"precision", report.per_class_precision},
      {"recall", report.per_class_recall},
      {"f1", report.per_class_f1},
  };
  doc["n_evaluated"] = report.n_evaluated;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : cm.counts) {
    rows.push_back(row);
  }
  doc["confusion"] = rows;
  doc["labels"] = {to_string(RiskLabel::Low), to_string(RiskLabel::Normal),
                   to_string(RiskLabel::Medium), to_string(RiskLabel::High)};
  return doc.dump(2) + "\n";
}

std::string format_percent(double fraction, int decimals) {
  const double scale = std::pow(10.0, decimals);
  const double value = fraction * 100.0;
  const double rounded = std::floor(value * scale + 0.5) / scale;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, rounded);
  return buf;
}

}  // namespace eegpoison
