#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "eegpoison/data.hpp"

namespace eegpoison {

/// 4x4 confusion counts, rows = true label, columns = predicted label,
/// both in order Low, Normal, Medium, High.
struct ConfusionMatrix {
  std::array<std::array<std::int64_t, kNumClasses>, kNumClasses> counts{};

  std::int64_t total() const;
  std::int64_t row_sum(std::size_t row) const;
  std::int64_t col_sum(std::size_t col) const;

  bool operator==(const ConfusionMatrix&) const = default;
};

ConfusionMatrix confusion(const std::vector<RiskLabel>& y_true,
                          const std::vector<RiskLabel>& y_pred);

/// Accuracy plus macro-averaged precision/recall/F1 with the zero-division
/// convention: a per-class value whose denominator is 0 contributes 0.
struct MetricsReport {
  double accuracy = 0.0;
  double macro_recall = 0.0;
  double macro_precision = 0.0;
  double macro_f1 = 0.0;
  std::array<double, kNumClasses> per_class_precision{};
  std::array<double, kNumClasses> per_class_recall{};
  std::array<double, kNumClasses> per_class_f1{};
  std::int64_t n_evaluated = 0;

  bool operator==(const MetricsReport&) const = default;
};

MetricsReport summarize(const ConfusionMatrix& cm);

/// JSON document with the four macro metrics, per-class vectors and the
/// full confusion matrix.
std::string metrics_to_json(const MetricsReport& report,
                            const ConfusionMatrix& cm);

/// Formats a fraction as a percentage rounded half-up, e.g. 0.241935 with
/// 2 decimals -> "24.19". Used everywhere percentages are rendered so the
/// rounding rule is uniform.
std::string format_percent(double fraction, int decimals);

}  // namespace eegpoison
