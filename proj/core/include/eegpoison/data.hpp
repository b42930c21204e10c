#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace eegpoison {

inline constexpr std::size_t kNumClasses = 4;
inline constexpr std::size_t kNumEegFeatures = 25;

/// Four ordered risk classes, Low < Normal < Medium < High.
enum class RiskLabel : std::uint8_t { Low = 0, Normal = 1, Medium = 2, High = 3 };

/// Canonical strings: "Low-Risk", "Normal", "Medium-Risk", "High-Risk".
const std::string& to_string(RiskLabel label);

/// Parses a label string, trimming whitespace and ignoring case.
/// Anything that does not map to one of the four classes throws
/// Error{BadLabel}; `row` is forwarded into the error for CSV context.
RiskLabel parse_risk_label(std::string_view text, long row = -1);

inline constexpr std::array<RiskLabel, kNumClasses> kAllLabels = {
    RiskLabel::Low, RiskLabel::Normal, RiskLabel::Medium, RiskLabel::High};

struct Sample {
  std::vector<double> features;
  RiskLabel label = RiskLabel::Low;

  bool operator==(const Sample&) const = default;
};

/// Immutable-by-convention collection of samples sharing one feature schema.
struct Dataset {
  std::vector<std::string> feature_names;
  std::vector<Sample> samples;

  std::size_t size() const { return samples.size(); }
  std::size_t n_features() const { return feature_names.size(); }
  std::array<std::size_t, kNumClasses> class_counts() const;

  bool operator==(const Dataset&) const = default;
};

/// The 25 canonical band-power column names, electrode-major:
/// {AF3,T7,Pz,T8,AF4} x {THETA,ALPHA,LOW_BETA,HIGH_BETA,GAMMA}.
const std::vector<std::string>& eeg_feature_names();

/// Name of the label column in CSV files.
inline constexpr const char* kLabelColumn = "RISK_LABEL";

/// Generic names f0..f{n-1} for ad-hoc datasets.
std::vector<std::string> generic_feature_names(std::size_t n);

/// Checks the shared-dimension and all-finite invariants; throws on breach.
void validate(const Dataset& ds);

/// Shortest round-trip decimal rendering, shared by every CSV writer.
std::string format_double(double value);

/// Content hash over names, labels and feature bit patterns. Invariant to
/// sample order, sensitive to any label or feature edit.
std::uint64_t dataset_fingerprint(const Dataset& ds);

// ---------------------------------------------------------------------------
// CSV I/O
// ---------------------------------------------------------------------------

/// Loads a band-power CSV. Columns are bound by header name, so any column
/// order is accepted; features are returned in canonical order. The header
/// alias "AF_ALPHA" is accepted for "AF3_ALPHA".
Dataset load_csv(const std::filesystem::path& path);

/// Canonical serialization: header in Table-layout order plus RISK_LABEL,
/// shortest round-trip formatting for doubles, '\n' line endings.
void save_csv(const Dataset& ds, const std::filesystem::path& path);
std::string to_csv(const Dataset& ds);

// ---------------------------------------------------------------------------
// Synthetic data
// ---------------------------------------------------------------------------

/// Controls the class-conditional Gaussian generator. Each class elevates
/// its own pair of coordinates, so every pair of class means is exactly
/// `separation` apart in units of the common per-feature standard
/// deviation (1.0).
struct SynthSpec {
  std::size_t per_class_count = 100;
  double separation = 6.0;
  std::uint64_t seed = 0;
};

Dataset synthesize(const SynthSpec& spec);

// ---------------------------------------------------------------------------
// Splitting
// ---------------------------------------------------------------------------

struct SplitResult {
  Dataset train;
  Dataset test;
  /// Per-class train counts, for the split log.
  std::array<std::size_t, kNumClasses> train_counts{};
  std::array<std::size_t, kNumClasses> test_counts{};
};

/// Class-stratified split. Train receives round(train_fraction * class_count)
/// per class, corrected by largest remainder so the total equals
/// round(train_fraction * n). Both partitions preserve original sample order.
/// Throws Error{DegenerateClass} if a present class has fewer than 2 samples.
SplitResult stratified_split(const Dataset& ds, double train_fraction,
                             std::uint64_t seed);

// ---------------------------------------------------------------------------
// Feature scaling
// ---------------------------------------------------------------------------

/// Per-feature z-score parameters fitted on a training set. A zero-deviation
/// feature is mapped to 0 everywhere when applied.
struct Scaler {
  std::vector<double> mean;
  std::vector<double> stdev;

  bool operator==(const Scaler&) const = default;
};

Scaler fit_scaler(const Dataset& train);
Dataset apply_scaler(const Scaler& scaler, const Dataset& ds);
void apply_scaler_inplace(const Scaler& scaler, std::vector<double>& features);

}  // namespace eegpoison
