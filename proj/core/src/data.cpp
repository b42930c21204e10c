#include "eegpoison/data.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <sstream>

#include "eegpoison/errors.hpp"

namespace eegpoison {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Io: return "io";
    case ErrorKind::EmptyFile: return "empty_file";
    case ErrorKind::MissingColumn: return "missing_column";
    case ErrorKind::BadLabel: return "bad_label";
    case ErrorKind::BadNumber: return "bad_number";
    case ErrorKind::BadRow: return "bad_row";
    case ErrorKind::DegenerateClass: return "degenerate_class";
    case ErrorKind::LengthMismatch: return "length_mismatch";
    case ErrorKind::EmptyInput: return "empty_input";
    case ErrorKind::DimensionMismatch: return "dimension_mismatch";
    case ErrorKind::EmptyTrainingSet: return "empty_training_set";
    case ErrorKind::AllZero: return "all_zero";
    case ErrorKind::BadConfig: return "bad_config";
    case ErrorKind::BadFlag: return "bad_flag";
    case ErrorKind::MissingResults: return "missing_results";
    case ErrorKind::Timeout: return "timeout";
    case ErrorKind::Internal: return "internal";
  }
  return "unknown";
}

ErrorCategory category(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::BadConfig:
    case ErrorKind::BadFlag:
      return ErrorCategory::Usage;
    case ErrorKind::Io:
    case ErrorKind::EmptyFile:
    case ErrorKind::MissingColumn:
    case ErrorKind::BadLabel:
    case ErrorKind::BadNumber:
    case ErrorKind::BadRow:
    case ErrorKind::DegenerateClass:
    case ErrorKind::MissingResults:
      return ErrorCategory::Data;
    default:
      return ErrorCategory::Runtime;
  }
}

Error::Error(ErrorKind kind, const std::string& message, long row,
             std::string column)
    : std::runtime_error(message), kind_(kind), row_(row),
      column_(std::move(column)) {}

// ---------------------------------------------------------------------------
// Labels
// ---------------------------------------------------------------------------

const std::string& to_string(RiskLabel label) {
  static const std::string names[kNumClasses] = {"Low-Risk", "Normal",
                                                 "Medium-Risk", "High-Risk"};
  return names[static_cast<std::size_t>(label)];
}

namespace {

std::string trim_and_lower(std::string_view text) {
  std::size_t begin = 0;
  std::size_t end = text.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) {
    ++begin;
  }
  while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) {
    --end;
  }
  std::string out(text.substr(begin, end - begin));
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

}  // namespace

RiskLabel parse_risk_label(std::string_view text, long row) {
  const std::string key = trim_and_lower(text);
  for (const RiskLabel label : kAllLabels) {
    if (key == trim_and_lower(to_string(label))) return label;
  }
  std::ostringstream msg;
  msg << "unmappable label \"" << std::string(text) << "\"";
  if (row >= 0) msg << " on row " << row;
  throw Error(ErrorKind::BadLabel, msg.str(), row);
}

// ---------------------------------------------------------------------------
// Dataset
// ---------------------------------------------------------------------------

std::array<std::size_t, kNumClasses> Dataset::class_counts() const {
  std::array<std::size_t, kNumClasses> counts{};
  for (const Sample& s : samples) {
    counts[static_cast<std::size_t>(s.label)] += 1;
  }
  return counts;
}

const std::vector<std::string>& eeg_feature_names() {
  static const std::vector<std::string> names = [] {
    const char* electrodes[] = {"AF3", "T7", "Pz", "T8", "AF4"};
    const char* bands[] = {"THETA", "ALPHA", "LOW_BETA", "HIGH_BETA", "GAMMA"};
    std::vector<std::string> out;
    out.reserve(kNumEegFeatures);
    for (const char* e : electrodes) {
      for (const char* b : bands) {
        out.push_back(std::string(e) + "_" + b);
      }
    }
    return out;
  }();
  return names;
}

std::vector<std::string> generic_feature_names(std::size_t n) {
  std::vector<std::string> names;
  names.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    names.push_back("f" + std::to_string(i));
  }
  return names;
}

void validate(const Dataset& ds) {
  const std::size_t dim = ds.feature_names.size();
  for (std::size_t i = 0; i < ds.samples.size(); ++i) {
    const Sample& s = ds.samples[i];
    if (s.features.size() != dim) {
      throw Error(ErrorKind::DimensionMismatch,
                  "sample " + std::to_string(i) + " has " +
                      std::to_string(s.features.size()) + " features, expected " +
                      std::to_string(dim));
    }
    for (std::size_t j = 0; j < s.features.size(); ++j) {
      if (!std::isfinite(s.features[j])) {
        throw Error(ErrorKind::BadNumber,
                    "non-finite feature in sample " + std::to_string(i),
                    static_cast<long>(i), ds.feature_names[j]);
      }
    }
  }
}

std::uint64_t dataset_fingerprint(const Dataset& ds) {
  constexpr std::uint64_t kFnvOffset = 0xCBF29CE484222325ULL;
  constexpr std::uint64_t kFnvPrime = 0x100000001B3ULL;
  const auto mix_byte = [](std::uint64_t h, unsigned char byte) {
    return (h ^ byte) * kFnvPrime;
  };
  const auto mix_u64 = [&](std::uint64_t h, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h = mix_byte(h, static_cast<unsigned char>(v >> (8 * i)));
    }
    return h;
  };

  std::uint64_t header = kFnvOffset;
  header = mix_u64(header, ds.samples.size());
  header = mix_u64(header, ds.feature_names.size());
  for (const std::string& name : ds.feature_names) {
    for (const char c : name) {
      header = mix_byte(header, static_cast<unsigned char>(c));
    }
    header = mix_byte(header, 0);
  }

  // Per-sample hashes combine by wrapping addition, so the result is
  // invariant to sample order but still moves on any label or feature edit.
  std::uint64_t acc = 0;
  for (const Sample& s : ds.samples) {
    std::uint64_t sh = kFnvOffset;
    sh = mix_byte(sh, static_cast<unsigned char>(s.label));
    for (const double v : s.features) {
      sh = mix_u64(sh, std::bit_cast<std::uint64_t>(v));
    }
    acc += sh * 0x9E3779B97F4A7C15ULL;
  }
  return header ^ acc;
}

// ---------------------------------------------------------------------------
// Scaler
// ---------------------------------------------------------------------------

Scaler fit_scaler(const Dataset& train) {
  if (train.samples.empty()) {
    throw Error(ErrorKind::EmptyTrainingSet, "cannot fit scaler on empty set");
  }
  const std::size_t dim = train.n_features();
  const double n = static_cast<double>(train.size());
  Scaler scaler;
  scaler.mean.assign(dim, 0.0);
  scaler.stdev.assign(dim, 0.0);
  for (const Sample& s : train.samples) {
    for (std::size_t j = 0; j < dim; ++j) scaler.mean[j] += s.features[j];
  }
  for (std::size_t j = 0; j < dim; ++j) scaler.mean[j] /= n;
  for (const Sample& s : train.samples) {
    for (std::size_t j = 0; j < dim; ++j) {
      const double d = s.features[j] - scaler.mean[j];
      scaler.stdev[j] += d * d;
    }
  }
  for (std::size_t j = 0; j < dim; ++j) {
    scaler.stdev[j] = std::sqrt(scaler.stdev[j] / n);
  }
  return scaler;
}

void apply_scaler_inplace(const Scaler& scaler, std::vector<double>& features) {
  for (std::size_t j = 0; j < features.size(); ++j) {
    // Zero-deviation feature: the column carries no information, map to 0.
    features[j] = scaler.stdev[j] > 0.0
                      ? (features[j] - scaler.mean[j]) / scaler.stdev[j]
                      : 0.0;
  }
}

Dataset apply_scaler(const Scaler& scaler, const Dataset& ds) {
  if (scaler.mean.size() != ds.n_features()) {
    throw Error(ErrorKind::DimensionMismatch,
                "scaler fitted on " + std::to_string(scaler.mean.size()) +
                    " features, dataset has " + std::to_string(ds.n_features()));
  }
  Dataset out = ds;
  for (Sample& s : out.samples) {
    apply_scaler_inplace(scaler, s.features);
  }
  return out;
}

}  // namespace eegpoison
