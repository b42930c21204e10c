#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eegpoison/data.hpp"

namespace eegpoison {

/// Fixed next-level permutation: Low->Normal->Medium->High->Low.
RiskLabel next_level_map(RiskLabel label);

/// The two label-flipping attacks. ToTarget relabels selected non-target
/// samples to `target`; NextLevel applies the 4-cycle permutation.
struct PoisonScenario {
  enum class Kind { ToTarget, NextLevel };

  Kind kind = Kind::ToTarget;
  RiskLabel target = RiskLabel::High;  // meaningful for ToTarget only

  static PoisonScenario to_target(RiskLabel target = RiskLabel::High) {
    return {Kind::ToTarget, target};
  }
  static PoisonScenario next_level() {
    return {Kind::NextLevel, RiskLabel::High};
  }

  /// Where a label is sent by this scenario.
  RiskLabel image(RiskLabel label) const;

  /// Canonical tag: "to_target(High-Risk)" or "next_level".
  std::string tag() const;

  /// Parses "to_target", "to_target(<label>)" or "next_level".
  static PoisonScenario parse(std::string_view text);

  bool operator==(const PoisonScenario&) const = default;
};

/// Fully determines a flip plan for a given training set.
struct PoisonSpec {
  PoisonScenario scenario;
  double rate = 0.0;  // in [0, 1], fraction of the whole training set
  std::uint64_t seed = 0;
};

struct FlipEntry {
  std::size_t index = 0;
  RiskLabel old_label = RiskLabel::Low;
  RiskLabel new_label = RiskLabel::Low;

  bool operator==(const FlipEntry&) const = default;
};

/// Audit trail of one poisoning pass. Entries are sorted by sample index.
struct FlipLog {
  std::vector<FlipEntry> entries;
  std::size_t requested_count = 0;
  bool clamped = false;

  std::size_t actual_count() const { return entries.size(); }

  bool operator==(const FlipLog&) const = default;
};

struct FlipPlan {
  /// Victim indices in ranking order (a prefix of the seed-determined
  /// ranking of the eligible pool, so victim sets are nested across rates).
  std::vector<std::size_t> victims;
  FlipLog log;
};

/// Selects floor(rate * |train|) victims uniformly without replacement from
/// the eligible pool (samples whose label the scenario would change). If the
/// request exceeds the pool, the whole pool is taken and `clamped` is set.
FlipPlan plan_flips(const Dataset& train, const PoisonSpec& spec);

/// Applies the plan: labels of victims are replaced by the scenario image,
/// features and sample order are untouched.
std::pair<Dataset, FlipLog> apply_poison(const Dataset& train,
                                         const PoisonSpec& spec);

/// "index,old_label,new_label" rows.
std::string fliplog_to_csv(const FlipLog& log);

/// JSON summary: requested, actual, clamped, scenario, rate, seed.
std::string fliplog_summary_json(const FlipLog& log, const PoisonSpec& spec);

}  // namespace eegpoison
