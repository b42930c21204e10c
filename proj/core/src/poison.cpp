#include "eegpoison/poison.hpp"

#include <algorithm>
#include <cmath>

#include "eegpoison/errors.hpp"
#include "eegpoison/rng.hpp"
#include "json.hpp"

namespace eegpoison {

RiskLabel next_level_map(RiskLabel label) {
  switch (label) {
    case RiskLabel::Low: return RiskLabel::Normal;
    case RiskLabel::Normal: return RiskLabel::Medium;
    case RiskLabel::Medium: return RiskLabel::High;
    case RiskLabel::High: return RiskLabel::Low;
  }
  throw Error(ErrorKind::Internal, "invalid label value");
}

RiskLabel PoisonScenario::image(RiskLabel label) const {
  return kind == Kind::ToTarget ? target : next_level_map(label);
}

std::string PoisonScenario::tag() const {
  return kind == Kind::ToTarget ? "to_target(" + to_string(target) + ")"
                                : "next_level";
}

PoisonScenario PoisonScenario::parse(std::string_view text) {
  if (text == "next_level") return next_level();
  if (text == "to_target") return to_target();
  constexpr std::string_view prefix = "to_target(";
  if (text.size() > prefix.size() + 1 && text.substr(0, prefix.size()) == prefix &&
      text.back() == ')') {
    const auto inner = text.substr(prefix.size(),
                                   text.size() - prefix.size() - 1);
    return to_target(parse_risk_label(inner));
  }
  throw Error(ErrorKind::BadConfig,
              "unknown scenario \"" + std::string(text) +
                  "\" (expected to_target, to_target(<label>) or next_level)");
}

FlipPlan plan_flips(const Dataset& train, const PoisonSpec& spec) {
  if (train.samples.empty()) {
    throw Error(ErrorKind::EmptyInput, "cannot poison an empty training set");
  }
  if (!(spec.rate >= 0.0 && spec.rate <= 1.0)) {
    throw Error(ErrorKind::BadConfig, "poison rate must be in [0, 1]");
  }

  const double n = static_cast<double>(train.samples.size());
  // +1e-9 absorbs binary representation noise in rate * n (e.g. 0.7 * 10).
  const auto requested =
      static_cast<std::size_t>(std::floor(spec.rate * n + 1e-9));

  // Eligible pool: samples whose label the scenario would actually change.
  std::vector<std::size_t> pool;
  pool.reserve(train.samples.size());
  for (std::size_t i = 0; i < train.samples.size(); ++i) {
    const RiskLabel label = train.samples[i].label;
    if (spec.scenario.image(label) != label) pool.push_back(i);
  }

  // One ranking per (seed, scenario); rate only picks the prefix length, so
  // victim sets are nested across rates.
  Rng rng(Rng::derive(spec.seed, "poison/" + spec.scenario.tag()));
  rng.shuffle(pool);

  FlipPlan plan;
  plan.log.requested_count = requested;
  plan.log.clamped = requested > pool.size();
  const std::size_t actual = std::min(requested, pool.size());
  plan.victims.assign(pool.begin(), pool.begin() + actual);

  std::vector<std::size_t> ordered = plan.victims;
  std::sort(ordered.begin(), ordered.end());
  plan.log.entries.reserve(ordered.size());
  for (const std::size_t idx : ordered) {
    const RiskLabel old_label = train.samples[idx].label;
    plan.log.entries.push_back({idx, old_label, spec.scenario.image(old_label)});
  }
  return plan;
}

std::pair<Dataset, FlipLog> apply_poison(const Dataset& train,
                                         const PoisonSpec& spec) {
  FlipPlan plan = plan_flips(train, spec);
  Dataset poisoned = train;
  for (const FlipEntry& entry : plan.log.entries) {
    poisoned.samples[entry.index].label = entry.new_label;
  }
  return {std::move(poisoned), std::move(plan.log)};
}

std::string fliplog_to_csv(const FlipLog& log) {
  std::string out = "index,old_label,new_label\n";
  for (const FlipEntry& entry : log.entries) {
    out += std::to_string(entry.index);
    out += ',';
    out += to_string(entry.old_label);
    out += ',';
    out += to_string(entry.new_label);
    out += '\n';
  }
  return out;
}

std::string fliplog_summary_json(const FlipLog& log, const PoisonSpec& spec) {
  nlohmann::json doc;
  doc["requested"] = log.requested_count;
  doc["actual"] = log.actual_count();
  doc["clamped"] = log.clamped;
  doc["scenario"] = spec.scenario.tag();
  doc["rate"] = spec.rate;
  doc["seed"] = spec.seed;
  return doc.dump(2) + "\n";
}

}  // namespace eegpoison
