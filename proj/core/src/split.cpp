#include <algorithm>
#include <cmath>
#include <vector>

#include "eegpoison/data.hpp"
#include "eegpoison/errors.hpp"
#include "eegpoison/rng.hpp"

namespace eegpoison {

SplitResult stratified_split(const Dataset& ds, double train_fraction,
                             std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(ErrorKind::BadConfig, "train_fraction must be in (0, 1)");
  }
  if (ds.samples.empty()) {
    throw Error(ErrorKind::EmptyInput, "cannot split an empty dataset");
  }

  std::array<std::vector<std::size_t>, kNumClasses> by_class;
  for (std::size_t i = 0; i < ds.samples.size(); ++i) {
    by_class[static_cast<std::size_t>(ds.samples[i].label)].push_back(i);
  }
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    if (by_class[c].size() == 1) {
      throw Error(ErrorKind::DegenerateClass,
                  "class " + to_string(static_cast<RiskLabel>(c)) +
                      " has fewer than 2 samples");
    }
  }

  const double n = static_cast<double>(ds.samples.size());
  const auto target_total =
      static_cast<std::size_t>(std::floor(train_fraction * n + 0.5));

  // Largest-remainder allocation: floor per class, then hand out the
  // remaining slots by descending fractional part. Present classes keep at
  // least one sample on each side.
  struct ClassAlloc {
    std::size_t index;
    std::size_t count;
    std::size_t take;
    double remainder;
  };
  std::vector<ClassAlloc> allocs;
  std::size_t allocated = 0;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const std::size_t count = by_class[c].size();
    if (count == 0) continue;
    const double exact = train_fraction * static_cast<double>(count);
    auto take = static_cast<std::size_t>(std::floor(exact));
    take = std::clamp<std::size_t>(take, 1, count - 1);
    allocs.push_back({c, count, take, exact - std::floor(exact)});
    allocated += take;
  }
  if (allocated < target_total) {
    std::vector<std::size_t> order(allocs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (allocs[a].remainder != allocs[b].remainder) {
        return allocs[a].remainder > allocs[b].remainder;
      }
      return allocs[a].index < allocs[b].index;
    });
    std::size_t deficit = target_total - allocated;
    while (deficit > 0) {
      bool progressed = false;
      for (const std::size_t i : order) {
        if (deficit == 0) break;
        if (allocs[i].take < allocs[i].count - 1) {
          allocs[i].take += 1;
          --deficit;
          progressed = true;
        }
      }
      if (!progressed) break;  // every class at its ceiling
    }
  } else if (allocated > target_total) {
    std::size_t surplus = allocated - target_total;
    while (surplus > 0) {
      bool progressed = false;
      for (auto& alloc : allocs) {
        if (surplus == 0) break;
        if (alloc.take > 1) {
          alloc.take -= 1;
          --surplus;
          progressed = true;
        }
      }
      if (!progressed) break;
    }
  }

  Rng rng(Rng::derive(seed, "split"));
  std::vector<bool> in_train(ds.samples.size(), false);
  SplitResult result;
  for (const ClassAlloc& alloc : allocs) {
    std::vector<std::size_t> indices = by_class[alloc.index];
    rng.shuffle(indices);
    for (std::size_t i = 0; i < alloc.take; ++i) in_train[indices[i]] = true;
    result.train_counts[alloc.index] = alloc.take;
    result.test_counts[alloc.index] = alloc.count - alloc.take;
  }

  result.train.feature_names = ds.feature_names;
  result.test.feature_names = ds.feature_names;
  for (std::size_t i = 0; i < ds.samples.size(); ++i) {
    (in_train[i] ? result.train : result.test).samples.push_back(ds.samples[i]);
  }
  return result;
}

}  // namespace eegpoison
