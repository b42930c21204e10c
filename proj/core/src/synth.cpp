#include <cmath>

#include "eegpoison/data.hpp"
#include "eegpoison/errors.hpp"
#include "eegpoison/rng.hpp"

namespace eegpoison {

// Class c raises its two dedicated coordinates (2c and 2c+1) by
// separation/2: any two class means differ on four coordinates, so all
// pairwise mean distances are exactly `separation` while every feature keeps
// unit standard deviation. Two elevated coordinates per class also mean no
// class hinges on a single feature.
Dataset synthesize(const SynthSpec& spec) {
  if (spec.per_class_count < 1) {
    throw Error(ErrorKind::BadConfig, "per_class_count must be >= 1");
  }
  if (!(spec.separation >= 0.0)) {
    throw Error(ErrorKind::BadConfig, "separation must be >= 0");
  }

  const double offset = spec.separation / 2.0;
  Rng rng(Rng::derive(spec.seed, "synth"));

  Dataset ds;
  ds.feature_names = eeg_feature_names();
  ds.samples.reserve(kNumClasses * spec.per_class_count);
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    for (std::size_t i = 0; i < spec.per_class_count; ++i) {
      Sample sample;
      sample.label = static_cast<RiskLabel>(c);
      sample.features.resize(kNumEegFeatures);
      for (std::size_t j = 0; j < kNumEegFeatures; ++j) {
        const bool elevated = j == 2 * c || j == 2 * c + 1;
        sample.features[j] = rng.normal() + (elevated ? offset : 0.0);
      }
      ds.samples.push_back(std::move(sample));
    }
  }
  return ds;
}

}  // namespace eegpoison
