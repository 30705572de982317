#pragma once

#include <cstddef>
#include <span>

#include "hrsn/siamese.hpp"

namespace hrsn {

// Positive class: same author (label 1).
struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
  void add(int label, Decision decision);

  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

// Fractions in [0, 1]. A 0/0 ratio is reported as 0 and flagged.
struct Metrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double accuracy = 0.0;
  bool precision_undefined = false;
  bool recall_undefined = false;
  bool f1_undefined = false;
};

// Throws Error when counts.total() == 0.
Metrics confusion_metrics(const ConfusionCounts& counts);

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;  // sample (n - 1) standard deviation; 0 for n == 1
};

MeanStd mean_and_sample_std(std::span<const double> values);

}  // namespace hrsn
