#include "hrsn/metrics.hpp"

#include <cmath>

#include "hrsn/error.hpp"

namespace hrsn {

void ConfusionCounts::add(int label, Decision decision) {
  const bool predicted_same = decision == Decision::kSameAuthor;
  if (label == 1) {
    ++(predicted_same ? tp : fn);
  } else {
    ++(predicted_same ? fp : tn);
  }
}

Metrics confusion_metrics(const ConfusionCounts& c) {
  if (c.total() == 0) throw Error("confusion_metrics: no evaluated pairs");
  Metrics m;
  const auto ratio = [](std::size_t num, std::size_t den, bool& undefined) {
    if (den == 0) {
      undefined = true;
      return 0.0;
    }
    return static_cast<double>(num) / static_cast<double>(den);
  };
  m.precision = ratio(c.tp, c.tp + c.fp, m.precision_undefined);
  m.recall = ratio(c.tp, c.tp + c.fn, m.recall_undefined);
  if (m.precision + m.recall == 0.0) {
    m.f1_undefined = true;
    m.f1 = 0.0;
  } else {
    // Same as 2PR/(P+R) with a single rounding.
    m.f1 = static_cast<double>(2 * c.tp) / static_cast<double>(2 * c.tp + c.fp + c.fn);
  }
  m.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
  return m;
}

MeanStd mean_and_sample_std(std::span<const double> values) {
  if (values.empty()) throw Error("mean_and_sample_std: no values");
  MeanStd out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double sq = 0.0;
    for (double v : values) sq += (v - out.mean) * (v - out.mean);
    out.stddev = std::sqrt(sq / static_cast<double>(values.size() - 1));
  }
  return out;
}

}  // namespace hrsn
