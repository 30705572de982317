#pragma once

// Trained model container. Stored as JSON (docs/formats.md):
//
//   {"format": "hrsn-checkpoint", "version": 1,
//    "config": {"word_dim": .., "sentence_dim": .., "document_dim": ..,
//               "max_words": .., "max_sentences": .., "tau1": .., "tau2": ..},
//    "tensors": [{"name": "sentence.W_f", "shape": [r, c], "data": [...]}, ...]}
//
// Doubles are written with round-trip precision, so save/load is value-exact.

#include <cstddef>
#include <filesystem>
#include <iosfwd>

#include <nlohmann/json.hpp>

#include "hrsn/encoder.hpp"
#include "hrsn/siamese.hpp"

namespace hrsn {

struct TrainConfig;

struct ModelConfig {
  EncoderDims dims;
  std::size_t max_words = 33;
  std::size_t max_sentences = 123;
  Thresholds thresholds;

  static ModelConfig from(const TrainConfig& config);
};

struct Model {
  ModelConfig config;
  EncoderParams params;
};

nlohmann::json checkpoint_to_json(const Model& model);
Model checkpoint_from_json(const nlohmann::json& j);

void save_checkpoint(const Model& model, std::ostream& out);
void save_checkpoint(const Model& model, const std::filesystem::path& path);
Model load_checkpoint(std::istream& in);
Model load_checkpoint(const std::filesystem::path& path);

}  // namespace hrsn
