#pragma once

// Synthetic authorship corpus: each author is a Zipf distribution over a
// private random ranking of a shared vocabulary, and every token has a random
// embedding. Used by the end-to-end acceptance experiment.

#include <cstddef>
#include <string>
#include <vector>

#include "hrsn/corpus.hpp"
#include "hrsn/embeddings.hpp"

namespace hrsn {

class Rng;

struct SyntheticConfig {
  std::size_t authors = 40;
  std::size_t vocab = 200;
  std::size_t embedding_dim = 20;
  std::size_t instances = 800;  // labels alternate 1, 0, 1, ... before shuffling
  std::size_t min_sentences = 5;
  std::size_t max_sentences = 15;
  std::size_t min_words = 4;
  std::size_t max_words = 12;
  std::size_t max_known_docs = 3;
  // Steep enough that an author's top few tokens dominate every sentence.
  double zipf_exponent = 3.0;

  void validate() const;
};

struct SyntheticCorpus {
  Corpus corpus;
  EmbeddingTable embeddings{0};
  std::vector<std::size_t> known_author;
  std::vector<std::size_t> unknown_author;
};

std::string synthetic_token(std::size_t index);

SyntheticCorpus generate_synthetic(const SyntheticConfig& config, Rng& rng);

}  // namespace hrsn
