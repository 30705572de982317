#pragma once

// Raw text to padded encoder input.
//
// Pipeline: normalize_text -> segment_sentences -> tokenize -> embedding
// lookup -> truncate/pad to (max_sentences, max_words). The exact patterns
// are listed in docs/preprocessing.md and must stay in sync with text.cpp.

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hrsn/embeddings.hpp"
#include "hrsn/numeric.hpp"

namespace hrsn {

inline constexpr std::string_view kUrlToken = "<url>";
inline constexpr std::string_view kEmailToken = "<email>";
inline constexpr std::string_view kPhoneToken = "<phone>";

// Replaces URLs, e-mail addresses and phone numbers by universal tokens.
// Idempotent.
std::string normalize_text(std::string_view raw);

// Rule-based sentence splitter. Sentences are returned trimmed; their
// concatenation equals the input modulo whitespace.
std::vector<std::string> segment_sentences(std::string_view text);

// Words, punctuation runs and universal tokens; never empty, never contain
// whitespace.
std::vector<std::string> tokenize(std::string_view sentence);

// Abbreviations that do not end a sentence (lowercase, without final dot).
std::span<const std::string_view> abbreviation_stop_list();

// Padded tensor [max_sentences x max_words x dim] plus true lengths.
// Padded slots are always exactly zero.
class EncodedDocument {
 public:
  EncodedDocument(std::size_t max_sentences, std::size_t max_words, std::size_t dim);

  std::size_t max_sentences() const { return max_sentences_; }
  std::size_t max_words() const { return max_words_; }
  std::size_t dim() const { return dim_; }
  std::size_t num_sentences() const { return lengths_.size(); }
  const std::vector<std::size_t>& sentence_lengths() const { return lengths_; }

  // Appends a sentence, keeping its first max_words words. Returns false
  // (and stores nothing) once max_sentences sentences are present. Empty
  // sentences are rejected with ShapeError.
  bool add_sentence(std::span<const std::span<const double>> words);

  // Flat [max_words x dim] block of sentence n.
  std::span<const double> sentence(std::size_t n) const;
  std::span<const double> word(std::size_t n, std::size_t t) const;
  std::span<const double> values() const { return data_; }

  // Same content under different padding bounds. New bounds must hold the
  // true lengths.
  EncodedDocument with_bounds(std::size_t max_sentences, std::size_t max_words) const;

 private:
  std::size_t max_sentences_;
  std::size_t max_words_;
  std::size_t dim_;
  std::vector<std::size_t> lengths_;
  std::vector<double> data_;
};

// Full preprocessing of one document. Throws Error("empty document") if no
// token survives normalization and segmentation.
EncodedDocument encode_text(std::string_view text, const EmbeddingTable& table,
                            std::size_t max_words, std::size_t max_sentences);

// Normalized, segmented, tokenized and truncated text (what encode_text
// looks up).
std::vector<std::vector<std::string>> tokenize_document(std::string_view text,
                                                        std::size_t max_words,
                                                        std::size_t max_sentences);

}  // namespace hrsn
