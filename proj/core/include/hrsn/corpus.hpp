#pragma once

// Verification instances and the JSONL corpus format:
//   {"known": ["...", ...], "unknown": "...", "label": 0|1}

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace hrsn {

struct VerificationInstance {
  std::vector<std::string> known_docs;
  std::string unknown_doc;
  int label = 0;  // 1 = same author, 0 = different authors

  // Throws FormatError if known_docs is empty or label is not 0/1.
  void validate() const;

  friend bool operator==(const VerificationInstance&,
                         const VerificationInstance&) = default;
};

using Corpus = std::vector<VerificationInstance>;

// Joins the known documents in the given order with a single '\n'. `order`
// must be a permutation of [0, known_docs.size()).
std::string concatenate_known(const VerificationInstance& instance,
                              std::span<const std::size_t> order);
// Identity order.
std::string concatenate_known(const VerificationInstance& instance);

std::string to_jsonl(const VerificationInstance& instance);
VerificationInstance instance_from_jsonl(const std::string& line,
                                         std::size_t line_no = 0);

Corpus load_corpus(std::istream& in);
Corpus load_corpus(const std::filesystem::path& path);
void save_corpus(const Corpus& corpus, std::ostream& out);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

}  // namespace hrsn
