#pragma once

// Pretrained word vectors in GloVe text format with an out-of-vocabulary
// policy and lookup counters.

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hrsn/numeric.hpp"

namespace hrsn {

class EmbeddingTable {
 public:
  explicit EmbeddingTable(std::size_t dim);

  EmbeddingTable(const EmbeddingTable& other);
  EmbeddingTable& operator=(const EmbeddingTable& other);
  EmbeddingTable(EmbeddingTable&& other) noexcept;
  EmbeddingTable& operator=(EmbeddingTable&& other) noexcept;

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return vocab_.size(); }
  bool contains(std::string_view token) const;
  // Exact match only; does not touch the counters.
  const Vector* find(std::string_view token) const;
  // All stored tokens in lexicographic order.
  std::vector<std::string> tokens() const;

  // Inserts or overwrites. Returns true if the token was already present.
  bool insert(std::string token, Vector v);

  // Exact match first, then the ASCII-lowercased token. Misses return the
  // OOV vector (zeros unless replaced) and bump the OOV counter.
  const Vector& lookup(std::string_view token) const;

  const Vector& oov_vector() const { return oov_; }
  void set_oov_vector(Vector v);

  std::size_t lookup_count() const { return lookups_.load(std::memory_order_relaxed); }
  std::size_t oov_count() const { return oovs_.load(std::memory_order_relaxed); }
  // oov_count / lookup_count, or 0 before any lookup.
  double oov_rate() const;
  void reset_counters() const;

  // Number of duplicate token lines seen by load_embeddings (last one wins).
  std::size_t duplicates() const { return duplicates_; }

  friend EmbeddingTable load_embeddings(std::istream& in, std::size_t expected_dim);

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const {
      return std::hash<std::string_view>{}(s);
    }
  };

  std::size_t dim_;
  std::unordered_map<std::string, Vector, Hash, std::equal_to<>> vocab_;
  Vector oov_;
  std::size_t duplicates_ = 0;
  mutable std::atomic<std::size_t> lookups_{0};
  mutable std::atomic<std::size_t> oovs_{0};
};

// Parses `token v_1 ... v_D` lines. Throws FormatError naming the line on a
// wrong value count or an unparseable number, and on an empty input.
EmbeddingTable load_embeddings(std::istream& in, std::size_t expected_dim);
EmbeddingTable load_embeddings(const std::filesystem::path& path,
                               std::size_t expected_dim);

// Writes the table in the same text format, tokens sorted.
void save_embeddings(const EmbeddingTable& table, std::ostream& out);

}  // namespace hrsn
