#include "hrsn/embeddings.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <vector>

namespace hrsn {
namespace {

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& ch : out) {
    if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
  }
  return out;
}

// Shortest round-trip representation of a double.
std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

EmbeddingTable::EmbeddingTable(std::size_t dim) : dim_(dim), oov_(dim) {}

EmbeddingTable::EmbeddingTable(const EmbeddingTable& other)
    : dim_(other.dim_),
      vocab_(other.vocab_),
      oov_(other.oov_),
      duplicates_(other.duplicates_),
      lookups_(other.lookup_count()),
      oovs_(other.oov_count()) {}

EmbeddingTable& EmbeddingTable::operator=(const EmbeddingTable& other) {
  if (this != &other) {
    dim_ = other.dim_;
    vocab_ = other.vocab_;
    oov_ = other.oov_;
    duplicates_ = other.duplicates_;
    lookups_.store(other.lookup_count());
    oovs_.store(other.oov_count());
  }
  return *this;
}

EmbeddingTable::EmbeddingTable(EmbeddingTable&& other) noexcept
    : dim_(other.dim_),
      vocab_(std::move(other.vocab_)),
      oov_(std::move(other.oov_)),
      duplicates_(other.duplicates_),
      lookups_(other.lookup_count()),
      oovs_(other.oov_count()) {}

EmbeddingTable& EmbeddingTable::operator=(EmbeddingTable&& other) noexcept {
  dim_ = other.dim_;
  vocab_ = std::move(other.vocab_);
  oov_ = std::move(other.oov_);
  duplicates_ = other.duplicates_;
  lookups_.store(other.lookup_count());
  oovs_.store(other.oov_count());
  return *this;
}

bool EmbeddingTable::contains(std::string_view token) const {
  return vocab_.find(token) != vocab_.end();
}

const Vector* EmbeddingTable::find(std::string_view token) const {
  auto it = vocab_.find(token);
  return it == vocab_.end() ? nullptr : &it->second;
}

std::vector<std::string> EmbeddingTable::tokens() const {
  std::vector<std::string> out;
  out.reserve(vocab_.size());
  for (const auto& [token, v] : vocab_) out.push_back(token);
  std::sort(out.begin(), out.end());
  return out;
}

bool EmbeddingTable::insert(std::string token, Vector v) {
  if (v.dim() != dim_) {
    throw ShapeError("embedding for '" + token + "' has dim " +
                     std::to_string(v.dim()) + ", table dim is " +
                     std::to_string(dim_));
  }
  auto [it, inserted] = vocab_.insert_or_assign(std::move(token), std::move(v));
  return !inserted;
}

const Vector& EmbeddingTable::lookup(std::string_view token) const {
  lookups_.fetch_add(1, std::memory_order_relaxed);
  if (auto it = vocab_.find(token); it != vocab_.end()) return it->second;
  if (auto it = vocab_.find(ascii_lower(token)); it != vocab_.end()) return it->second;
  oovs_.fetch_add(1, std::memory_order_relaxed);
  return oov_;
}

void EmbeddingTable::set_oov_vector(Vector v) {
  if (v.dim() != dim_) throw ShapeError("OOV vector dim does not match table dim");
  oov_ = std::move(v);
}

double EmbeddingTable::oov_rate() const {
  const std::size_t n = lookup_count();
  return n == 0 ? 0.0 : static_cast<double>(oov_count()) / static_cast<double>(n);
}

void EmbeddingTable::reset_counters() const {
  lookups_.store(0);
  oovs_.store(0);
}

EmbeddingTable load_embeddings(std::istream& in, std::size_t expected_dim) {
  EmbeddingTable table(expected_dim);
  std::string line;
  std::size_t line_no = 0;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    const std::size_t space = line.find(' ');
    const std::string_view rest =
        space == std::string::npos ? std::string_view{}
                                   : std::string_view(line).substr(space + 1);
    std::string token = line.substr(0, space);

    values.clear();
    const char* p = rest.data();
    const char* end = rest.data() + rest.size();
    while (p < end) {
      while (p < end && *p == ' ') ++p;
      if (p == end) break;
      double v = 0.0;
      auto [next, ec] = std::from_chars(p, end, v);
      if (ec != std::errc() || (next != end && *next != ' ')) {
        const char* tok_end = std::find(p, end, ' ');
        throw FormatError("unparseable number '" + std::string(p, tok_end) +
                          "' at line " + std::to_string(line_no));
      }
      values.push_back(v);
      p = next;
    }
    if (values.size() != expected_dim) {
      throw FormatError("expected " + std::to_string(expected_dim) +
                        " values, got " + std::to_string(values.size()) +
                        " at line " + std::to_string(line_no));
    }
    if (table.insert(std::move(token), Vector(values))) ++table.duplicates_;
  }
  if (table.size() == 0) throw FormatError("embedding file is empty");
  return table;
}

EmbeddingTable load_embeddings(const std::filesystem::path& path,
                               std::size_t expected_dim) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open embedding file " + path.string());
  return load_embeddings(in, expected_dim);
}

void save_embeddings(const EmbeddingTable& table, std::ostream& out) {
  for (const auto& token : table.tokens()) {
    out << token;
    for (double v : table.find(token)->values()) out << ' ' << format_double(v);
    out << '\n';
  }
}

}  // namespace hrsn
