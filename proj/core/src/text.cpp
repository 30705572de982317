#include "hrsn/text.hpp"

#include <algorithm>
#include <array>
#include <regex>

namespace hrsn {
namespace {

// Trailing sentence punctuation is never part of a URL.
const std::regex& url_pattern() {
  static const std::regex re(
      R"((?:(?:https?|ftp)://|www\.)[^\s<>"]*[^\s<>".,;:!?'")\]}])",
      std::regex::ECMAScript | std::regex::icase | std::regex::optimize);
  return re;
}

const std::regex& email_pattern() {
  static const std::regex re(
      R"([A-Za-z0-9._%+-]+@[A-Za-z0-9-]+(?:\.[A-Za-z0-9-]+)*\.[A-Za-z]{2,})",
      std::regex::ECMAScript | std::regex::optimize);
  return re;
}

// Group 1 emulates a leading digit boundary (no lookbehind in ECMAScript).
const std::regex& phone_pattern() {
  static const std::regex re(
      R"((^|[^0-9+])(?:\+[0-9]{1,3}[ .-]?)?(?:\([0-9]{3}\)|[0-9]{3})[ .-]?[0-9]{3}[ .-]?[0-9]{4}(?![0-9]))",
      std::regex::ECMAScript | std::regex::optimize);
  return re;
}

constexpr std::array<std::string_view, 40> kAbbreviations = {
    "mr",   "mrs",  "ms",   "dr",   "prof", "sr",   "jr",  "st",  "vs",  "etc",
    "e.g",  "i.e",  "inc",  "ltd",  "co",   "corp", "no",  "fig", "jan", "feb",
    "mar",  "apr",  "jun",  "jul",  "aug",  "sep",  "sept", "oct", "nov", "dec",
    "mt",   "ave",  "gen",  "col",  "lt",   "sgt",  "capt", "rev", "u.s", "approx",
};

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }

bool is_word_char(char c) {
  const auto u = static_cast<unsigned char>(c);
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
         u >= 0x80;
}

bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }
bool is_closer(char c) { return c == '"' || c == '\'' || c == ')' || c == ']' || c == '}'; }
bool is_opener(char c) { return c == '"' || c == '\'' || c == '(' || c == '['; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (is_upper(c)) c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

// The period at `dot` ends an abbreviation or an uppercase initial ("J. Doe").
bool is_abbreviation(std::string_view text, std::size_t dot) {
  std::size_t b = dot;
  while (b > 0 && !is_space(text[b - 1])) --b;
  std::string_view word = text.substr(b, dot - b);
  while (!word.empty() && !is_word_char(word.front())) word.remove_prefix(1);
  if (word.empty()) return false;
  if (word.size() == 1 && is_upper(word[0])) return true;
  const std::string w = lower(word);
  return std::find(kAbbreviations.begin(), kAbbreviations.end(), w) != kAbbreviations.end();
}

void push_sentence(std::vector<std::string>& out, std::string_view piece) {
  piece = trim(piece);
  if (!piece.empty()) out.emplace_back(piece);
}

}  // namespace

std::span<const std::string_view> abbreviation_stop_list() { return kAbbreviations; }

std::string normalize_text(std::string_view raw) {
  std::string text(raw);
  // Replacement tokens match none of the patterns and every replacement
  // removes at least one non-token character, so this reaches a fixed point.
  for (;;) {
    std::string next = std::regex_replace(text, url_pattern(), std::string(kUrlToken));
    next = std::regex_replace(next, email_pattern(), std::string(kEmailToken));
    next = std::regex_replace(next, phone_pattern(), "$1" + std::string(kPhoneToken));
    if (next == text) return text;
    text = std::move(next);
  }
}

std::vector<std::string> segment_sentences(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == '\n') {
      push_sentence(out, text.substr(start, i - start));
      start = ++i;
      continue;
    }
    if (!is_terminator(c)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && is_terminator(text[j])) ++j;
    while (j < text.size() && is_closer(text[j])) ++j;

    bool boundary = false;
    if (j == text.size()) {
      boundary = true;
    } else if (is_space(text[j])) {
      std::size_t k = j;
      while (k < text.size() && is_space(text[k])) ++k;
      if (k == text.size()) {
        boundary = true;
      } else {
        std::size_t m = k;
        while (m < text.size() && is_opener(text[m])) ++m;
        boundary = m < text.size() && is_upper(text[m]);
      }
    }
    const bool single_dot = c == '.' && (i + 1 == text.size() || !is_terminator(text[i + 1]));
    if (boundary && single_dot && is_abbreviation(text, i)) boundary = false;
    if (boundary) {
      push_sentence(out, text.substr(start, j - start));
      start = j;
    }
    i = j;
  }
  push_sentence(out, text.substr(start));
  return out;
}

std::vector<std::string> tokenize(std::string_view sentence) {
  static constexpr std::array<std::string_view, 3> kUniversal = {kUrlToken, kEmailToken,
                                                                 kPhoneToken};
  std::vector<std::string> tokens;
  std::size_t i = 0;
  const std::size_t n = sentence.size();
  while (i < n) {
    const char c = sentence[i];
    if (is_space(c)) {
      ++i;
      continue;
    }
    if (c == '<') {
      const auto rest = sentence.substr(i);
      auto hit = std::find_if(kUniversal.begin(), kUniversal.end(),
                              [&](std::string_view t) { return rest.starts_with(t); });
      if (hit != kUniversal.end()) {
        tokens.emplace_back(*hit);
        i += hit->size();
        continue;
      }
    }
    std::size_t j = i + 1;
    if (is_word_char(c)) {
      while (j < n) {
        if (is_word_char(sentence[j])) {
          ++j;
        } else if ((sentence[j] == '\'' || sentence[j] == '-') && j + 1 < n &&
                   is_word_char(sentence[j + 1])) {
          j += 2;
        } else {
          break;
        }
      }
    } else {
      while (j < n && sentence[j] == c) ++j;
    }
    tokens.emplace_back(sentence.substr(i, j - i));
    i = j;
  }
  return tokens;
}

EncodedDocument::EncodedDocument(std::size_t max_sentences, std::size_t max_words,
                                 std::size_t dim)
    : max_sentences_(max_sentences),
      max_words_(max_words),
      dim_(dim),
      data_(max_sentences * max_words * dim, 0.0) {
  if (max_sentences == 0 || max_words == 0) {
    throw Error("EncodedDocument: maximum lengths must be >= 1");
  }
}

bool EncodedDocument::add_sentence(std::span<const std::span<const double>> words) {
  if (words.empty()) throw ShapeError("EncodedDocument: empty sentence");
  if (lengths_.size() == max_sentences_) return false;
  const std::size_t n = lengths_.size();
  const std::size_t kept = std::min(words.size(), max_words_);
  double* base = data_.data() + n * max_words_ * dim_;
  for (std::size_t t = 0; t < kept; ++t) {
    if (words[t].size() != dim_) {
      throw ShapeError("EncodedDocument: word vector has dim " +
                       std::to_string(words[t].size()) + ", expected " +
                       std::to_string(dim_));
    }
    std::copy(words[t].begin(), words[t].end(), base + t * dim_);
  }
  lengths_.push_back(kept);
  return true;
}

std::span<const double> EncodedDocument::sentence(std::size_t n) const {
  return std::span<const double>(data_).subspan(n * max_words_ * dim_, max_words_ * dim_);
}

std::span<const double> EncodedDocument::word(std::size_t n, std::size_t t) const {
  return std::span<const double>(data_).subspan((n * max_words_ + t) * dim_, dim_);
}

EncodedDocument EncodedDocument::with_bounds(std::size_t max_sentences,
                                             std::size_t max_words) const {
  EncodedDocument out(max_sentences, max_words, dim_);
  if (num_sentences() > max_sentences) {
    throw ShapeError("with_bounds: document has more sentences than the new bound");
  }
  std::vector<std::span<const double>> words;
  for (std::size_t n = 0; n < num_sentences(); ++n) {
    if (lengths_[n] > max_words) {
      throw ShapeError("with_bounds: sentence longer than the new bound");
    }
    words.clear();
    for (std::size_t t = 0; t < lengths_[n]; ++t) words.push_back(word(n, t));
    out.add_sentence(words);
  }
  return out;
}

std::vector<std::vector<std::string>> tokenize_document(std::string_view text,
                                                        std::size_t max_words,
                                                        std::size_t max_sentences) {
  std::vector<std::vector<std::string>> out;
  for (const auto& s : segment_sentences(normalize_text(text))) {
    if (out.size() == max_sentences) break;
    auto tokens = tokenize(s);
    if (tokens.empty()) continue;
    if (tokens.size() > max_words) tokens.resize(max_words);
    out.push_back(std::move(tokens));
  }
  return out;
}

EncodedDocument encode_text(std::string_view text, const EmbeddingTable& table,
                            std::size_t max_words, std::size_t max_sentences) {
  EncodedDocument doc(max_sentences, max_words, table.dim());
  const auto sentences = tokenize_document(text, max_words, max_sentences);
  if (sentences.empty()) throw Error("empty document");
  std::vector<std::span<const double>> words;
  for (const auto& tokens : sentences) {
    words.clear();
    for (const auto& tok : tokens) words.push_back(table.lookup(tok).values());
    doc.add_sentence(words);
  }
  return doc;
}

}  // namespace hrsn
