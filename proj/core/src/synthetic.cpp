#include "hrsn/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "hrsn/rng.hpp"

namespace hrsn {
namespace {

std::size_t draw_between(Rng& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng.below(hi - lo + 1));
}

// Cumulative distribution over token ids.
using Cdf = std::vector<double>;

Cdf normalized_cdf(const std::vector<double>& weights) {
  Cdf cdf(weights.size());
  double total = 0.0;
  for (std::size_t v = 0; v < weights.size(); ++v) {
    total += weights[v];
    cdf[v] = total;
  }
  for (double& c : cdf) c /= total;
  return cdf;
}

std::string make_document(const Cdf& author, const SyntheticConfig& cfg, Rng& rng) {
  std::string doc;
  const std::size_t n_sent = draw_between(rng, cfg.min_sentences, cfg.max_sentences);
  for (std::size_t s = 0; s < n_sent; ++s) {
    if (s > 0) doc += ' ';
    const std::size_t n_words = draw_between(rng, cfg.min_words, cfg.max_words);
    for (std::size_t w = 0; w < n_words; ++w) {
      const double u = rng.uniform();
      const auto id = static_cast<std::size_t>(
          std::upper_bound(author.begin(), author.end(), u) - author.begin());
      std::string token = synthetic_token(std::min(id, author.size() - 1));
      if (w == 0) {
        token[0] = static_cast<char>(token[0] - 'a' + 'A');
      } else {
        doc += ' ';
      }
      doc += token;
    }
    doc += '.';
  }
  return doc;
}

}  // namespace

void SyntheticConfig::validate() const {
  if (authors < 2 || vocab < 1 || embedding_dim < 1 || instances < 1 ||
      min_sentences < 1 || min_sentences > max_sentences || min_words < 1 ||
      min_words > max_words || max_known_docs < 1 || zipf_exponent < 0.0) {
    throw Error("invalid synthetic corpus configuration");
  }
}

std::string synthetic_token(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "w%03zu", index);
  return buf;
}

SyntheticCorpus generate_synthetic(const SyntheticConfig& cfg, Rng& rng) {
  cfg.validate();
  SyntheticCorpus out;
  out.embeddings = EmbeddingTable(cfg.embedding_dim);
  for (std::size_t v = 0; v < cfg.vocab; ++v) {
    out.embeddings.insert(synthetic_token(v), uniform_init(cfg.embedding_dim, -1.0, 1.0, rng));
  }

  // Zipf weights by rank, shared shape; authors differ in their ranking.
  std::vector<double> by_rank(cfg.vocab);
  for (std::size_t r = 0; r < cfg.vocab; ++r) {
    by_rank[r] = 1.0 / std::pow(static_cast<double>(r + 1), cfg.zipf_exponent);
  }
  std::vector<Cdf> authors;
  for (std::size_t a = 0; a < cfg.authors; ++a) {
    const auto ranking = rng.permutation(cfg.vocab);
    std::vector<double> weights(cfg.vocab);
    for (std::size_t r = 0; r < cfg.vocab; ++r) weights[ranking[r]] = by_rank[r];
    authors.push_back(normalized_cdf(weights));
  }

  for (std::size_t i = 0; i < cfg.instances; ++i) {
    const int label = i % 2 == 0 ? 1 : 0;
    const auto known = static_cast<std::size_t>(rng.below(cfg.authors));
    std::size_t unknown = known;
    if (label == 0) {
      unknown = static_cast<std::size_t>(rng.below(cfg.authors - 1));
      if (unknown >= known) ++unknown;
    }
    VerificationInstance inst;
    inst.label = label;
    const std::size_t n_known = draw_between(rng, 1, cfg.max_known_docs);
    for (std::size_t k = 0; k < n_known; ++k) {
      inst.known_docs.push_back(make_document(authors[known], cfg, rng));
    }
    inst.unknown_doc = make_document(authors[unknown], cfg, rng);
    out.corpus.push_back(std::move(inst));
    out.known_author.push_back(known);
    out.unknown_author.push_back(unknown);
  }

  // Shuffle instance order, keeping the author bookkeeping aligned.
  const auto perm = rng.permutation(out.corpus.size());
  SyntheticCorpus shuffled;
  shuffled.embeddings = std::move(out.embeddings);
  for (std::size_t p : perm) {
    shuffled.corpus.push_back(std::move(out.corpus[p]));
    shuffled.known_author.push_back(out.known_author[p]);
    shuffled.unknown_author.push_back(out.unknown_author[p]);
  }
  return shuffled;
}

}  // namespace hrsn
