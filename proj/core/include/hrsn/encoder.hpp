#pragma once

// Two-level document encoder.
//
// Level 1 reads the words of each sentence and yields the sentence embedding
// (its final hidden state; the memory state is discarded). Level 2 reads the
// sentence embeddings and yields the document embedding, again the final
// hidden state. Both levels start from zero states and freeze past the true
// length.

#include <cstddef>
#include <span>
#include <vector>

#include "hrsn/lstm.hpp"
#include "hrsn/numeric.hpp"
#include "hrsn/text.hpp"

namespace hrsn {

class Rng;

struct EncoderDims {
  std::size_t word = 300;      // D_w
  std::size_t sentence = 150;  // D_s
  std::size_t document = 75;   // D_d

  friend bool operator==(const EncoderDims&, const EncoderDims&) = default;
};

struct EncoderParams {
  LstmParams sentence;  // word -> sentence, [in D_w, out D_s]
  LstmParams document;  // sentence -> document, [in D_s, out D_d]

  static EncoderParams zeros(const EncoderDims& dims);
  static EncoderParams uniform(const EncoderDims& dims, double lo, double hi, Rng& rng);

  EncoderDims dims() const;
  void validate() const;
  std::size_t parameter_count() const;

  // Level-1 tensors followed by level-2 tensors.
  std::vector<std::span<double>> tensors();
  std::vector<std::span<const double>> tensors() const;

  friend bool operator==(const EncoderParams&, const EncoderParams&) = default;
};

// One mask pair per level, sampled once per document. The level-1 pair is
// shared by every sentence of the document.
struct DropoutMasks {
  StepMasks sentence;
  StepMasks document;
};

// Inverted-dropout mask: entries 0 with probability `rate`, else 1/(1-rate).
Vector sample_dropout_mask(std::size_t dim, double rate, Rng& rng);
DropoutMasks sample_dropout_masks(const EncoderDims& dims, double rate, Rng& rng);

// `words` is row-major [>= true_len x D_w].
Vector encode_sentence(const LstmParams& level1, std::span<const double> words,
                       std::size_t true_len, std::size_t max_words,
                       const StepMasks* masks = nullptr);

Vector encode_document(const EncoderParams& params, const EncodedDocument& doc,
                       const DropoutMasks* masks = nullptr);

struct EncoderTape {
  std::vector<LstmTape> sentences;  // one per real sentence
  LstmTape document;
};

struct EncoderRun {
  Vector embedding;  // x^d
  EncoderTape tape;
};

EncoderRun encode_document_with_tape(const EncoderParams& params,
                                     const EncodedDocument& doc,
                                     const DropoutMasks* masks = nullptr);

// Gradient of the loss w.r.t. every encoder parameter given dL/dx^d.
EncoderParams encoder_backward(const EncoderParams& params, const EncoderTape& tape,
                               const Vector& d_embedding);
void encoder_backward_accumulate(const EncoderParams& params, const EncoderTape& tape,
                                 std::span<const double> d_embedding,
                                 EncoderParams& grads);

}  // namespace hrsn
