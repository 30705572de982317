#include "hrsn/encoder.hpp"

#include "hrsn/rng.hpp"

namespace hrsn {

EncoderParams EncoderParams::zeros(const EncoderDims& dims) {
  return {LstmParams::zeros(dims.word, dims.sentence),
          LstmParams::zeros(dims.sentence, dims.document)};
}

EncoderParams EncoderParams::uniform(const EncoderDims& dims, double lo, double hi,
                                     Rng& rng) {
  EncoderParams p;
  p.sentence = LstmParams::uniform(dims.word, dims.sentence, lo, hi, rng);
  p.document = LstmParams::uniform(dims.sentence, dims.document, lo, hi, rng);
  return p;
}

EncoderDims EncoderParams::dims() const {
  return {sentence.input_dim(), sentence.output_dim(), document.output_dim()};
}

void EncoderParams::validate() const {
  sentence.validate();
  document.validate();
  if (document.input_dim() != sentence.output_dim()) {
    throw ShapeError("EncoderParams: level-2 input dim " +
                     std::to_string(document.input_dim()) +
                     " != level-1 output dim " + std::to_string(sentence.output_dim()));
  }
}

std::size_t EncoderParams::parameter_count() const {
  return sentence.parameter_count() + document.parameter_count();
}

std::vector<std::span<double>> EncoderParams::tensors() {
  auto out = sentence.tensors();
  for (auto t : document.tensors()) out.push_back(t);
  return out;
}

std::vector<std::span<const double>> EncoderParams::tensors() const {
  auto out = sentence.tensors();
  for (auto t : document.tensors()) out.push_back(t);
  return out;
}

Vector sample_dropout_mask(std::size_t dim, double rate, Rng& rng) {
  if (!(rate >= 0.0 && rate < 1.0)) throw Error("dropout rate must be in [0, 1)");
  Vector mask(dim, 1.0);
  if (rate == 0.0) return mask;
  const double keep_scale = 1.0 / (1.0 - rate);
  for (double& m : mask.values()) m = rng.bernoulli(rate) ? 0.0 : keep_scale;
  return mask;
}

DropoutMasks sample_dropout_masks(const EncoderDims& dims, double rate, Rng& rng) {
  DropoutMasks m;
  m.sentence.input = sample_dropout_mask(dims.word, rate, rng);
  m.sentence.hidden = sample_dropout_mask(dims.sentence, rate, rng);
  m.document.input = sample_dropout_mask(dims.sentence, rate, rng);
  m.document.hidden = sample_dropout_mask(dims.document, rate, rng);
  return m;
}

Vector encode_sentence(const LstmParams& level1, std::span<const double> words,
                       std::size_t true_len, std::size_t max_words,
                       const StepMasks* masks) {
  const auto run = lstm_run_frozen(level1, words, true_len, max_words,
                                   LstmState::zeros(level1.output_dim()), masks);
  return run.final.h;
}

EncoderRun encode_document_with_tape(const EncoderParams& params,
                                     const EncodedDocument& doc,
                                     const DropoutMasks* masks) {
  params.validate();
  if (doc.dim() != params.sentence.input_dim()) {
    throw ShapeError("encode_document: word dim " + std::to_string(doc.dim()) +
                     " != encoder input dim " +
                     std::to_string(params.sentence.input_dim()));
  }
  if (doc.num_sentences() == 0) throw Error("encode_document: empty document");

  const std::size_t ds = params.sentence.output_dim();
  const std::size_t dd = params.document.output_dim();
  const std::size_t n_sent = doc.num_sentences();

  EncoderRun out;
  out.tape.sentences.reserve(n_sent);
  std::vector<double> sentence_embeddings(n_sent * ds);
  for (std::size_t n = 0; n < n_sent; ++n) {
    auto run = lstm_run_frozen(params.sentence, doc.sentence(n), doc.sentence_lengths()[n],
                               doc.max_words(), LstmState::zeros(ds),
                               masks ? &masks->sentence : nullptr);
    std::copy(run.final.h.values().begin(), run.final.h.values().end(),
              sentence_embeddings.begin() + static_cast<std::ptrdiff_t>(n * ds));
    out.tape.sentences.push_back(std::move(run.tape));
  }
  auto doc_run = lstm_run_frozen(params.document, sentence_embeddings, n_sent,
                                 doc.max_sentences(), LstmState::zeros(dd),
                                 masks ? &masks->document : nullptr);
  out.embedding = std::move(doc_run.final.h);
  out.tape.document = std::move(doc_run.tape);
  return out;
}

Vector encode_document(const EncoderParams& params, const EncodedDocument& doc,
                       const DropoutMasks* masks) {
  return encode_document_with_tape(params, doc, masks).embedding;
}

void encoder_backward_accumulate(const EncoderParams& params, const EncoderTape& tape,
                                 std::span<const double> d_embedding,
                                 EncoderParams& grads) {
  const std::size_t ds = params.sentence.output_dim();
  const std::size_t dd = params.document.output_dim();
  if (d_embedding.size() != dd) throw ShapeError("encoder_backward: d_embedding has wrong dim");
  if (tape.document.true_len != tape.sentences.size()) {
    throw ShapeError("encoder_backward: tape does not match the forward pass");
  }

  const std::vector<double> zero_dd(dd, 0.0);
  std::vector<double> d_sentences(tape.sentences.size() * ds, 0.0);
  lstm_backward_accumulate(params.document, tape.document, d_embedding, zero_dd,
                           grads.document, d_sentences, {}, {});

  // Sentence embeddings are final hidden states; the final memory state does
  // not reach the loss.
  const std::vector<double> zero_ds(ds, 0.0);
  for (std::size_t n = 0; n < tape.sentences.size(); ++n) {
    lstm_backward_accumulate(params.sentence, tape.sentences[n],
                             std::span<const double>(d_sentences).subspan(n * ds, ds),
                             zero_ds, grads.sentence, {}, {}, {});
  }
}

EncoderParams encoder_backward(const EncoderParams& params, const EncoderTape& tape,
                               const Vector& d_embedding) {
  EncoderParams grads = EncoderParams::zeros(params.dims());
  encoder_backward_accumulate(params, tape, d_embedding.values(), grads);
  return grads;
}

}  // namespace hrsn
