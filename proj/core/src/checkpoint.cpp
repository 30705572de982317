#include "hrsn/checkpoint.hpp"

#include <array>
#include <fstream>
#include <string>

#include "hrsn/train.hpp"

namespace hrsn {
namespace {

using nlohmann::json;

constexpr const char* kFormat = "hrsn-checkpoint";
constexpr int kVersion = 1;
constexpr std::array<const char*, kNumGates> kGateNames = {"f", "i", "o", "c"};

json matrix_json(const std::string& name, const Matrix& m) {
  return {{"name", name},
          {"shape", {m.rows(), m.cols()}},
          {"data", std::vector<double>(m.values().begin(), m.values().end())}};
}

json vector_json(const std::string& name, const Vector& v) {
  return {{"name", name}, {"shape", {v.dim()}}, {"data", v.raw()}};
}

void append_level(json& tensors, const std::string& prefix, const LstmParams& p) {
  for (std::size_t g = 0; g < kNumGates; ++g) {
    tensors.push_back(matrix_json(prefix + ".W_" + kGateNames[g], p.W[g]));
  }
  for (std::size_t g = 0; g < kNumGates; ++g) {
    tensors.push_back(matrix_json(prefix + ".U_" + kGateNames[g], p.U[g]));
  }
  for (std::size_t g = 0; g < kNumGates; ++g) {
    tensors.push_back(vector_json(prefix + ".b_" + kGateNames[g], p.b[g]));
  }
}

const json& find_tensor(const json& tensors, const std::string& name) {
  for (const auto& t : tensors) {
    if (t.at("name").get<std::string>() == name) return t;
  }
  throw FormatError("checkpoint: missing tensor " + name);
}

Matrix read_matrix(const json& tensors, const std::string& name, std::size_t rows,
                   std::size_t cols) {
  const json& t = find_tensor(tensors, name);
  const auto shape = t.at("shape").get<std::vector<std::size_t>>();
  if (shape != std::vector<std::size_t>{rows, cols}) {
    throw FormatError("checkpoint: tensor " + name + " has unexpected shape");
  }
  auto data = t.at("data").get<std::vector<double>>();
  if (data.size() != rows * cols) throw FormatError("checkpoint: tensor " + name + " has wrong length");
  return Matrix(rows, cols, std::move(data));
}

Vector read_vector(const json& tensors, const std::string& name, std::size_t dim) {
  const json& t = find_tensor(tensors, name);
  const auto shape = t.at("shape").get<std::vector<std::size_t>>();
  if (shape != std::vector<std::size_t>{dim}) {
    throw FormatError("checkpoint: tensor " + name + " has unexpected shape");
  }
  auto data = t.at("data").get<std::vector<double>>();
  if (data.size() != dim) throw FormatError("checkpoint: tensor " + name + " has wrong length");
  return Vector(std::move(data));
}

LstmParams read_level(const json& tensors, const std::string& prefix, std::size_t in,
                      std::size_t out) {
  LstmParams p;
  for (std::size_t g = 0; g < kNumGates; ++g) {
    p.W[g] = read_matrix(tensors, prefix + ".W_" + kGateNames[g], out, out);
    p.U[g] = read_matrix(tensors, prefix + ".U_" + kGateNames[g], out, in);
    p.b[g] = read_vector(tensors, prefix + ".b_" + kGateNames[g], out);
  }
  return p;
}

}  // namespace

ModelConfig ModelConfig::from(const TrainConfig& config) {
  return {config.dims, config.max_words, config.max_sentences, config.thresholds};
}

json checkpoint_to_json(const Model& model) {
  model.params.validate();
  if (model.params.dims() != model.config.dims) {
    throw ShapeError("checkpoint: parameter shapes do not match the model config");
  }
  json j;
  j["format"] = kFormat;
  j["version"] = kVersion;
  const auto& c = model.config;
  j["config"] = {{"word_dim", c.dims.word},         {"sentence_dim", c.dims.sentence},
                 {"document_dim", c.dims.document}, {"max_words", c.max_words},
                 {"max_sentences", c.max_sentences}, {"tau1", c.thresholds.tau1},
                 {"tau2", c.thresholds.tau2}};
  json tensors = json::array();
  append_level(tensors, "sentence", model.params.sentence);
  append_level(tensors, "document", model.params.document);
  j["tensors"] = std::move(tensors);
  return j;
}

Model checkpoint_from_json(const json& j) {
  try {
    if (j.at("format").get<std::string>() != kFormat) {
      throw FormatError("checkpoint: unexpected format tag");
    }
    if (j.at("version").get<int>() != kVersion) {
      throw FormatError("checkpoint: unsupported version " + j.at("version").dump());
    }
    Model m;
    const json& c = j.at("config");
    m.config.dims = {c.at("word_dim").get<std::size_t>(), c.at("sentence_dim").get<std::size_t>(),
                     c.at("document_dim").get<std::size_t>()};
    m.config.max_words = c.at("max_words").get<std::size_t>();
    m.config.max_sentences = c.at("max_sentences").get<std::size_t>();
    m.config.thresholds = {c.at("tau1").get<double>(), c.at("tau2").get<double>()};
    m.config.thresholds.validate();
    const json& tensors = j.at("tensors");
    const auto& d = m.config.dims;
    m.params.sentence = read_level(tensors, "sentence", d.word, d.sentence);
    m.params.document = read_level(tensors, "document", d.sentence, d.document);
    m.params.validate();
    return m;
  } catch (const json::exception& e) {
    throw FormatError(std::string("checkpoint: ") + e.what());
  }
}

void save_checkpoint(const Model& model, std::ostream& out) {
  out << checkpoint_to_json(model).dump() << '\n';
}

void save_checkpoint(const Model& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write checkpoint " + path.string());
  save_checkpoint(model, out);
}

Model load_checkpoint(std::istream& in) {
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError(std::string("checkpoint: ") + e.what());
  }
  return checkpoint_from_json(j);
}

Model load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open checkpoint " + path.string());
  return load_checkpoint(in);
}

}  // namespace hrsn
