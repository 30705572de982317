#include "hrsn/corpus.hpp"

#include <fstream>
#include <numeric>

#include <nlohmann/json.hpp>

#include "hrsn/error.hpp"

namespace hrsn {

using nlohmann::json;

void VerificationInstance::validate() const {
  if (known_docs.empty()) throw FormatError("instance has no known documents");
  if (label != 0 && label != 1) {
    throw FormatError("label must be 0 or 1, got " + std::to_string(label));
  }
}

std::string concatenate_known(const VerificationInstance& instance,
                              std::span<const std::size_t> order) {
  const std::size_t n = instance.known_docs.size();
  std::vector<bool> seen(n, false);
  if (order.size() != n) throw Error("concatenate_known: order is not a permutation");
  for (std::size_t idx : order) {
    if (idx >= n || seen[idx]) throw Error("concatenate_known: order is not a permutation");
    seen[idx] = true;
  }
  std::string out;
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0) out += '\n';
    out += instance.known_docs[order[k]];
  }
  return out;
}

std::string concatenate_known(const VerificationInstance& instance) {
  std::vector<std::size_t> order(instance.known_docs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  return concatenate_known(instance, order);
}

std::string to_jsonl(const VerificationInstance& instance) {
  json j;
  j["known"] = instance.known_docs;
  j["unknown"] = instance.unknown_doc;
  j["label"] = instance.label;
  return j.dump();
}

VerificationInstance instance_from_jsonl(const std::string& line, std::size_t line_no) {
  const std::string where = line_no ? " at line " + std::to_string(line_no) : "";
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw FormatError("invalid JSON" + where + ": " + e.what());
  }
  VerificationInstance inst;
  try {
    inst.known_docs = j.at("known").get<std::vector<std::string>>();
    inst.unknown_doc = j.at("unknown").get<std::string>();
    inst.label = j.at("label").get<int>();
  } catch (const json::exception& e) {
    throw FormatError("bad instance" + where + ": " + e.what());
  }
  try {
    inst.validate();
  } catch (const FormatError& e) {
    throw FormatError(std::string(e.what()) + where);
  }
  return inst;
}

Corpus load_corpus(std::istream& in) {
  Corpus corpus;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    corpus.push_back(instance_from_jsonl(line, line_no));
  }
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open corpus " + path.string());
  return load_corpus(in);
}

void save_corpus(const Corpus& corpus, std::ostream& out) {
  for (const auto& inst : corpus) out << to_jsonl(inst) << '\n';
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write corpus " + path.string());
  save_corpus(corpus, out);
}

}  // namespace hrsn
