#include "hrsn/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <sstream>

namespace hrsn {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw FormatError("config: bad value '" + value + "' for " + key);
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw FormatError("config: bad boolean '" + value + "' for " + key);
}

using Setter = std::function<void(TrainConfig&, const std::string&, const std::string&)>;

template <typename T, typename Field>
Setter number(Field field) {
  return [field](TrainConfig& c, const std::string& k, const std::string& v) {
    field(c) = parse_number<T>(k, v);
  };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"word_dim", number<std::size_t>([](TrainConfig& c) -> auto& { return c.dims.word; })},
      {"sentence_dim", number<std::size_t>([](TrainConfig& c) -> auto& { return c.dims.sentence; })},
      {"document_dim", number<std::size_t>([](TrainConfig& c) -> auto& { return c.dims.document; })},
      {"max_words", number<std::size_t>([](TrainConfig& c) -> auto& { return c.max_words; })},
      {"max_sentences", number<std::size_t>([](TrainConfig& c) -> auto& { return c.max_sentences; })},
      {"batch_size", number<std::size_t>([](TrainConfig& c) -> auto& { return c.batch_size; })},
      {"clip_norm", number<double>([](TrainConfig& c) -> auto& { return c.clip_norm; })},
      {"dropout_rate", number<double>([](TrainConfig& c) -> auto& { return c.dropout_rate; })},
      {"init_range", number<double>([](TrainConfig& c) -> auto& { return c.init_range; })},
      {"learning_rate", number<double>([](TrainConfig& c) -> auto& { return c.adadelta.learning_rate; })},
      {"rho", number<double>([](TrainConfig& c) -> auto& { return c.adadelta.rho; })},
      {"epsilon", number<double>([](TrainConfig& c) -> auto& { return c.adadelta.epsilon; })},
      {"tau1", number<double>([](TrainConfig& c) -> auto& { return c.thresholds.tau1; })},
      {"tau2", number<double>([](TrainConfig& c) -> auto& { return c.thresholds.tau2; })},
      {"max_epochs", number<std::size_t>([](TrainConfig& c) -> auto& { return c.max_epochs; })},
      {"patience", number<std::size_t>([](TrainConfig& c) -> auto& { return c.patience; })},
      {"folds", number<std::size_t>([](TrainConfig& c) -> auto& { return c.folds; })},
      {"seed", number<std::uint64_t>([](TrainConfig& c) -> auto& { return c.seed; })},
      {"threads", number<std::size_t>([](TrainConfig& c) -> auto& { return c.threads; })},
      {"augment", [](TrainConfig& c, const std::string& k, const std::string& v) { c.augment = parse_bool(k, v); }},
      {"calibrate_tau", [](TrainConfig& c, const std::string& k, const std::string& v) { c.calibrate_tau = parse_bool(k, v); }},
      {"deterministic", [](TrainConfig& c, const std::string& k, const std::string& v) { c.deterministic = parse_bool(k, v); }},
  };
  return table;
}

}  // namespace

void set_config_value(TrainConfig& config, const std::string& key, const std::string& value) {
  const auto& table = setters();
  const auto it = table.find(key);
  if (it == table.end()) throw FormatError("config: unknown key '" + key + "'");
  it->second(config, key, value);
}

TrainConfig parse_config(std::istream& in, TrainConfig base) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw FormatError("config: expected key = value at line " + std::to_string(line_no));
    }
    try {
      set_config_value(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const FormatError& e) {
      throw FormatError(std::string(e.what()) + " at line " + std::to_string(line_no));
    }
  }
  return base;
}

TrainConfig load_config(const std::filesystem::path& path, TrainConfig base) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open config " + path.string());
  return parse_config(in, std::move(base));
}

namespace {

std::string shortest(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string to_key_value(const TrainConfig& c) {
  std::ostringstream out;
  out << "word_dim = " << c.dims.word << '\n'
      << "sentence_dim = " << c.dims.sentence << '\n'
      << "document_dim = " << c.dims.document << '\n'
      << "max_words = " << c.max_words << '\n'
      << "max_sentences = " << c.max_sentences << '\n'
      << "batch_size = " << c.batch_size << '\n'
      << "clip_norm = " << shortest(c.clip_norm) << '\n'
      << "dropout_rate = " << shortest(c.dropout_rate) << '\n'
      << "init_range = " << shortest(c.init_range) << '\n'
      << "learning_rate = " << shortest(c.adadelta.learning_rate) << '\n'
      << "rho = " << shortest(c.adadelta.rho) << '\n'
      << "epsilon = " << shortest(c.adadelta.epsilon) << '\n'
      << "tau1 = " << shortest(c.thresholds.tau1) << '\n'
      << "tau2 = " << shortest(c.thresholds.tau2) << '\n'
      << "max_epochs = " << c.max_epochs << '\n'
      << "patience = " << c.patience << '\n'
      << "augment = " << (c.augment ? "true" : "false") << '\n'
      << "folds = " << c.folds << '\n'
      << "calibrate_tau = " << (c.calibrate_tau ? "true" : "false") << '\n'
      << "seed = " << c.seed << '\n'
      << "deterministic = " << (c.deterministic ? "true" : "false") << '\n'
      << "threads = " << c.threads << '\n';
  return out.str();
}

}  // namespace hrsn
