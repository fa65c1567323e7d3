#include "sche/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "sche/expr.hpp"

namespace sche {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

struct IniData {
  // section -> key -> value, plus the line for error messages.
  std::map<std::string, std::map<std::string, std::pair<std::string, int>>> sections;
};

IniData parse_ini(const std::string& text, const std::string& path) {
  IniData data;
  std::istringstream in(text);
  std::string line, section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t comment = line.find_first_of("#;");
    if (comment != std::string::npos) line.erase(comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                    ": malformed section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      data.sections[section];
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": empty key");
    }
    auto [it, inserted] = data.sections[section].emplace(key, std::make_pair(value, line_no));
    if (!inserted) {
      throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": duplicate key '" +
                                  key + "'");
    }
  }
  return data;
}

class SectionReader {
 public:
  SectionReader(IniData& data, const std::string& section, const std::string& path)
      : path_(path), section_(section) {
    auto it = data.sections.find(section);
    if (it != data.sections.end()) entries_ = &it->second;
  }

  bool has(const std::string& key) const { return entries_ && entries_->count(key); }

  std::string take(const std::string& key) {
    auto it = entries_->find(key);
    const std::string value = it->second.first;
    consumed_.insert(key);
    return value;
  }

  double take_double(const std::string& key) {
    const std::string value = take(key);
    try {
      std::size_t used = 0;
      const double v = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
      return v;
    } catch (const std::exception&) {
      fail(key, "not a number: '" + value + "'");
    }
  }

  int take_int(const std::string& key) {
    const double v = take_double(key);
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v) fail(key, "not an integer");
    return i;
  }

  std::uint64_t take_u64(const std::string& key) {
    const std::string value = take(key);
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
      return v;
    } catch (const std::exception&) {
      fail(key, "not a nonnegative integer: '" + value + "'");
    }
  }

  bool take_bool(const std::string& key) {
    const std::string value = take(key);
    if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
    if (value == "false" || value == "0" || value == "no" || value == "off") return false;
    fail(key, "not a boolean: '" + value + "'");
  }

  std::vector<int> take_int_list(const std::string& key) {
    std::string value = take(key);
    for (char& c : value) {
      if (c == ',') c = ' ';
    }
    std::istringstream in(value);
    std::vector<int> out;
    int v = 0;
    while (in >> v) out.push_back(v);
    if (!in.eof() || out.empty()) fail(key, "expected a list of integers");
    return out;
  }

  void finish() const {
    if (!entries_) return;
    for (const auto& [key, value] : *entries_) {
      if (!consumed_.count(key)) {
        throw std::invalid_argument(path_ + ":" + std::to_string(value.second) +
                                    ": unknown key '" + key + "' in section [" + section_ + "]");
      }
    }
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw std::invalid_argument(path_ + ": key '" + key + "' in section [" + section_ + "]: " +
                                what);
  }

 private:
  const std::string& path_;
  std::string section_;
  const std::map<std::string, std::pair<std::string, int>>* entries_ = nullptr;
  std::set<std::string> consumed_;
};

}  // namespace

RunConfig parse_run_config(const std::string& text, const std::string& path) {
  IniData data = parse_ini(text, path);
  for (const auto& [section, entries] : data.sections) {
    (void)entries;
    if (section != "model" && section != "discretization" && section != "study" &&
        section != "output") {
      throw std::invalid_argument(path + ": unknown section [" + section + "]");
    }
  }

  RunConfig config;

  SectionReader model(data, "model", path);
  if (model.has("a0")) config.params.a0 = model.take_double("a0");
  if (model.has("a1")) config.params.a1 = model.take_double("a1");
  if (model.has("a2")) config.params.a2 = model.take_double("a2");
  if (model.has("a3")) config.params.a3 = model.take_double("a3");
  if (model.has("sigma")) config.params.sigma = model.take_double("sigma");
  if (model.has("h1")) config.params.hurst.h1 = model.take_double("h1");
  if (model.has("h2")) config.params.hurst.h2 = model.take_double("h2");
  if (model.has("T")) config.params.horizon = model.take_double("T");
  if (model.has("drift_enabled")) config.params.drift_enabled = model.take_bool("drift_enabled");
  if (model.has("initial")) {
    config.initial_expression = model.take("initial");
    try {
      config.params.initial = parse_expression(config.initial_expression);
    } catch (const std::exception& e) {
      model.fail("initial", e.what());
    }
  }
  model.finish();

  SectionReader disc(data, "discretization", path);
  if (disc.has("m_ref")) config.m_ref = disc.take_int("m_ref");
  if (disc.has("n_ref")) config.n_ref = disc.take_int("n_ref");
  if (disc.has("levels_m")) config.levels_m = disc.take_int_list("levels_m");
  if (disc.has("levels_n")) config.levels_n = disc.take_int_list("levels_n");
  disc.finish();

  SectionReader study(data, "study", path);
  if (study.has("mode")) {
    try {
      config.mode = study_mode_from_string(study.take("mode"));
    } catch (const std::exception& e) {
      study.fail("mode", e.what());
    }
  }
  if (study.has("trajectories")) config.trajectories = study.take_int("trajectories");
  if (study.has("seed")) config.seed = study.take_u64("seed");
  if (study.has("workers")) config.workers = study.take_int("workers");
  study.finish();

  SectionReader output(data, "output", path);
  if (output.has("directory")) config.output_dir = output.take("directory");
  if (output.has("csv")) config.write_csv = output.take_bool("csv");
  if (output.has("gnuplot")) config.write_gnuplot = output.take_bool("gnuplot");
  output.finish();

  if (const char* env_seed = std::getenv("SCHE_SEED")) {
    try {
      config.seed = std::stoull(env_seed);
    } catch (const std::exception&) {
      throw std::invalid_argument("SCHE_SEED is not a nonnegative integer: '" +
                                  std::string(env_seed) + "'");
    }
  }

  validate(config.params);
  validate(make_study_config(config));
  return config;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open config file " + path);
  }
  std::ostringstream text;
  text << in.rdbuf();
  return parse_run_config(text.str(), path);
}

StudyConfig make_study_config(const RunConfig& config) {
  StudyConfig study;
  study.params = config.params;
  study.m_ref = config.m_ref;
  study.n_ref = config.n_ref;
  study.mode = config.mode;
  study.coarse_levels =
      make_levels(config.mode, config.m_ref, config.n_ref, config.levels_m, config.levels_n);
  study.trajectories = config.trajectories;
  study.seed = config.seed;
  study.workers = config.workers;
  return study;
}

}  // namespace sche
