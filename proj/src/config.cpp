#include "ddgf/config.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ddgf/container.hpp"
#include "ddgf/error.hpp"

namespace ddgf {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& text, const std::string& what) {
  T v{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ConfigError(what + ": '" + text + "' is not a valid number");
  }
  return v;
}

std::vector<std::size_t> parse_widths(const std::string& text, const std::string& what) {
  std::vector<std::size_t> out;
  for (const auto& item : split_list(text)) out.push_back(parse_number<std::size_t>(item, what));
  return out;
}

}  // namespace

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(text);
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

IniFile IniFile::parse(const std::string& text, const std::string& origin) {
  IniFile ini;
  std::istringstream is(text);
  std::string line, section;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line.erase(comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(origin + ":" + std::to_string(line_no) + ": unterminated section");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected key = value");
    }
    ini.values_[section][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return ini;
}

IniFile IniFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return parse(os.str(), path);
}

std::optional<std::string> IniFile::get(const std::string& section, const std::string& key) const {
  const auto s = values_.find(section);
  if (s == values_.end()) return std::nullopt;
  const auto k = s->second.find(key);
  if (k == s->second.end()) return std::nullopt;
  return k->second;
}

void IniFile::set(const std::string& section, const std::string& key, std::string value) {
  values_[section][key] = std::move(value);
}

std::string IniFile::canonical(const std::set<std::string>& skip) const {
  std::string out;
  for (const auto& [section, kv] : values_) {
    if (skip.contains(section)) continue;
    out += "[" + section + "]\n";
    for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  }
  return out;
}

ModelSpec parse_model_entry(const std::string& entry, const ModelSpec& defaults,
                            const std::vector<std::size_t>& rec_widths) {
  ModelSpec spec = defaults;
  std::string name = entry;
  const auto colon = entry.find(':');
  if (colon != std::string::npos) {
    name = entry.substr(0, colon);
    spec.graph = graph_kind_from_string(entry.substr(colon + 1));
  }
  spec.architecture = architecture_from_string(name);
  if (spec.architecture == Architecture::GcnnFixed && colon == std::string::npos) {
    throw ConfigError("gcnn-fixed needs a graph kind, e.g. gcnn-fixed:DC");
  }
  if (spec.architecture != Architecture::GcnnFixed) spec.graph = GraphKind::Identity;
  if (spec.architecture == Architecture::GcnnRecDdgf) spec.widths = rec_widths;
  if (spec.architecture == Architecture::Lstm || spec.architecture == Architecture::HistoricalAverage ||
      spec.architecture == Architecture::Lasso) {
    spec.widths.clear();
  }
  spec.validate();
  return spec;
}

ExperimentConfig ExperimentConfig::from_ini(const IniFile& ini) {
  ExperimentConfig c;
  auto get = [&](const char* s, const char* k) { return ini.get(s, k); };

  if (auto v = get("data", "trips")) c.trip_paths = split_list(*v);
  if (auto v = get("data", "demand"); v && !v->empty()) c.demand_path = *v;
  if (auto v = get("data", "stations"); v && !v->empty()) {
    const auto ids = split_list(*v);
    c.station_filter = std::set<std::string>(ids.begin(), ids.end());
  }
  if (auto v = get("data", "window")) c.window = parse_number<std::size_t>(*v, "data.window");
  if (c.window < 1) throw ConfigError("data.window must be at least 1");
  if (c.trip_paths.empty() && !c.demand_path) {
    throw ConfigError("config must name [data] trips or [data] demand");
  }

  if (auto v = get("split", "train")) c.train.ratios.train = parse_number<double>(*v, "split.train");
  if (auto v = get("split", "val")) c.train.ratios.val = parse_number<double>(*v, "split.val");
  if (auto v = get("split", "test")) c.train.ratios.test = parse_number<double>(*v, "split.test");

  if (auto v = get("train", "learning_rate")) c.train.learning_rate = parse_number<double>(*v, "train.learning_rate");
  if (auto v = get("train", "epochs")) c.train.epochs = parse_number<std::size_t>(*v, "train.epochs");
  if (auto v = get("train", "batch_size")) c.train.batch_size = parse_number<std::size_t>(*v, "train.batch_size");
  if (auto v = get("train", "patience")) c.train.patience = parse_number<std::size_t>(*v, "train.patience");
  if (auto v = get("train", "seed")) c.train.seed = parse_number<std::uint64_t>(*v, "train.seed");
  c.train.validate();

  ModelSpec defaults;
  defaults.window = c.window;
  defaults.widths = {c.window, 32, 16, 1};
  std::vector<std::size_t> rec_widths{1, 16};
  if (auto v = get("models", "widths")) defaults.widths = parse_widths(*v, "models.widths");
  if (auto v = get("models", "rec_widths")) rec_widths = parse_widths(*v, "models.rec_widths");
  if (auto v = get("models", "lstm_hidden")) defaults.lstm_hidden = parse_number<std::size_t>(*v, "models.lstm_hidden");
  if (auto v = get("models", "activation")) defaults.hidden_activation = activation_from_string(*v);
  if (auto v = get("models", "lasso_lambda")) defaults.lasso_lambda = parse_number<double>(*v, "models.lasso_lambda");
  const std::string run = get("models", "run").value_or("gcnn-rec-ddgf, gcnn-reg-ddgf, mlp, lstm, ha, lasso");
  for (const auto& entry : split_list(run)) c.models.push_back(parse_model_entry(entry, defaults, rec_widths));
  if (c.models.empty()) throw ConfigError("models.run lists no models");

  if (auto v = get("graph", "sd_threshold_km")) c.graph.sd_threshold_km = parse_number<double>(*v, "graph.sd_threshold_km");
  for (auto kind : {GraphKind::SparseDistance, GraphKind::Demand, GraphKind::AverageTripDuration,
                    GraphKind::DemandCorrelation}) {
    if (auto v = ini.get("graph", "filter." + std::string(to_string(kind)))) c.filter_paths[kind] = *v;
  }

  if (auto v = get("output", "dir")) c.output_dir = *v;
  // Where the artifacts land is not part of the experiment.
  c.config_hash = hex64(fnv1a64(ini.canonical({"output"})));
  return c;
}

void ExperimentConfig::validate_paths() const {
  namespace fs = std::filesystem;
  std::vector<std::string> missing;
  for (const auto& p : trip_paths) {
    if (!fs::exists(p)) missing.push_back(p);
  }
  if (demand_path && !fs::exists(*demand_path)) missing.push_back(*demand_path);
  for (const auto& [kind, p] : filter_paths) {
    if (!fs::exists(p)) missing.push_back(p);
  }
  if (!missing.empty()) {
    std::string msg = "config references missing paths:";
    for (const auto& m : missing) msg += " " + m;
    throw ConfigError(msg);
  }
}

ExperimentConfig load_experiment(const std::string& path) {
  if (!std::filesystem::exists(path)) throw ConfigError("config file '" + path + "' does not exist");
  return ExperimentConfig::from_ini(IniFile::load(path));
}

}  // namespace ddgf
