#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ddgf/graph.hpp"
#include "ddgf/models.hpp"
#include "ddgf/train.hpp"

namespace ddgf {

/// Sectioned key = value text. '#' and ';' start comments; keys outside any
/// section land in section "". Later duplicates override earlier ones.
class IniFile {
 public:
  static IniFile parse(const std::string& text, const std::string& origin = "<string>");
  static IniFile load(const std::string& path);

  std::optional<std::string> get(const std::string& section, const std::string& key) const;
  void set(const std::string& section, const std::string& key, std::string value);
  const std::map<std::string, std::map<std::string, std::string>>& sections() const { return values_; }
  // Canonical rendering used for the config hash.
  std::string canonical(const std::set<std::string>& skip = {}) const;

 private:
  std::map<std::string, std::map<std::string, std::string>> values_;
};

struct ExperimentConfig {
  std::vector<std::string> trip_paths;
  std::optional<std::string> demand_path;
  std::optional<std::set<std::string>> station_filter;
  std::size_t window = 24;
  TrainConfig train;
  std::vector<ModelSpec> models;
  GraphParams graph;
  std::map<GraphKind, std::string> filter_paths;
  std::string output_dir = "runs/default";
  std::string config_hash;

  static ExperimentConfig from_ini(const IniFile& ini);
  // Checks the invariants that need the filesystem: input paths exist.
  void validate_paths() const;
};

ExperimentConfig load_experiment(const std::string& path);

// Parses a model list entry: gcnn-reg-ddgf, gcnn-rec-ddgf, gcnn-fixed:DC,
// mlp, lstm, ha, lasso.
ModelSpec parse_model_entry(const std::string& entry, const ModelSpec& defaults,
                            const std::vector<std::size_t>& rec_widths);

std::vector<std::string> split_list(const std::string& text);

}  // namespace ddgf
