#include "ddgf/checkpoint.hpp"

#include "ddgf/container.hpp"
#include "ddgf/error.hpp"

namespace ddgf {

void save_model(const std::string& path, const TrainedModel& model) {
  Container c;
  c.manifest = base_manifest("mdl");
  c.manifest["spec"] = model.spec.to_json();
  c.manifest["scaler"] = {{"min", model.scaler.min()}, {"max", model.scaler.max()}};
  c.manifest["stations"] = model.stations;
  c.manifest["provenance"] = model.provenance;
  c.manifest["dtype"] = "f64le";
  nlohmann::json tensors = nlohmann::json::array();
  std::size_t offset = 0;
  auto emit = [&](const ParamMap& map, const char* role) {
    for (const auto& [name, t] : map) {
      tensors.push_back({{"name", name}, {"role", role}, {"rows", t.rows()}, {"cols", t.cols()},
                         {"offset", offset}});
      for (double v : t.values()) append_f64le(c.payload, v);
      offset += t.size();
    }
  };
  emit(model.params, "param");
  emit(model.frozen, "frozen");
  c.manifest["tensors"] = tensors;
  write_container(path, c);
}

TrainedModel load_model(const std::string& path) {
  const Container c = read_container(path, "mdl");
  TrainedModel m;
  try {
    m.spec = ModelSpec::from_json(c.manifest.at("spec"));
    m.scaler = Scaler(c.manifest.at("scaler").at("min").get<double>(),
                      c.manifest.at("scaler").at("max").get<double>());
    m.stations = c.manifest.at("stations").get<std::vector<std::string>>();
    m.provenance = c.manifest.value("provenance", nlohmann::json::object());
    const std::vector<double> values = decode_f64le(c.payload);
    for (const auto& t : c.manifest.at("tensors")) {
      const auto rows = t.at("rows").get<std::size_t>();
      const auto cols = t.at("cols").get<std::size_t>();
      const auto offset = t.at("offset").get<std::size_t>();
      if (offset + rows * cols > values.size()) throw DataError("'" + path + "': tensor exceeds payload");
      Tensor tensor(rows, cols,
                    std::vector<double>(values.begin() + static_cast<std::ptrdiff_t>(offset),
                                        values.begin() + static_cast<std::ptrdiff_t>(offset + rows * cols)));
      auto& target = t.at("role").get<std::string>() == "frozen" ? m.frozen : m.params;
      target.emplace(t.at("name").get<std::string>(), std::move(tensor));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError("'" + path + "': bad mdl manifest: " + e.what());
  }
  for (const auto& s : parameter_shapes(m.spec, m.station_count())) {
    const auto it = m.params.find(s.name);
    if (it == m.params.end() || it->second.rows() != s.rows || it->second.cols() != s.cols) {
      throw DataError("'" + path + "': parameter '" + s.name + "' missing or misshapen");
    }
  }
  if (m.params.size() != parameter_shapes(m.spec, m.station_count()).size()) {
    throw DataError("'" + path + "': unexpected extra parameters");
  }
  return m;
}

GraphFilter export_filter(const TrainedModel& model, std::size_t layer) {
  const auto filters = model.learned_filters();
  if (filters.empty()) {
    throw ConfigError(model.spec.display_name() + " has no learned graph filter");
  }
  if (layer == 0 || layer > filters.size()) {
    throw ConfigError("layer must be in 1.." + std::to_string(filters.size()));
  }
  GraphFilter f;
  f.values = filters[layer - 1];
  f.stations = model.stations;
  f.provenance = {{"kind", "learned"}, {"model", model.spec.display_name()}, {"layer", layer}};
  return f;
}

}  // namespace ddgf
