#pragma once

#include <string>

#include "ddgf/graph.hpp"
#include "ddgf/models.hpp"

namespace ddgf {

// .mdl container: manifest lists spec, scaler, stations and every tensor's
// name, role (param/frozen), shape and element offset into the f64le payload.
void save_model(const std::string& path, const TrainedModel& model);
TrainedModel load_model(const std::string& path);

// Learned filter of DDGF layer `layer` (1-based) as a GraphFilter.
GraphFilter export_filter(const TrainedModel& model, std::size_t layer);

}  // namespace ddgf
