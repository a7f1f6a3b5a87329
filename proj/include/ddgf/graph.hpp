#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ddgf/demand.hpp"
#include "ddgf/tensor.hpp"
#include "ddgf/trips.hpp"

namespace ddgf {

enum class GraphKind { SparseDistance, Demand, AverageTripDuration, DemandCorrelation, Identity };

std::string_view to_string(GraphKind kind);  // "SD", "DE", "ATD", "DC", "Identity"
GraphKind graph_kind_from_string(std::string_view name);

struct GraphParams {
  double sd_threshold_km = 1.0;
};

/// Fixed station adjacency: symmetric, non-negative, zero diagonal.
struct AdjacencyMatrix {
  GraphKind kind = GraphKind::Identity;
  Tensor values;

  std::size_t n() const { return values.rows(); }
};

/// Normalized filter D^-1/2 (A + I) D^-1/2 for a fixed graph, or a learned
/// filter exported from a trained model.
struct GraphFilter {
  Tensor values;
  std::vector<std::string> stations;
  nlohmann::json provenance = nlohmann::json::object();

  std::size_t n() const { return values.rows(); }
};

double haversine_km(double lat1, double lon1, double lat2, double lon2);

// Pearson r; 0 when either series has zero variance.
double pearson(std::span<const double> x, std::span<const double> y);

// `demand` fixes the station order; trips between stations outside it are
// ignored. Both inputs should cover the training period only.
AdjacencyMatrix build_adjacency(GraphKind kind, const std::vector<TripRecord>& trips,
                                const DemandMatrix& demand, const GraphParams& params = {});

GraphFilter normalize_adjacency(const AdjacencyMatrix& a);

void save_filter(const std::string& path, const GraphFilter& f);
GraphFilter load_filter(const std::string& path);

}  // namespace ddgf
