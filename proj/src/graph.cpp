#include "ddgf/graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "ddgf/container.hpp"
#include "ddgf/error.hpp"

namespace ddgf {

namespace {

constexpr double kEarthRadiusKm = 6371.0;

struct Coord {
  double lat_sum = 0.0;
  double lon_sum = 0.0;
  std::size_t count = 0;
};

void check_adjacency(const AdjacencyMatrix& a) {
  const Tensor& v = a.values;
  if (v.rows() != v.cols()) throw ShapeError("adjacency is not square: " + v.shape_string());
  for (std::size_t i = 0; i < v.rows(); ++i) {
    for (std::size_t j = 0; j < v.cols(); ++j) {
      if (v(i, j) != v(j, i)) throw ContractError("adjacency is not symmetric");
      if (!(v(i, j) >= 0.0)) throw ContractError("adjacency has a negative or NaN entry");
    }
  }
}

}  // namespace

std::string_view to_string(GraphKind kind) {
  switch (kind) {
    case GraphKind::SparseDistance:
      return "SD";
    case GraphKind::Demand:
      return "DE";
    case GraphKind::AverageTripDuration:
      return "ATD";
    case GraphKind::DemandCorrelation:
      return "DC";
    case GraphKind::Identity:
      return "Identity";
  }
  return "Identity";
}

GraphKind graph_kind_from_string(std::string_view name) {
  if (name == "SD") return GraphKind::SparseDistance;
  if (name == "DE") return GraphKind::Demand;
  if (name == "ATD") return GraphKind::AverageTripDuration;
  if (name == "DC") return GraphKind::DemandCorrelation;
  if (name == "Identity" || name == "I") return GraphKind::Identity;
  throw ConfigError("unknown graph kind '" + std::string(name) + "' (expected SD, DE, ATD, DC, Identity)");
}

double haversine_km(double lat1, double lon1, double lat2, double lon2) {
  constexpr double kRad = std::numbers::pi / 180.0;
  const double dlat = (lat2 - lat1) * kRad;
  const double dlon = (lon2 - lon1) * kRad;
  const double s = std::sin(dlat / 2) * std::sin(dlat / 2) +
                   std::cos(lat1 * kRad) * std::cos(lat2 * kRad) * std::sin(dlon / 2) * std::sin(dlon / 2);
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(s)));
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw ShapeError("pearson: series lengths differ (" + std::to_string(x.size()) + " vs " +
                     std::to_string(y.size()) + ")");
  }
  if (x.size() < 2) throw ShapeError("pearson: need at least two observations");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double dx = x[k] - mx, dy = y[k] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

AdjacencyMatrix build_adjacency(GraphKind kind, const std::vector<TripRecord>& trips,
                                const DemandMatrix& demand, const GraphParams& params) {
  const std::size_t n = demand.stations_count();
  std::map<std::string, std::size_t> index;
  for (std::size_t j = 0; j < n; ++j) index.emplace(demand.stations()[j], j);

  AdjacencyMatrix a{kind, Tensor(n, n)};
  Tensor& v = a.values;

  switch (kind) {
    case GraphKind::Identity:
      break;

    case GraphKind::SparseDistance: {
      std::vector<Coord> coords(n);
      auto add = [&](const std::string& station, const std::optional<double>& lat,
                     const std::optional<double>& lon) {
        const auto it = index.find(station);
        if (it == index.end() || !lat || !lon) return;
        coords[it->second].lat_sum += *lat;
        coords[it->second].lon_sum += *lon;
        ++coords[it->second].count;
      };
      for (const auto& t : trips) {
        add(t.start_station, t.start_lat, t.start_lon);
        add(t.end_station, t.end_lat, t.end_lon);
      }
      std::string missing;
      for (std::size_t j = 0; j < n; ++j) {
        if (coords[j].count == 0) missing += " " + demand.stations()[j];
      }
      if (!missing.empty()) throw DataError("no coordinates for stations:" + missing);
      for (std::size_t i = 0; i < n; ++i) {
        const double lat_i = coords[i].lat_sum / static_cast<double>(coords[i].count);
        const double lon_i = coords[i].lon_sum / static_cast<double>(coords[i].count);
        for (std::size_t j = i + 1; j < n; ++j) {
          const double lat_j = coords[j].lat_sum / static_cast<double>(coords[j].count);
          const double lon_j = coords[j].lon_sum / static_cast<double>(coords[j].count);
          const double d = haversine_km(lat_i, lon_i, lat_j, lon_j);
          // Co-located stations get no edge rather than an infinite weight.
          const double w = (d > 0.0 && d <= params.sd_threshold_km) ? 1.0 / d : 0.0;
          v(i, j) = w;
          v(j, i) = w;
        }
      }
      break;
    }

    case GraphKind::Demand:
    case GraphKind::AverageTripDuration: {
      Tensor count(n, n), duration(n, n);
      for (const auto& t : trips) {
        const auto si = index.find(t.start_station);
        const auto ei = index.find(t.end_station);
        if (si == index.end() || ei == index.end() || si->second == ei->second) continue;
        const std::size_t i = std::min(si->second, ei->second);
        const std::size_t j = std::max(si->second, ei->second);
        count(i, j) += 1.0;
        duration(i, j) += t.duration_s;
      }
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
          double w = count(i, j);
          if (kind == GraphKind::AverageTripDuration) w = w > 0.0 ? duration(i, j) / w : 0.0;
          v(i, j) = w;
          v(j, i) = w;
        }
      }
      break;
    }

    case GraphKind::DemandCorrelation: {
      if (demand.hours() < 2) throw DataError("demand correlation needs at least two hours");
      std::vector<std::vector<double>> series(n);
      for (std::size_t j = 0; j < n; ++j) {
        series[j].resize(demand.hours());
        for (std::size_t h = 0; h < demand.hours(); ++h) series[j][h] = demand.at(j, h);
      }
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
          const double w = std::max(0.0, pearson(series[i], series[j]));
          v(i, j) = w;
          v(j, i) = w;
        }
      }
      break;
    }
  }
  for (std::size_t i = 0; i < n; ++i) v(i, i) = 0.0;
  return a;
}

GraphFilter normalize_adjacency(const AdjacencyMatrix& a) {
  check_adjacency(a);
  const std::size_t n = a.n();
  Tensor tilde = a.values;
  for (std::size_t i = 0; i < n; ++i) tilde(i, i) += 1.0;
  std::vector<double> inv_sqrt_deg(n);
  for (std::size_t i = 0; i < n; ++i) {
    double deg = 0.0;
    for (std::size_t j = 0; j < n; ++j) deg += tilde(i, j);
    inv_sqrt_deg[i] = 1.0 / std::sqrt(deg);
  }
  GraphFilter f;
  f.values = Tensor(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double w = inv_sqrt_deg[i] * tilde(i, j) * inv_sqrt_deg[j];
      f.values(i, j) = w;
      f.values(j, i) = w;
    }
  }
  f.provenance = {{"kind", std::string(to_string(a.kind))}, {"normalization", "sym_self_loops"}};
  return f;
}

void save_filter(const std::string& path, const GraphFilter& f) {
  if (f.values.rows() != f.values.cols()) throw ShapeError("graph filter is not square");
  Container c;
  c.manifest = base_manifest("gfl");
  c.manifest["n"] = f.n();
  c.manifest["stations"] = f.stations;
  c.manifest["provenance"] = f.provenance;
  c.manifest["dtype"] = "f64le";
  c.manifest["layout"] = "row-major, station x station";
  for (double v : f.values.values()) append_f64le(c.payload, v);
  write_container(path, c);
}

GraphFilter load_filter(const std::string& path) {
  const Container c = read_container(path, "gfl");
  try {
    GraphFilter f;
    const auto n = c.manifest.at("n").get<std::size_t>();
    f.stations = c.manifest.at("stations").get<std::vector<std::string>>();
    f.provenance = c.manifest.value("provenance", nlohmann::json::object());
    f.values = Tensor(n, n, decode_f64le(c.payload));
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("'" + path + "': bad gfl manifest: " + e.what());
  } catch (const ShapeError& e) {
    throw DataError("'" + path + "': payload does not match manifest: " + e.what());
  }
}

}  // namespace ddgf
