#include "ddgf/demand.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include "ddgf/error.hpp"

namespace ddgf {

DemandMatrix::DemandMatrix(std::vector<std::string> stations, LocalHour t0, std::size_t hours,
                           std::vector<std::uint32_t> counts)
    : stations_(std::move(stations)), t0_(t0), hours_(hours), counts_(std::move(counts)) {
  if (counts_.size() != stations_.size() * hours_) {
    throw DataError("demand matrix has " + std::to_string(counts_.size()) + " counts for " +
                    std::to_string(stations_.size()) + " stations x " + std::to_string(hours_) +
                    " hours");
  }
}

int DemandMatrix::hour_of_day(std::size_t column) const {
  return ddgf::hour_of_day(t0_ + static_cast<LocalHour>(column));
}

std::uint64_t DemandMatrix::total() const {
  std::uint64_t s = 0;
  for (auto c : counts_) s += c;
  return s;
}

Tensor DemandMatrix::slice(std::size_t begin, std::size_t count) const {
  if (begin + count > hours_) throw ShapeError("demand slice out of range");
  Tensor out(stations_.size(), count);
  for (std::size_t j = 0; j < stations_.size(); ++j)
    for (std::size_t i = 0; i < count; ++i) out(j, i) = at(j, begin + i);
  return out;
}

DemandMatrix DemandMatrix::columns(std::size_t begin, std::size_t count) const {
  if (begin + count > hours_) throw ShapeError("demand column range out of range");
  std::vector<std::uint32_t> counts;
  counts.reserve(stations_.size() * count);
  for (std::size_t j = 0; j < stations_.size(); ++j)
    for (std::size_t i = 0; i < count; ++i) counts.push_back(at(j, begin + i));
  return DemandMatrix(stations_, t0_ + static_cast<LocalHour>(begin), count, std::move(counts));
}

std::optional<std::size_t> DemandMatrix::index_of(const std::string& station) const {
  const auto it = std::find(stations_.begin(), stations_.end(), station);
  if (it == stations_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - stations_.begin());
}

DemandMatrix DemandMatrix::restrict_to(const std::vector<std::string>& stations,
                                       std::vector<std::string>* dropped) const {
  std::vector<std::string> kept;
  std::vector<std::uint32_t> counts;
  for (const auto& s : stations) {
    const auto j = index_of(s);
    if (!j) {
      if (dropped) dropped->push_back(s);
      continue;
    }
    kept.push_back(s);
    for (std::size_t i = 0; i < hours_; ++i) counts.push_back(at(*j, i));
  }
  return DemandMatrix(std::move(kept), t0_, hours_, std::move(counts));
}

DemandMatrix build_demand_matrix(const std::vector<TripRecord>& trips,
                                 const std::optional<std::set<std::string>>& station_filter) {
  if (trips.empty()) throw DataError("cannot build a demand matrix from zero trips");

  LocalHour first = std::numeric_limits<LocalHour>::max();
  LocalHour last = std::numeric_limits<LocalHour>::min();
  std::map<std::string, std::size_t> index;
  for (const auto& t : trips) {
    const LocalHour h = hour_of(t.start_time);
    first = std::min(first, h);
    last = std::max(last, h);
    if (!station_filter || station_filter->contains(t.start_station)) index.emplace(t.start_station, 0);
  }
  if (index.empty()) throw DataError("station filter excludes every trip");

  std::vector<std::string> stations;
  for (auto& [id, k] : index) {
    k = stations.size();
    stations.push_back(id);
  }
  const auto hours = static_cast<std::size_t>(last - first + 1);
  std::vector<std::uint32_t> counts(stations.size() * hours, 0);
  for (const auto& t : trips) {
    const auto it = index.find(t.start_station);
    if (it == index.end()) continue;
    const auto col = static_cast<std::size_t>(hour_of(t.start_time) - first);
    ++counts[it->second * hours + col];
  }
  return DemandMatrix(std::move(stations), first, hours, std::move(counts));
}

}  // namespace ddgf
