#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ddgf/tensor.hpp"
#include "ddgf/trips.hpp"

namespace ddgf {

/// Hourly check-out counts: N stations by T consecutive clock hours.
/// Column i is hour t0 + i; hours without trips are explicit zero columns.
class DemandMatrix {
 public:
  DemandMatrix() = default;
  DemandMatrix(std::vector<std::string> stations, LocalHour t0, std::size_t hours,
               std::vector<std::uint32_t> counts);

  std::size_t stations_count() const { return stations_.size(); }
  std::size_t hours() const { return hours_; }
  LocalHour t0() const { return t0_; }
  const std::vector<std::string>& stations() const { return stations_; }
  const std::vector<std::uint32_t>& counts() const { return counts_; }

  std::uint32_t at(std::size_t station, std::size_t hour) const {
    return counts_[station * hours_ + hour];
  }
  int hour_of_day(std::size_t column) const;
  std::uint64_t total() const;

  // Columns [begin, begin + count) as an N x count tensor.
  Tensor slice(std::size_t begin, std::size_t count) const;
  DemandMatrix columns(std::size_t begin, std::size_t count) const;
  // Keeps only the given stations (in this matrix's order); missing ids are
  // returned in `dropped`.
  DemandMatrix restrict_to(const std::vector<std::string>& stations,
                           std::vector<std::string>* dropped = nullptr) const;
  std::optional<std::size_t> index_of(const std::string& station) const;

  friend bool operator==(const DemandMatrix&, const DemandMatrix&) = default;

 private:
  std::vector<std::string> stations_;
  LocalHour t0_ = 0;
  std::size_t hours_ = 0;
  std::vector<std::uint32_t> counts_;
};

// Counts check-outs per (start station, start hour). The hour range spans the
// earliest to the latest start hour; stations are sorted by id.
DemandMatrix build_demand_matrix(const std::vector<TripRecord>& trips,
                                 const std::optional<std::set<std::string>>& station_filter = {});

}  // namespace ddgf
