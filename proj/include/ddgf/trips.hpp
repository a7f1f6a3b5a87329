#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ddgf {

enum class UserType { Customer, Subscriber, Unknown };

// Seconds since 1970-01-01 00:00:00 on the naive local clock of the source
// file. No timezone conversion is applied anywhere.
using LocalSeconds = std::int64_t;
// Whole hours since the same origin.
using LocalHour = std::int64_t;

inline LocalHour hour_of(LocalSeconds t) {
  return t >= 0 ? t / 3600 : -((-t + 3599) / 3600);
}
int hour_of_day(LocalHour h);

struct TripRecord {
  double duration_s = 0.0;
  LocalSeconds start_time = 0;
  LocalSeconds end_time = 0;
  std::string start_station;
  std::string end_station;
  std::optional<double> start_lat, start_lon, end_lat, end_lon;
  UserType user_type = UserType::Unknown;
};

struct Rejection {
  std::size_t line = 0;  // 1-based, header is line 1
  std::string reason;    // machine-readable code
  std::string detail;
};

struct ParseResult {
  std::vector<TripRecord> trips;
  std::vector<Rejection> rejections;
};

// Canonical trip fields and the header spellings accepted for each. Header
// cells are normalized (lower case, spaces/underscores removed) before lookup.
struct HeaderAlias {
  std::string_view field;
  std::vector<std::string_view> spellings;
  bool required;
};
const std::vector<HeaderAlias>& header_aliases();

// Accepts "YYYY-MM-DD HH:MM[:SS[.fff]]" and "M/D/YYYY H:MM[:SS]".
std::optional<LocalSeconds> parse_timestamp(std::string_view text);
std::string format_timestamp(LocalSeconds t);

ParseResult parse_trips(std::istream& in);
// Reads a file, transparently decompressing gzip input.
ParseResult parse_trips_file(const std::string& path);

std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace ddgf
