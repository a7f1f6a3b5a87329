#include "ddgf/trips.hpp"

#include <zlib.h>

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "ddgf/error.hpp"

namespace ddgf {

namespace {

// Howard Hinnant's days_from_civil.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m > 2 ? m - 3 : m + 9) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp < 10 ? mp + 3 : mp - 9;
  y += m <= 2;
}

bool days_in_month_ok(std::int64_t y, unsigned m, unsigned d) {
  static constexpr std::array<unsigned, 12> kDays{31, 29, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (m < 1 || m > 12 || d < 1 || d > kDays[m - 1]) return false;
  if (m == 2 && d == 29) {
    const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
    return leap;
  }
  return true;
}

// Reads an unsigned decimal from text[pos..], advancing pos.
bool read_uint(std::string_view text, std::size_t& pos, std::int64_t& out, std::size_t max_digits) {
  const std::size_t start = pos;
  out = 0;
  while (pos < text.size() && pos - start < max_digits && text[pos] >= '0' && text[pos] <= '9') {
    out = out * 10 + (text[pos] - '0');
    ++pos;
  }
  return pos > start;
}

bool expect(std::string_view text, std::size_t& pos, char c) {
  if (pos < text.size() && text[pos] == c) {
    ++pos;
    return true;
  }
  return false;
}

std::string normalize_header(std::string_view cell) {
  std::string out;
  for (char c : cell) {
    if (c == ' ' || c == '_' || c == '"' || c == '\r' || c == '\t') continue;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  // Strip a UTF-8 byte-order mark.
  if (out.size() >= 3 && static_cast<unsigned char>(out[0]) == 0xEF) out.erase(0, 3);
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

std::optional<double> parse_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

// Station ids are kept as text; "123.0" style floats from some exports are
// reduced to their integer spelling so the same station keys identically.
std::string canonical_station(const std::string& s) {
  const auto dot = s.find('.');
  if (dot != std::string::npos && s.find_first_not_of('0', dot + 1) == std::string::npos &&
      dot > 0 && s.find_first_not_of("0123456789") == dot) {
    return s.substr(0, dot);
  }
  return s;
}

UserType parse_user_type(const std::string& s) {
  std::string lower;
  for (char c : s) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (lower == "subscriber" || lower == "member") return UserType::Subscriber;
  if (lower == "customer" || lower == "casual") return UserType::Customer;
  return UserType::Unknown;
}

ParseResult parse_text(std::istream& in);

}  // namespace

int hour_of_day(LocalHour h) {
  const std::int64_t r = h % 24;
  return static_cast<int>(r < 0 ? r + 24 : r);
}

const std::vector<HeaderAlias>& header_aliases() {
  static const std::vector<HeaderAlias> kAliases = {
      {"duration", {"tripduration", "duration"}, false},
      {"start_time", {"starttime", "startedat", "startdate"}, true},
      {"end_time", {"stoptime", "endtime", "endedat", "enddate"}, true},
      {"start_station", {"startstationid"}, true},
      {"end_station", {"endstationid"}, true},
      {"start_lat", {"startstationlatitude", "startlat"}, false},
      {"start_lon", {"startstationlongitude", "startlng", "startlon"}, false},
      {"end_lat", {"endstationlatitude", "endlat"}, false},
      {"end_lon", {"endstationlongitude", "endlng", "endlon"}, false},
      {"user_type", {"usertype", "membercasual"}, false},
  };
  return kAliases;
}

std::optional<LocalSeconds> parse_timestamp(std::string_view raw) {
  const std::string text = trim(raw);
  std::string_view s = text;
  std::size_t pos = 0;
  std::int64_t year = 0, month = 0, day = 0, hour = 0, minute = 0, second = 0;
  std::int64_t a = 0;
  if (!read_uint(s, pos, a, 4)) return std::nullopt;
  if (pos < s.size() && s[pos] == '-') {
    year = a;
    ++pos;
    if (!read_uint(s, pos, month, 2) || !expect(s, pos, '-') || !read_uint(s, pos, day, 2)) {
      return std::nullopt;
    }
  } else if (pos < s.size() && s[pos] == '/') {
    month = a;
    ++pos;
    if (!read_uint(s, pos, day, 2) || !expect(s, pos, '/') || !read_uint(s, pos, year, 4)) {
      return std::nullopt;
    }
  } else {
    return std::nullopt;
  }
  if (!(expect(s, pos, ' ') || expect(s, pos, 'T'))) return std::nullopt;
  if (!read_uint(s, pos, hour, 2) || !expect(s, pos, ':') || !read_uint(s, pos, minute, 2)) {
    return std::nullopt;
  }
  if (expect(s, pos, ':')) {
    if (!read_uint(s, pos, second, 2)) return std::nullopt;
    if (expect(s, pos, '.')) {
      std::int64_t frac = 0;
      if (!read_uint(s, pos, frac, 9)) return std::nullopt;
    }
  }
  if (pos != s.size()) return std::nullopt;
  if (year < 1900 || !days_in_month_ok(year, static_cast<unsigned>(month), static_cast<unsigned>(day)) ||
      hour > 23 || minute > 59 || second > 60) {
    return std::nullopt;
  }
  const std::int64_t days =
      days_from_civil(year, static_cast<unsigned>(month), static_cast<unsigned>(day));
  return days * 86400 + hour * 3600 + minute * 60 + second;
}

std::string format_timestamp(LocalSeconds t) {
  std::int64_t days = t >= 0 ? t / 86400 : -((-t + 86399) / 86400);
  std::int64_t rem = t - days * 86400;
  std::int64_t y = 0;
  unsigned m = 0, d = 0;
  civil_from_days(days, y, m, d);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04lld-%02u-%02u %02lld:%02lld:%02lld", static_cast<long long>(y),
                m, d, static_cast<long long>(rem / 3600), static_cast<long long>(rem / 60 % 60),
                static_cast<long long>(rem % 60));
  return buf;
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  cells.push_back(std::move(cur));
  return cells;
}

namespace {

ParseResult parse_text(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("trip CSV is empty (no header row)");
  const auto header = split_csv_line(line);

  std::map<std::string, std::size_t> column_of;
  for (std::size_t c = 0; c < header.size(); ++c) column_of.emplace(normalize_header(header[c]), c);

  std::map<std::string_view, std::optional<std::size_t>> field_col;
  std::vector<std::string> missing;
  for (const auto& alias : header_aliases()) {
    std::optional<std::size_t> found;
    for (auto spelling : alias.spellings) {
      const auto it = column_of.find(std::string(spelling));
      if (it != column_of.end()) {
        found = it->second;
        break;
      }
    }
    if (!found && alias.required) missing.emplace_back(alias.field);
    field_col[alias.field] = found;
  }
  if (!missing.empty()) {
    std::string msg = "trip CSV is missing required columns:";
    for (const auto& m : missing) msg += " " + m;
    throw SchemaError(msg);
  }

  ParseResult result;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line);
    auto reject = [&](std::string reason, std::string detail) {
      result.rejections.push_back({line_no, std::move(reason), std::move(detail)});
    };
    if (cells.size() != header.size()) {
      reject("field_count", "expected " + std::to_string(header.size()) + " fields, got " +
                                std::to_string(cells.size()));
      continue;
    }
    auto cell = [&](std::string_view field) -> std::optional<std::string> {
      const auto col = field_col.at(field);
      if (!col) return std::nullopt;
      return trim(cells[*col]);
    };

    TripRecord r;
    const auto st = parse_timestamp(*cell("start_time"));
    const auto et = parse_timestamp(*cell("end_time"));
    if (!st || !et) {
      reject("bad_timestamp", !st ? *cell("start_time") : *cell("end_time"));
      continue;
    }
    r.start_time = *st;
    r.end_time = *et;
    if (r.end_time < r.start_time) {
      reject("negative_duration", "end time precedes start time");
      continue;
    }
    r.start_station = canonical_station(*cell("start_station"));
    r.end_station = canonical_station(*cell("end_station"));
    if (r.start_station.empty() || r.end_station.empty() || r.start_station == "NULL" ||
        r.end_station == "NULL") {
      reject("bad_station", "empty station id");
      continue;
    }
    if (const auto d = cell("duration")) {
      const auto v = parse_double(*d);
      if (!v || *v < 0.0) {
        reject("bad_duration", *d);
        continue;
      }
      r.duration_s = *v;
    } else {
      r.duration_s = static_cast<double>(r.end_time - r.start_time);
    }

    bool coords_ok = true;
    auto coord = [&](std::string_view field, double limit, std::optional<double>& out) {
      const auto text = cell(field);
      if (!text || text->empty()) return;
      const auto v = parse_double(*text);
      if (!v || std::abs(*v) > limit) {
        coords_ok = false;
        return;
      }
      out = *v;
    };
    coord("start_lat", 90.0, r.start_lat);
    coord("start_lon", 180.0, r.start_lon);
    coord("end_lat", 90.0, r.end_lat);
    coord("end_lon", 180.0, r.end_lon);
    if (!coords_ok) {
      reject("bad_coordinate", "latitude/longitude missing or out of range");
      continue;
    }
    if (const auto u = cell("user_type")) r.user_type = parse_user_type(*u);
    result.trips.push_back(std::move(r));
  }
  return result;
}

}  // namespace

ParseResult parse_trips(std::istream& in) { return parse_text(in); }

ParseResult parse_trips_file(const std::string& path) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw IoError("cannot open trip file '" + path + "'");
  unsigned char magic[2] = {0, 0};
  probe.read(reinterpret_cast<char*>(magic), 2);
  probe.close();
  if (magic[0] == 0x1f && magic[1] == 0x8b) {
    gzFile gz = gzopen(path.c_str(), "rb");
    if (gz == nullptr) throw IoError("cannot open gzip trip file '" + path + "'");
    std::string text;
    std::array<char, 1 << 16> buf{};
    int n = 0;
    while ((n = gzread(gz, buf.data(), static_cast<unsigned>(buf.size()))) > 0) {
      text.append(buf.data(), static_cast<std::size_t>(n));
    }
    const bool failed = n < 0;
    gzclose(gz);
    if (failed) throw IoError("corrupt gzip stream in '" + path + "'");
    std::istringstream in(text);
    return parse_text(in);
  }
  std::ifstream in(path, std::ios::binary);
  return parse_text(in);
}

}  // namespace ddgf
