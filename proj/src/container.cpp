#include "ddgf/container.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "ddgf/error.hpp"

namespace ddgf {

namespace {

constexpr char kMagic[8] = {'D', 'D', 'G', 'F', 'C', 'T', 'R', '1'};

std::uint64_t read_u64le(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

}  // namespace

void append_u32le(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void append_f64le(std::vector<std::uint8_t>& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

std::vector<std::uint32_t> decode_u32le(std::span<const std::uint8_t> bytes) {
  if (bytes.size() % 4 != 0) throw DataError("u32 payload length is not a multiple of 4");
  std::vector<std::uint32_t> out(bytes.size() / 4);
  for (std::size_t k = 0; k < out.size(); ++k) {
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | bytes[4 * k + static_cast<std::size_t>(i)];
    out[k] = v;
  }
  return out;
}

std::vector<double> decode_f64le(std::span<const std::uint8_t> bytes) {
  if (bytes.size() % 8 != 0) throw DataError("f64 payload length is not a multiple of 8");
  std::vector<double> out(bytes.size() / 8);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = std::bit_cast<double>(read_u64le(&bytes[8 * k]));
  return out;
}

nlohmann::json base_manifest(const std::string& format) {
  return {{"format", format}, {"format_version", kFormatVersion}, {"tool_version", kToolVersion}};
}

void write_container(const std::string& path, const Container& c) {
  const std::string manifest = c.manifest.dump();
  std::vector<std::uint8_t> header(kMagic, kMagic + 8);
  const auto len = static_cast<std::uint64_t>(manifest.size());
  for (int i = 0; i < 8; ++i) header.push_back(static_cast<std::uint8_t>(len >> (8 * i)));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  out.write(reinterpret_cast<const char*>(header.data()), static_cast<std::streamsize>(header.size()));
  out.write(manifest.data(), static_cast<std::streamsize>(manifest.size()));
  out.write(reinterpret_cast<const char*>(c.payload.data()),
            static_cast<std::streamsize>(c.payload.size()));
  if (!out) throw IoError("write failed for '" + path + "'");
}

Container read_container(const std::string& path, const std::string& expected_format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kMagic, 8) != 0) {
    throw DataError("'" + path + "' is not a ddgf container");
  }
  const std::uint64_t len = read_u64le(&bytes[8]);
  if (len > bytes.size() - 16) throw DataError("'" + path + "' has a truncated manifest");
  Container c;
  try {
    c.manifest = nlohmann::json::parse(bytes.begin() + 16, bytes.begin() + 16 + static_cast<std::ptrdiff_t>(len));
  } catch (const nlohmann::json::exception& e) {
    throw DataError("'" + path + "' has an unreadable manifest: " + e.what());
  }
  if (c.manifest.value("format", "") != expected_format) {
    throw DataError("'" + path + "' is a '" + c.manifest.value("format", "?") +
                    "' container, expected '" + expected_format + "'");
  }
  if (c.manifest.value("format_version", 0) != kFormatVersion) {
    throw DataError("'" + path + "' has unsupported format version");
  }
  c.payload.assign(bytes.begin() + 16 + static_cast<std::ptrdiff_t>(len), bytes.end());
  return c;
}

void save_demand(const std::string& path, const DemandMatrix& d) {
  Container c;
  c.manifest = base_manifest("dmx");
  c.manifest["stations"] = d.stations();
  c.manifest["t0_hour"] = d.t0();
  c.manifest["t0"] = format_timestamp(d.t0() * 3600);
  c.manifest["n"] = d.stations_count();
  c.manifest["t"] = d.hours();
  c.manifest["dtype"] = "u32le";
  c.manifest["layout"] = "row-major, station x hour";
  c.payload.reserve(d.counts().size() * 4);
  for (auto v : d.counts()) append_u32le(c.payload, v);
  write_container(path, c);
}

DemandMatrix load_demand(const std::string& path) {
  const Container c = read_container(path, "dmx");
  try {
    auto stations = c.manifest.at("stations").get<std::vector<std::string>>();
    const auto t0 = c.manifest.at("t0_hour").get<LocalHour>();
    const auto n = c.manifest.at("n").get<std::size_t>();
    const auto t = c.manifest.at("t").get<std::size_t>();
    if (stations.size() != n) throw DataError("'" + path + "': station list length differs from n");
    return DemandMatrix(std::move(stations), t0, t, decode_u32le(c.payload));
  } catch (const nlohmann::json::exception& e) {
    throw DataError("'" + path + "': bad dmx manifest: " + e.what());
  }
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = kDigits[v & 0xf];
    v >>= 4;
  }
  return s;
}

}  // namespace ddgf
