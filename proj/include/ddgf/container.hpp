#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ddgf/demand.hpp"

namespace ddgf {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kFormatVersion = 1;

/// On-disk layout shared by .dmx, .gfl and .mdl files:
///
///   bytes 0..7   magic "DDGFCTR1"
///   bytes 8..15  manifest length L, unsigned 64-bit little-endian
///   next L bytes UTF-8 JSON manifest (keys sorted, no whitespace)
///   remainder    payload; element type given by the manifest's "dtype"
///
/// The manifest always carries "format", "format_version" and "tool_version".
struct Container {
  nlohmann::json manifest;
  std::vector<std::uint8_t> payload;
};

void write_container(const std::string& path, const Container& c);
Container read_container(const std::string& path, const std::string& expected_format);

void append_u32le(std::vector<std::uint8_t>& out, std::uint32_t v);
void append_f64le(std::vector<std::uint8_t>& out, double v);
std::vector<std::uint32_t> decode_u32le(std::span<const std::uint8_t> bytes);
std::vector<double> decode_f64le(std::span<const std::uint8_t> bytes);

nlohmann::json base_manifest(const std::string& format);

void save_demand(const std::string& path, const DemandMatrix& d);
DemandMatrix load_demand(const std::string& path);

// 64-bit FNV-1a, used for config provenance hashes.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

}  // namespace ddgf
