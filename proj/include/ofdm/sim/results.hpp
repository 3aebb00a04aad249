#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace ofdm {

struct ResultRow {
  std::string scheme;
  double speed_kmh = 0.0;
  double es_n0_db = 0.0;
  double eb_n0_db = 0.0;
  long frames = 0;
  long bit_errors = 0;
  double ber = 0.0;
  double goodput = 0.0;
  std::uint64_t seed = 0;
};

inline constexpr const char* kResultHeader = "scheme,speed_kmh,es_n0_db,eb_n0_db,frames,bit_errors,ber,goodput,seed";

// Doubles are written with 17 significant digits so rows round-trip exactly.
std::string format_row(const ResultRow& row);
void write_results(const std::string& path, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_results(const std::string& path);

// 64-bit FNV-1a of the canonical (sorted-key, compact) JSON text, as hex.
std::string config_hash(const nlohmann::json& config);

struct RunManifest {
  std::string command;
  nlohmann::json config;
  std::uint64_t seed = 0;
  std::vector<std::string> outputs;
};

nlohmann::json manifest_json(const RunManifest& manifest);
void write_manifest(const std::string& path, const RunManifest& manifest);
std::string library_version();

}  // namespace ofdm
