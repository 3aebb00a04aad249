#include "ofdm/sim/results.hpp"

#include <Eigen/Core>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ofdm/errors.hpp"

#ifndef OFDM_VERSION
#define OFDM_VERSION "0.0.0"
#endif

namespace ofdm {

namespace {

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::string format_row(const ResultRow& r) {
  if (r.scheme.find_first_of(",\n") != std::string::npos) throw ConfigError("scheme id '" + r.scheme + "' contains a separator");
  std::string s = r.scheme;
  for (double x : {r.speed_kmh, r.es_n0_db, r.eb_n0_db}) s += "," + g17(x);
  s += "," + std::to_string(r.frames) + "," + std::to_string(r.bit_errors);
  s += "," + g17(r.ber) + "," + g17(r.goodput) + "," + std::to_string(r.seed);
  return s;
}

void write_results(const std::string& path, const std::vector<ResultRow>& rows) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << kResultHeader << '\n';
  for (const auto& r : rows) out << format_row(r) << '\n';
  if (!out) throw Error("write failed: " + path);
}

std::vector<ResultRow> read_results(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != kResultHeader) {
    throw ParseError(path + ":1: expected header '" + kResultHeader + "'");
  }
  std::vector<ResultRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 9) throw ParseError(path + ":" + std::to_string(lineno) + ": expected 9 fields, got " + std::to_string(f.size()));
    try {
      std::size_t used = 0;
      auto num = [&](const std::string& s) {
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
      };
      auto integer = [&](const std::string& s) {
        const long long v = std::stoll(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
      };
      ResultRow r;
      r.scheme = f[0];
      r.speed_kmh = num(f[1]);
      r.es_n0_db = num(f[2]);
      r.eb_n0_db = num(f[3]);
      r.frames = static_cast<long>(integer(f[4]));
      r.bit_errors = static_cast<long>(integer(f[5]));
      r.ber = num(f[6]);
      r.goodput = num(f[7]);
      r.seed = std::stoull(f[8], &used);
      if (used != f[8].size()) throw std::invalid_argument(f[8]);
      rows.push_back(r);
    } catch (const std::logic_error&) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": malformed number");
    }
  }
  return rows;
}

std::string config_hash(const nlohmann::json& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : config.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

std::string library_version() { return OFDM_VERSION; }

nlohmann::json manifest_json(const RunManifest& m) {
  nlohmann::json j;
  j["command"] = m.command;
  j["config_hash"] = config_hash(m.config);
  j["seed"] = m.seed;
  j["outputs"] = m.outputs;
  j["versions"] = {
      {"ofdm", library_version()},
      {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                    std::to_string(EIGEN_MINOR_VERSION)},
      {"compiler", __VERSION__},
      {"json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." + std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                   std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
  };
  j["config"] = m.config;
  return j;
}

void write_manifest(const std::string& path, const RunManifest& manifest) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << manifest_json(manifest).dump(2) << '\n';
}

}  // namespace ofdm
