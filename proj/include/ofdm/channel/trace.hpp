#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "ofdm/channel/realization.hpp"
#include "ofdm/core/grid.hpp"

namespace ofdm {

// Binary tap-trace file (little-endian), see docs/formats.md:
//   offset 0  char[4] "OTRC"
//          4  u32 version (1)
//          8  u32 n_taps
//         12  u32 samples_per_frame
//         16  u32 frame_count
//         20  f64 carrier_hz
//         28  f64 speed_kmh
//         36  frames: frame_count x samples x n_taps x {f32 re, f32 im}, row-major (time, tap)
struct TraceHeader {
  std::uint32_t version = 1;
  std::uint32_t n_taps = 0;
  std::uint32_t samples_per_frame = 0;
  std::uint32_t frame_count = 0;
  double carrier_hz = 0.0;
  double speed_kmh = 0.0;
};

inline constexpr std::size_t kTraceHeaderBytes = 36;

void write_trace(const std::string& path, const std::vector<ChannelRealization>& frames, double carrier_hz);

// Streams realizations in file order.
class TraceReader {
 public:
  explicit TraceReader(const std::string& path);
  const TraceHeader& header() const { return header_; }
  std::optional<ChannelRealization> next();

 private:
  std::string path_;
  std::ifstream in_;
  TraceHeader header_;
  std::uint32_t read_ = 0;
};

struct TraceLoadResult {
  TraceHeader header;
  std::vector<ChannelRealization> frames;
  std::vector<std::string> warnings;
};

// Loads a whole trace and checks it against the grid. A tap count other than
// expected_taps is accepted (the trace wins) and reported as a warning.
TraceLoadResult load_trace(const std::string& path, const GridConfig& cfg, int expected_taps);

}  // namespace ofdm
