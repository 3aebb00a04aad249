#include "ofdm/channel/trace.hpp"

#include <bit>
#include <cstring>
#include <filesystem>

#include "ofdm/errors.hpp"

namespace ofdm {

static_assert(std::endian::native == std::endian::little, "trace I/O assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'O', 'T', 'R', 'C'};

template <typename T>
void put(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T take(const char* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return v;
}

}  // namespace

void write_trace(const std::string& path, const std::vector<ChannelRealization>& frames, double carrier_hz) {
  if (frames.empty()) throw Error("write_trace: no frames");
  const auto n_taps = frames[0].n_taps();
  const auto samples = frames[0].n_samples();
  for (const auto& f : frames) {
    if (f.n_taps() != n_taps || f.n_samples() != samples) throw ShapeError("write_trace: frames differ in shape");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out.write(kMagic, 4);
  put<std::uint32_t>(out, 1);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(n_taps));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(samples));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(frames.size()));
  put<double>(out, carrier_hz);
  put<double>(out, frames[0].speed_kmh);
  std::vector<float> row(static_cast<std::size_t>(n_taps) * 2);
  for (const auto& f : frames) {
    for (Eigen::Index t = 0; t < samples; ++t) {
      for (Eigen::Index i = 0; i < n_taps; ++i) {
        row[2 * i] = static_cast<float>(f.taps(t, i).real());
        row[2 * i + 1] = static_cast<float>(f.taps(t, i).imag());
      }
      out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size() * sizeof(float)));
    }
  }
  if (!out) throw Error("write failed for '" + path + "'");
}

TraceReader::TraceReader(const std::string& path) : path_(path), in_(path, std::ios::binary) {
  if (!in_) throw Error("cannot open trace '" + path + "'");
  char buf[kTraceHeaderBytes];
  if (!in_.read(buf, kTraceHeaderBytes)) {
    throw ParseError(path + ": file shorter than the " + std::to_string(kTraceHeaderBytes) + "-byte trace header");
  }
  if (std::memcmp(buf, kMagic, 4) != 0) throw ParseError(path + ": bad magic, not a tap trace");
  header_.version = take<std::uint32_t>(buf + 4);
  header_.n_taps = take<std::uint32_t>(buf + 8);
  header_.samples_per_frame = take<std::uint32_t>(buf + 12);
  header_.frame_count = take<std::uint32_t>(buf + 16);
  header_.carrier_hz = take<double>(buf + 20);
  header_.speed_kmh = take<double>(buf + 28);
  if (header_.version != 1) throw ParseError(path + ": unsupported trace version " + std::to_string(header_.version));
  if (header_.n_taps == 0 || header_.samples_per_frame == 0) {
    throw ParseError(path + ": header declares zero taps or zero samples per frame");
  }
  const auto record = std::uintmax_t(header_.n_taps) * header_.samples_per_frame * 2 * sizeof(float);
  const auto body = std::filesystem::file_size(path) - kTraceHeaderBytes;
  if (body != record * header_.frame_count) {
    throw ParseError(path + ": header declares " + std::to_string(header_.frame_count) + " frame records, found " +
                     std::to_string(body / record) + (body % record ? " plus a partial record" : ""));
  }
}

std::optional<ChannelRealization> TraceReader::next() {
  if (read_ == header_.frame_count) return std::nullopt;
  const auto taps = static_cast<Eigen::Index>(header_.n_taps);
  const auto samples = static_cast<Eigen::Index>(header_.samples_per_frame);
  std::vector<float> buf(static_cast<std::size_t>(taps * samples * 2));
  if (!in_.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(float)))) {
    throw ParseError(path_ + ": truncated while reading frame " + std::to_string(read_));
  }
  ChannelRealization r;
  r.taps.resize(samples, taps);
  for (Eigen::Index t = 0; t < samples; ++t)
    for (Eigen::Index i = 0; i < taps; ++i) {
      const auto k = static_cast<std::size_t>((t * taps + i) * 2);
      r.taps(t, i) = cd(buf[k], buf[k + 1]);
    }
  r.speed_kmh = header_.speed_kmh;
  r.seed = read_;
  r.generator = "trace:" + path_;
  ++read_;
  return r;
}

TraceLoadResult load_trace(const std::string& path, const GridConfig& cfg, int expected_taps) {
  TraceReader reader(path);
  TraceLoadResult out;
  out.header = reader.header();
  if (out.header.samples_per_frame < static_cast<std::uint32_t>(cfg.frame_length())) {
    throw ParseError(path + ": " + std::to_string(out.header.samples_per_frame) +
                     " samples per frame, grid needs " + std::to_string(cfg.frame_length()));
  }
  if (static_cast<int>(out.header.n_taps) != expected_taps) {
    out.warnings.push_back(path + ": trace has " + std::to_string(out.header.n_taps) + " taps, config expects " +
                           std::to_string(expected_taps) + "; using the trace's tap count");
    warn(out.warnings.back());
  }
  while (auto r = reader.next()) out.frames.push_back(std::move(*r));
  return out;
}

}  // namespace ofdm
