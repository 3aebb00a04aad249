#include "ofdm/numgrad/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "ofdm/errors.hpp"

namespace ofdm::ng {

static_assert(std::endian::native == std::endian::little, "archive I/O assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'N', 'G', 'A', 'R', 'R', 'A', 'Y', '1'};

template <typename T>
void put(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& in, const std::string& path, const char* what) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) {
    throw ParseError(path + ": truncated archive while reading " + what);
  }
  return v;
}

std::string get_string(std::ifstream& in, const std::string& path, std::uint32_t len, const char* what) {
  std::string s(len, '\0');
  if (len && !in.read(s.data(), len)) throw ParseError(path + ": truncated archive while reading " + what);
  return s;
}

}  // namespace

const StoredArray& ArchiveContents::find(const std::string& name) const {
  for (const auto& a : arrays)
    if (a.name == name) return a;
  throw ParseError("archive has no array named '" + name + "'");
}

bool ArchiveContents::contains(const std::string& name) const {
  for (const auto& a : arrays)
    if (a.name == name) return true;
  return false;
}

void save_archive(const std::string& path, const ArchiveContents& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out.write(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, kArchiveVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(contents.metadata.size()));
  out.write(contents.metadata.data(), static_cast<std::streamsize>(contents.metadata.size()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(contents.arrays.size()));
  for (const auto& a : contents.arrays) {
    if (element_count(a.shape) != static_cast<std::size_t>(a.values.size())) {
      throw ShapeError("array '" + a.name + "' has " + std::to_string(a.values.size()) + " values for shape " +
                       to_string(a.shape));
    }
    put<std::uint32_t>(out, static_cast<std::uint32_t>(a.name.size()));
    out.write(a.name.data(), static_cast<std::streamsize>(a.name.size()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(a.shape.size()));
    for (auto d : a.shape) put<std::uint64_t>(out, d);
    out.write(reinterpret_cast<const char*>(a.values.data()), static_cast<std::streamsize>(a.values.size() * sizeof(double)));
  }
  if (!out) throw Error("write failed for '" + path + "'");
}

ArchiveContents load_archive(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  char magic[8];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(magic)) != 0) {
    throw ParseError(path + ": not a named-array archive (bad magic)");
  }
  const auto version = get<std::uint32_t>(in, path, "version");
  if (version != kArchiveVersion) {
    throw ParseError(path + ": unsupported archive version " + std::to_string(version));
  }
  ArchiveContents c;
  c.metadata = get_string(in, path, get<std::uint32_t>(in, path, "metadata length"), "metadata");
  const auto count = get<std::uint32_t>(in, path, "array count");
  for (std::uint32_t i = 0; i < count; ++i) {
    StoredArray a;
    a.name = get_string(in, path, get<std::uint32_t>(in, path, "name length"), "name");
    const auto rank = get<std::uint32_t>(in, path, "rank");
    if (rank > 16) throw ParseError(path + ": implausible rank " + std::to_string(rank) + " for '" + a.name + "'");
    for (std::uint32_t r = 0; r < rank; ++r) a.shape.push_back(get<std::uint64_t>(in, path, "dimension"));
    const auto n = element_count(a.shape);
    a.values.resize(static_cast<Eigen::Index>(n));
    if (n && !in.read(reinterpret_cast<char*>(a.values.data()), static_cast<std::streamsize>(n * sizeof(double)))) {
      throw ParseError(path + ": truncated values for '" + a.name + "'");
    }
    c.arrays.push_back(std::move(a));
  }
  return c;
}

std::vector<StoredArray> snapshot(const ParameterList& params) {
  std::vector<StoredArray> out;
  for (const auto& p : params) out.push_back({p.name, p.array.shape(), p.array.values()});
  return out;
}

void restore(ParameterList& params, const ArchiveContents& contents) {
  for (auto& p : params) {
    const auto& a = contents.find(p.name);
    if (a.shape != p.array.shape()) {
      throw ShapeError("parameter '" + p.name + "' has shape " + to_string(p.array.shape()) + " but archive stores " +
                       to_string(a.shape));
    }
    p.array.leaf_values() = a.values;
  }
}

}  // namespace ofdm::ng
