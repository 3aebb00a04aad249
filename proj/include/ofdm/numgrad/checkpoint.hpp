#pragma once

#include <string>
#include <vector>

#include "ofdm/numgrad/diff_array.hpp"

namespace ofdm::ng {

// Named-array container. Byte layout (all little-endian) is documented in
// docs/formats.md:
//   "NGARRAY1" | u32 version | u32 meta_len | meta bytes | u32 count |
//   count x { u32 name_len | name | u32 rank | u64 dims[rank] | f64 values[] }
struct StoredArray {
  std::string name;
  Shape shape;
  Eigen::ArrayXd values;
};

struct ArchiveContents {
  std::string metadata;  // free text; JSON by convention
  std::vector<StoredArray> arrays;

  const StoredArray& find(const std::string& name) const;
  bool contains(const std::string& name) const;
};

inline constexpr std::uint32_t kArchiveVersion = 1;

void save_archive(const std::string& path, const ArchiveContents& contents);
ArchiveContents load_archive(const std::string& path);

std::vector<StoredArray> snapshot(const ParameterList& params);
// Overwrites the values of each parameter from the archive entry of the same
// name; shapes must match exactly.
void restore(ParameterList& params, const ArchiveContents& contents);

}  // namespace ofdm::ng
