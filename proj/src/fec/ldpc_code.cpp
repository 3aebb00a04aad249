#include "ofdm/fec/ldpc_code.hpp"

#include <algorithm>
#include <bit>

#include "ofdm/errors.hpp"

namespace ofdm {

namespace {

using Row = std::vector<std::uint64_t>;

inline bool get(const Row& r, int j) { return (r[j >> 6] >> (j & 63)) & 1U; }
inline void set(Row& r, int j) { r[j >> 6] |= std::uint64_t{1} << (j & 63); }
inline void xor_into(Row& dst, const Row& src) {
  for (std::size_t w = 0; w < dst.size(); ++w) dst[w] ^= src[w];
}

}  // namespace

LdpcCode::LdpcCode(int n, std::vector<std::vector<int>> checks) : n_(n), checks_(std::move(checks)) {
  if (n < 1) throw ConfigError("LDPC code length must be positive");
  if (checks_.empty()) throw ConfigError("LDPC code has no parity checks");
  vars_.assign(static_cast<std::size_t>(n), {});
  for (std::size_t c = 0; c < checks_.size(); ++c) {
    auto& row = checks_[c];
    std::sort(row.begin(), row.end());
    if (std::adjacent_find(row.begin(), row.end()) != row.end()) {
      throw ConfigError("LDPC check " + std::to_string(c) + " lists a variable twice");
    }
    for (int v : row) {
      if (v < 0 || v >= n) throw ConfigError("LDPC check " + std::to_string(c) + " references variable out of range");
      vars_[static_cast<std::size_t>(v)].push_back(static_cast<int>(c));
    }
    edges_ += static_cast<int>(row.size());
  }

  // Reduced row echelon form of H, pivots chosen from the last column down.
  const std::size_t words = (static_cast<std::size_t>(n) + 63) / 64;
  std::vector<Row> rows(checks_.size(), Row(words, 0));
  for (std::size_t c = 0; c < checks_.size(); ++c)
    for (int v : checks_[c]) set(rows[c], v);

  std::vector<int> pivot_col;
  std::size_t next = 0;
  for (int col = n - 1; col >= 0 && next < rows.size(); --col) {
    std::size_t p = next;
    while (p < rows.size() && !get(rows[p], col)) ++p;
    if (p == rows.size()) continue;
    std::swap(rows[p], rows[next]);
    for (std::size_t r = 0; r < rows.size(); ++r)
      if (r != next && get(rows[r], col)) xor_into(rows[r], rows[next]);
    pivot_col.push_back(col);
    ++next;
  }
  std::vector<char> is_pivot(static_cast<std::size_t>(n), 0);
  for (int c : pivot_col) is_pivot[static_cast<std::size_t>(c)] = 1;
  for (int j = 0; j < n; ++j)
    if (!is_pivot[static_cast<std::size_t>(j)]) info_positions_.push_back(j);
  if (info_positions_.empty()) throw ConfigError("LDPC code has full-rank H: no information bits");

  std::vector<int> info_index(static_cast<std::size_t>(n), -1);
  for (std::size_t i = 0; i < info_positions_.size(); ++i) info_index[info_positions_[i]] = static_cast<int>(i);
  const std::size_t info_words = (info_positions_.size() + 63) / 64;
  parity_positions_ = pivot_col;
  parity_rows_.assign(pivot_col.size(), Row(info_words, 0));
  for (std::size_t r = 0; r < pivot_col.size(); ++r)
    for (int j : info_positions_)
      if (get(rows[r], j)) set(parity_rows_[r], info_index[j]);
}

Bits LdpcCode::encode(std::span<const std::uint8_t> info) const {
  if (static_cast<int>(info.size()) != k()) {
    throw ShapeError("LDPC encode: expected " + std::to_string(k()) + " information bits, got " +
                     std::to_string(info.size()));
  }
  Bits out(static_cast<std::size_t>(n_), 0);
  Row packed((info.size() + 63) / 64, 0);
  for (std::size_t i = 0; i < info.size(); ++i) {
    out[info_positions_[i]] = info[i] & 1U;
    if (info[i] & 1U) set(packed, static_cast<int>(i));
  }
  for (std::size_t r = 0; r < parity_rows_.size(); ++r) {
    int acc = 0;
    for (std::size_t w = 0; w < packed.size(); ++w) acc += std::popcount(parity_rows_[r][w] & packed[w]);
    out[parity_positions_[r]] = static_cast<std::uint8_t>(acc & 1);
  }
  return out;
}

Bits LdpcCode::extract_info(std::span<const std::uint8_t> codeword) const {
  if (static_cast<int>(codeword.size()) != n_) throw ShapeError("LDPC: codeword has wrong length");
  Bits out(info_positions_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = codeword[info_positions_[i]];
  return out;
}

int LdpcCode::unsatisfied_checks(std::span<const std::uint8_t> word) const {
  if (static_cast<int>(word.size()) != n_) throw ShapeError("LDPC: word has wrong length");
  int bad = 0;
  for (const auto& row : checks_) {
    int parity = 0;
    for (int v : row) parity ^= word[v] & 1U;
    bad += parity;
  }
  return bad;
}

bool LdpcCode::satisfies(std::span<const std::uint8_t> word) const { return unsatisfied_checks(word) == 0; }

}  // namespace ofdm
