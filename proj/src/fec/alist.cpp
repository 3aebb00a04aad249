#include "ofdm/fec/alist.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "ofdm/errors.hpp"

namespace ofdm {

namespace {

class Tokens {
 public:
  Tokens(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

  // Reads the next line as exactly `count` integers (or at least `count` when
  // trailing zero padding is permitted).
  std::vector<long> line(std::size_t count, const char* what, bool allow_padding = false) {
    std::string text;
    while (true) {
      if (!std::getline(in_, text)) fail(std::string("unexpected end of file reading ") + what);
      ++line_no_;
      if (text.find_first_not_of(" \t\r") != std::string::npos) break;
    }
    std::istringstream ls(text);
    std::vector<long> v;
    std::string tok;
    while (ls >> tok) {
      std::size_t used = 0;
      long x = 0;
      try {
        x = std::stol(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size()) fail(std::string("non-integer token '") + tok + "' in " + what);
      v.push_back(x);
    }
    if (allow_padding) {
      while (v.size() > count && v.back() == 0) v.pop_back();
    }
    if (v.size() != count) {
      fail(std::string(what) + ": expected " + std::to_string(count) + " values, found " + std::to_string(v.size()));
    }
    return v;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(source_ + ":" + std::to_string(line_no_) + ": " + msg);
  }

 private:
  std::istream& in_;
  std::string source_;
  int line_no_ = 0;
};

}  // namespace

LdpcCode read_alist(std::istream& in, const std::string& source) {
  Tokens t(in, source);
  const auto dims = t.line(2, "header (N M)");
  const long N = dims[0], M = dims[1];
  if (N < 1 || M < 1 || N > (1 << 24) || M > (1 << 24)) t.fail("implausible dimensions");
  const auto maxdeg = t.line(2, "maximum degrees");
  const auto col_deg = t.line(static_cast<std::size_t>(N), "column degrees");
  const auto row_deg = t.line(static_cast<std::size_t>(M), "row degrees");
  if (*std::max_element(col_deg.begin(), col_deg.end()) != maxdeg[0] ||
      *std::max_element(row_deg.begin(), row_deg.end()) != maxdeg[1]) {
    t.fail("maximum degrees do not match the degree lists");
  }

  std::vector<std::vector<int>> by_var(static_cast<std::size_t>(N));
  long col_edges = 0;
  for (long j = 0; j < N; ++j) {
    if (col_deg[j] < 0) t.fail("negative column degree");
    const auto ids = t.line(static_cast<std::size_t>(col_deg[j]), "variable adjacency", true);
    for (long c : ids) {
      if (c < 1 || c > M) t.fail("check index " + std::to_string(c) + " out of range 1.." + std::to_string(M));
      by_var[j].push_back(static_cast<int>(c - 1));
    }
    col_edges += col_deg[j];
  }
  std::vector<std::vector<int>> checks(static_cast<std::size_t>(M));
  long row_edges = 0;
  for (long i = 0; i < M; ++i) {
    if (row_deg[i] < 0) t.fail("negative row degree");
    const auto ids = t.line(static_cast<std::size_t>(row_deg[i]), "check adjacency", true);
    for (long v : ids) {
      if (v < 1 || v > N) t.fail("variable index " + std::to_string(v) + " out of range 1.." + std::to_string(N));
      checks[i].push_back(static_cast<int>(v - 1));
    }
    row_edges += row_deg[i];
  }
  if (col_edges != row_edges) t.fail("column and row degree totals differ");

  // Cross-check the two adjacency lists.
  std::vector<std::vector<int>> rebuilt(static_cast<std::size_t>(N));
  for (long i = 0; i < M; ++i)
    for (int v : checks[i]) rebuilt[v].push_back(static_cast<int>(i));
  for (long j = 0; j < N; ++j) {
    auto a = by_var[j];
    std::sort(a.begin(), a.end());
    if (a != rebuilt[j]) t.fail("adjacency lists disagree at variable " + std::to_string(j + 1));
  }
  try {
    return LdpcCode(static_cast<int>(N), std::move(checks));
  } catch (const ConfigError& e) {
    t.fail(e.what());
  }
}

LdpcCode load_alist(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open alist file '" + path + "'");
  return read_alist(in, path);
}

void write_alist(std::ostream& out, const LdpcCode& code) {
  const auto& vars = code.variables();
  const auto& checks = code.checks();
  std::size_t max_col = 0, max_row = 0;
  for (const auto& v : vars) max_col = std::max(max_col, v.size());
  for (const auto& c : checks) max_row = std::max(max_row, c.size());
  out << code.n() << ' ' << code.n_checks() << '\n' << max_col << ' ' << max_row << '\n';
  auto degrees = [&out](const std::vector<std::vector<int>>& adj) {
    for (std::size_t i = 0; i < adj.size(); ++i) out << (i ? " " : "") << adj[i].size();
    out << '\n';
  };
  degrees(vars);
  degrees(checks);
  for (const auto& v : vars) {
    for (std::size_t i = 0; i < v.size(); ++i) out << (i ? " " : "") << v[i] + 1;
    out << '\n';
  }
  for (const auto& c : checks) {
    for (std::size_t i = 0; i < c.size(); ++i) out << (i ? " " : "") << c[i] + 1;
    out << '\n';
  }
}

void save_alist(const std::string& path, const LdpcCode& code) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write alist file '" + path + "'");
  write_alist(out, code);
  if (!out) throw Error("write failed for '" + path + "'");
}

}  // namespace ofdm
