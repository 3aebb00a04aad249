#pragma once

#include <iosfwd>
#include <string>

#include "ofdm/fec/ldpc_code.hpp"

namespace ofdm {

// MacKay alist text format (1-based indices, zero padding allowed):
//   N M / max_col_deg max_row_deg / N column degrees / M row degrees /
//   N lines of check indices / M lines of variable indices.
// Both adjacency lists are required and must agree.
LdpcCode read_alist(std::istream& in, const std::string& source = "<stream>");
LdpcCode load_alist(const std::string& path);
void write_alist(std::ostream& out, const LdpcCode& code);
void save_alist(const std::string& path, const LdpcCode& code);

}  // namespace ofdm
