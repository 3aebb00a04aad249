#include "ofdm/errors.hpp"

#include <iostream>

namespace ofdm {

namespace {
void stderr_sink(const std::string& message) { std::cerr << "warning: " << message << '\n'; }
WarningSink current_sink = &stderr_sink;
}  // namespace

void set_warning_sink(WarningSink sink) { current_sink = sink ? sink : &stderr_sink; }

void warn(const std::string& message) { current_sink(message); }

}  // namespace ofdm
