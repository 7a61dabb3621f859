#pragma once

#include <string>

namespace esocp {

/// Shortest round-trip decimal representation; +inf is written as "inf".
std::string format_double(double value);

}  // namespace esocp
