#pragma once

#include <string>

namespace smcf {

/// Shortest-stable text form used in every CSV: 17 significant digits.
std::string format_real(double v);

}  // namespace smcf
