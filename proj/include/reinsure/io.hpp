#pragma once

#include <string>

namespace reinsure {

// Full-precision decimal (%.17g).
std::string fmt_num(double x);

}  // namespace reinsure
