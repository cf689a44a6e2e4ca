#include "ldsim/format.h"

#include <fmt/format.h>

namespace ldsim {

auto format_double(double x) -> std::string { return fmt::format("{}", x); }

}  // namespace ldsim
