#ifndef LDSIM_FORMAT_H_
#define LDSIM_FORMAT_H_

#include <string>

namespace ldsim {

// Shortest representation that round-trips; identical bits give identical text.
auto format_double(double x) -> std::string;

}  // namespace ldsim

#endif  // LDSIM_FORMAT_H_
