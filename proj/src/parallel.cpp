#include "ldsim/parallel.h"

namespace ldsim {

auto default_thread_count() -> unsigned { return std::max(1u, std::thread::hardware_concurrency()); }

}  // namespace ldsim
