#pragma once

namespace ldips {

// Which implementation of a data-parallel kernel to run. The serial versions
// are the reference the OpenMP versions are tested against.
enum class Kernel { Serial, Parallel };

}  // namespace ldips
