#pragma once

namespace opiqsdc {

// Kernels that have an OpenMP path keep a serial reference path with identical output.
enum class Execution { Serial, Parallel };

}  // namespace opiqsdc
