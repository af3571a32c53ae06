#pragma once

namespace arcfit {

/// Selects the driver of a data-parallel kernel. Both drivers produce identical
/// output; Serial is the reference path used by tests and the kernel benchmark.
enum class Exec { Serial, Parallel };

int max_threads();

}  // namespace arcfit
