#pragma once

namespace drplan {

/// Selects between the serial reference implementation of a kernel and its
/// OpenMP variant. Both produce identical results; the serial path is kept as
/// the reference the parallel one is tested against.
enum class ExecPolicy { serial, parallel };

/// Number of worker threads the parallel policy will use (OpenMP default when
/// jobs <= 0).
int effective_jobs(int jobs);

}  // namespace drplan
