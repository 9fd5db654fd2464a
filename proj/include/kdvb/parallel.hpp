#pragma once

namespace kdvb {

/// Worker count for parallel regions: the OpenMP default, capped by the
/// KDVB_THREADS environment variable when it holds a positive integer.
int worker_count();

}  // namespace kdvb
