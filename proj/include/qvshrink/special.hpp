#pragma once

namespace qvshrink {

/// log Gamma(x) for x > 0 via the Lanczos approximation (g = 7, 9 terms),
/// relative accuracy better than 1e-13 over the range used here.
double log_gamma(double x);

}  // namespace qvshrink
