#pragma once

#include <functional>
#include <string_view>

namespace qoptics {

/// Receives non-fatal warnings (adequacy guards, coarse grids).
/// The default sink writes to stderr.
using WarningSink = std::function<void(std::string_view)>;

/// Replace the process-wide sink; returns the previous one.
WarningSink set_warning_sink(WarningSink sink);
void warn(std::string_view message);

} // namespace qoptics
