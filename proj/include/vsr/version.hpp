#pragma once

namespace vsr {

inline constexpr const char* kToolkitVersion = "0.1.0";

}  // namespace vsr
