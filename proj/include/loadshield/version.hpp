#pragma once

namespace loadshield {

inline constexpr const char* kToolName = "loadshield";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace loadshield
