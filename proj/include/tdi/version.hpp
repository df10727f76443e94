#pragma once

namespace tdi {

inline constexpr const char* kToolName = "tdisim";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace tdi
