#pragma once

namespace sqglab {

inline constexpr const char* version = "0.1.0";

}  // namespace sqglab
