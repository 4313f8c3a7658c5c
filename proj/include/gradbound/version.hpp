#pragma once

namespace gradbound {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace gradbound
