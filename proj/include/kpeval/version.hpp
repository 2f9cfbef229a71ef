#pragma once

namespace kpeval {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace kpeval
