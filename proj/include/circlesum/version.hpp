#pragma once

namespace circlesum {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace circlesum
