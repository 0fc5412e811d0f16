#pragma once

namespace light {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace light
