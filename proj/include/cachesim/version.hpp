#pragma once

namespace cachesim {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace cachesim
