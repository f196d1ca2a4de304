#pragma once

namespace ldips {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace ldips
