#pragma once

namespace rfsense {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace rfsense
