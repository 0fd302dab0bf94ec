#pragma once

namespace carinfo {
inline constexpr const char* kVersion = "0.1.0";
}
