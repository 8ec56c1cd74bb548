#pragma once

namespace quphox {

inline constexpr const char* kVersion = "0.1.0";

} // namespace quphox
