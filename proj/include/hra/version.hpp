#pragma once

namespace hra {

inline constexpr const char* version = "0.1.0";

} // namespace hra
