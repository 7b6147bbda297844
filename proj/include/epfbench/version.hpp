#pragma once

namespace epf {

inline constexpr const char* kVersion = "0.1.0";

} // namespace epf
