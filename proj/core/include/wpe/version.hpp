#pragma once

namespace wpe {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace wpe
