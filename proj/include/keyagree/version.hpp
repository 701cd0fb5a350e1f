#pragma once

namespace keyagree {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace keyagree
