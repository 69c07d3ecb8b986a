#pragma once

namespace kbqa {

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace kbqa
