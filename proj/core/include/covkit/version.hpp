#pragma once

namespace covkit {

inline constexpr const char* version = "0.1.0";

}  // namespace covkit
