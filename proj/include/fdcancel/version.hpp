#pragma once

namespace fdcancel {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace fdcancel
