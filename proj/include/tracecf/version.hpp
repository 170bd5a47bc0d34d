#pragma once

namespace tracecf {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace tracecf
