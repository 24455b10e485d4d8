#pragma once

namespace igp {

inline constexpr const char* kToolVersion = "0.1.0";

} // namespace igp
