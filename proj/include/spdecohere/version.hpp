#pragma once

namespace spdecohere {

inline constexpr const char* kVersion = "0.1.0";

} // namespace spdecohere
