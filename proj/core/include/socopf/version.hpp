#pragma once

namespace socopf {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace socopf
