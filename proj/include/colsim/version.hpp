#pragma once

#define COLSIM_VERSION_MAJOR 0
#define COLSIM_VERSION_MINOR 1
#define COLSIM_VERSION_PATCH 0

namespace colsim {

inline constexpr const char* version_string = "0.1.0";

}  // namespace colsim
