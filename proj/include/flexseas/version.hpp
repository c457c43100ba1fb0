#pragma once

#define FLEXSEAS_VERSION "0.1.0"

namespace flexseas {
inline constexpr const char* kVersion = FLEXSEAS_VERSION;
}
