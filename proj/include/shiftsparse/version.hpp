#pragma once

namespace shiftsparse {
inline constexpr const char* kVersion = "0.1.0";
}
