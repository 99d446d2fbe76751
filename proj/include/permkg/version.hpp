#pragma once

namespace permkg {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace permkg
