#pragma once

namespace scieval {

inline constexpr const char* kEngineVersion = "0.1.0";

}  // namespace scieval
