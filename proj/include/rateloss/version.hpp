#pragma once

namespace rateloss {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace rateloss
