#pragma once

namespace sgmtl {

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace sgmtl
