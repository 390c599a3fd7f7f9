#pragma once

namespace quadwit {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace quadwit
