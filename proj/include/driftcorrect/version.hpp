#pragma once

namespace driftcorrect {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace driftcorrect
