#pragma once

namespace hos {

inline constexpr const char* kVersion = "hoslab 0.1.0";

} // namespace hos
