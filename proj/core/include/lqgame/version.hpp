#pragma once

namespace lqgame {

inline constexpr const char* kToolName = "lqgame";
inline constexpr const char* kVersion = "0.1.0";

}  // namespace lqgame
