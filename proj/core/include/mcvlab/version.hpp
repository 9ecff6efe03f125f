#pragma once

namespace mcvlab {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace mcvlab
