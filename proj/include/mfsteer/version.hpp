#pragma once

namespace mfsteer {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace mfsteer
