#pragma once

namespace ownet {

inline constexpr const char* kVersion = "0.1.0";

} // namespace ownet
