#pragma once

namespace epswae {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace epswae
