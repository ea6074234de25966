#pragma once

namespace agora {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace agora
