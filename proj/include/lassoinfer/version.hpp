#pragma once

namespace lassoinfer {

inline constexpr const char* kVersion = "lassoinfer 0.1.0";

}  // namespace lassoinfer
