#pragma once

namespace sfpca {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace sfpca
