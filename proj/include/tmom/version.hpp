#pragma once

namespace tmom {

inline constexpr const char* version = "0.1.0";

}  // namespace tmom
