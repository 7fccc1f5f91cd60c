#pragma once

namespace odlearn {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace odlearn
