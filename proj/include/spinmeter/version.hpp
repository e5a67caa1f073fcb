#pragma once

namespace spinmeter {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace spinmeter
