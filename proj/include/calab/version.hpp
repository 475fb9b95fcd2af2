#pragma once

namespace calab {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kReportSchema = "calab-report/1";

}  // namespace calab
