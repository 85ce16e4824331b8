#pragma once

#include <filesystem>
#include <string>

namespace mandel {

inline constexpr const char* kToolName = "mcoeff";
inline constexpr const char* kToolVersion = "0.1.0";

/// FNV-1a 64-bit digest of a file's bytes, as "fnv1a64:<hex>".
std::string file_hash(const std::filesystem::path& path);

/// Full command-line front end. Exit codes: 0 success, 1 invariant or
/// runtime failure, 2 usage errors.
int run_cli(int argc, const char* const* argv);

}  // namespace mandel
