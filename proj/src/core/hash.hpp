#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace aetas::hash {

// SHA-256 hex digest; used for manifest content addressing.
std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace aetas::hash
