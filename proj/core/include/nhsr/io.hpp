// io.hpp — CSV/JSON emission helpers: full-precision floats, atomic writes.

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace nhsr::io {

// shortest decimal form with 17 significant digits
std::string format_double(double v);

// temp file + rename in the target directory
void write_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace nhsr::io
