#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "fcrepair/error.hpp"

namespace fcrepair::detail {

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}  // namespace fcrepair::detail
