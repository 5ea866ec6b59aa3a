#pragma once

#include <fstream>
#include <sstream>
#include <string>

namespace testing_support {

inline std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string fixture(const std::string& name) {
    return read_text(std::string(SSC_FIXTURE_DIR) + "/" + name);
}

inline std::string golden_path(const std::string& name) {
    return std::string(SSC_GOLDEN_DIR) + "/" + name;
}

} // namespace testing_support
