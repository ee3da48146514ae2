#pragma once

// Shared test scaffolding: warning capture and a scratch directory.

#include <filesystem>
#include <string>
#include <vector>

#include "fairmoo/errors.hpp"

namespace fairmoo::test {

// Collects warnings for the lifetime of the object, then restores the
// default stderr handler.
struct WarnCapture {
    std::vector<std::string> messages;

    WarnCapture() {
        set_warning_handler([this](const std::string& m) { messages.push_back(m); });
    }
    ~WarnCapture() { set_warning_handler(nullptr); }

    bool contains(const std::string& needle) const {
        for (const auto& m : messages)
            if (m.find(needle) != std::string::npos) return true;
        return false;
    }
};

// Fresh per-name scratch directory under the system temp root.
inline std::string scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("fairmoo_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir.string();
}

}  // namespace fairmoo::test
