#include "fairmoo/errors.hpp"

#include <iostream>
#include <mutex>

namespace fairmoo {

namespace {
std::mutex handler_mutex;
std::function<void(const std::string&)> handler;
}  // namespace

void warn(const std::string& message) {
    std::lock_guard<std::mutex> lock(handler_mutex);
    if (handler) {
        handler(message);
    } else {
        std::cerr << "[warn] " << message << "\n";
    }
}

void set_warning_handler(std::function<void(const std::string&)> new_handler) {
    std::lock_guard<std::mutex> lock(handler_mutex);
    handler = std::move(new_handler);
}

}  // namespace fairmoo
