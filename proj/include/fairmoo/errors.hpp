#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace fairmoo {

/// Bad user-supplied configuration (unknown column, invalid spec value, ...).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent data (ragged rows, non-binary labels, empty split parts, ...).
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Input outside a mathematical domain (nonpositive benefit, alpha in {0,1}, ...).
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Gradient descent produced NaN/Inf, with diagnostic context.
struct TrainingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Survival/mating selection called with an impossible request.
struct SelectionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Report generation over incompatible or missing run artifacts.
struct ReportError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Non-fatal conditions (dropped empty group, clipped point, ...) are routed
/// here. Defaults to stderr; tests may capture.
void warn(const std::string& message);
void set_warning_handler(std::function<void(const std::string&)> handler);

}  // namespace fairmoo
