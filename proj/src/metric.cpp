#include "fairmoo/metric.hpp"

#include <array>

#include "fairmoo/errors.hpp"

namespace fairmoo {

namespace {

const std::array<std::string, kMetricCount> kNames = {
    "CE",    "ACC",   "FI",     "FG",     "Fair1",  "Fair2",  "Fair3",
    "Fair4", "Fair5", "Fair6",  "Fair7",  "Fair8",  "Fair9",  "Fair10",
    "Fair11", "Fair12", "Fair13", "Fair14", "Fair15", "Fair16",
};

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

}  // namespace

const std::string& metric_name(Metric m) {
    return kNames[static_cast<std::size_t>(m)];
}

Metric metric_from_name(const std::string& name) {
    for (std::size_t i = 0; i < kMetricCount; ++i) {
        if (kNames[i] == name) return static_cast<Metric>(i);
    }
    throw ConfigError("unknown criterion '" + name + "'");
}

bool metric_is_loss(Metric m) {
    return m == Metric::CE || m == Metric::FI || m == Metric::FG;
}

std::vector<Metric> parse_metric_list(const std::string& text) {
    std::vector<Metric> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t comma = text.find(',', start);
        if (comma == std::string::npos) comma = text.size();
        std::string tag = trim(text.substr(start, comma - start));
        if (!tag.empty()) out.push_back(metric_from_name(tag));
        start = comma + 1;
    }
    if (out.empty()) throw ConfigError("empty criterion list");
    return out;
}

std::string format_metric_list(const std::vector<Metric>& metrics) {
    std::string out;
    for (std::size_t i = 0; i < metrics.size(); ++i) {
        if (i > 0) out += ",";
        out += metric_name(metrics[i]);
    }
    return out;
}

}  // namespace fairmoo
