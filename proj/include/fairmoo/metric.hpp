#pragma once

// Stable criterion tags used in configs, reports, and CSV headers.
//
// Every criterion is minimized with optimum 0: ACC is reported as
// 1 - accuracy, and ratio-form fairness metrics are folded with
// 1 - min(r, 1/r). The confusion-matrix metrics compare a privileged side
// (g1) against the rest (g2):
//   Fair1  average odds difference        Fair9   error-rate ratio
//   Fair2  error-rate difference          Fair10  false-discovery difference
//   Fair3  false-discovery ratio          Fair11  false-positive-rate ratio
//   Fair4  false-positive-rate diff       Fair12  positive-rate ratio
//   Fair5  false-omission difference      Fair13  positive-rate difference
//   Fair6  false-omission ratio           Fair14  true-positive-rate diff
//   Fair7  false-negative-rate diff       Fair15  mean of Fair4 and Fair14
//   Fair8  false-negative-rate ratio      Fair16  precision difference

#include <cstddef>
#include <string>
#include <vector>

namespace fairmoo {

enum class Metric {
    CE,
    ACC,
    FI,  // individual unfairness: generalized entropy of the benefit vector
    FG,  // group unfairness: between-group component of the same index
    Fair1,
    Fair2,
    Fair3,
    Fair4,
    Fair5,
    Fair6,
    Fair7,
    Fair8,
    Fair9,
    Fair10,
    Fair11,
    Fair12,
    Fair13,
    Fair14,
    Fair15,
    Fair16,
};

inline constexpr std::size_t kMetricCount = 20;

const std::string& metric_name(Metric m);

// Exact tag lookup; throws ConfigError on an unknown name.
Metric metric_from_name(const std::string& name);

// Differentiable criteria usable as training losses: CE, FI, FG.
bool metric_is_loss(Metric m);

// Comma-separated tags, e.g. "CE,FI,FG"; whitespace around tags is ignored.
std::vector<Metric> parse_metric_list(const std::string& text);
std::string format_metric_list(const std::vector<Metric>& metrics);

// Predicted probabilities are clamped into [kProbClamp, 1 - kProbClamp] so
// logs and benefits stay finite.
inline constexpr double kProbClamp = 1e-12;

}  // namespace fairmoo
