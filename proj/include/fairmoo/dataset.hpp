#pragma once

// Tabular binary-classification data: CSV loading with one-hot encoding,
// sensitive-group partitions, deterministic stratified splits, and a
// synthetic biased generator for tests.

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace fairmoo {

struct Dataset {
    std::size_t n = 0;
    std::size_t dim = 0;
    std::vector<double> features;  // row-major, n * dim
    std::vector<int> labels;       // each 0 or 1
    std::vector<std::string> feature_names;
    std::vector<std::string> sensitive_names;
    std::vector<std::vector<std::string>> sensitive;  // one column per name, each of length n

    double at(std::size_t row, std::size_t col) const { return features[row * dim + col]; }
    const double* row(std::size_t i) const { return features.data() + i * dim; }

    // Throws DataError if any structural invariant is broken.
    void validate() const;

    // Rows in the given order; indices may repeat.
    Dataset subset(const std::vector<std::size_t>& idx) const;
};

struct GroupPartition {
    std::vector<std::size_t> group_of;    // sample -> group id
    std::vector<std::size_t> group_sizes; // per group; sums to n
    std::vector<std::string> group_names;
    std::vector<char> privileged;         // per group: 1 if in the privileged side

    std::size_t group_count() const { return group_sizes.size(); }
    std::size_t size() const { return group_of.size(); }

    // Partition for a row subset. Group ids and names are kept stable so
    // parts of a split stay comparable; sizes are recomputed and may be zero.
    GroupPartition restrict_to(const std::vector<std::size_t>& idx) const;

    // Drops empty groups and renumbers ids. Group-level statistics only see
    // occupied groups, so this changes no metric value.
    GroupPartition compact() const;
};

struct SplitSpec {
    std::vector<double> ratios;  // positive, summing to 1 within 1e-9
    std::uint64_t seed = 0;
    std::vector<std::string> part_names;  // optional; defaulted when empty
};

struct CsvOptions {
    std::string label_col;
    std::vector<std::string> sensitive_cols;
    // Ascending thresholds per numeric sensitive column; value <= t falls in
    // the bucket of the first threshold it does not exceed.
    std::map<std::string, std::vector<double>> buckets;
    bool sensitive_in_features = true;
};

// Parses a header CSV. Numeric columns become single features, categorical
// ones are one-hot encoded (categories sorted for determinism). Rows with a
// missing label or sensitive value are dropped with a warning; missing
// numeric features are imputed with the column mean; a missing categorical
// value leaves its one-hot block all zero. Sensitive columns are kept
// categorically and, when opt.sensitive_in_features is set, also appended
// one-hot after the regular features.
Dataset load_csv(const std::string& path, const CsvOptions& opt);
Dataset load_csv(const std::string& path, const std::string& label_col,
                 const std::vector<std::string>& sensitive_cols);

// Writes features (one column per name, %.17g), then sensitive columns,
// then the label; load_csv on the result round-trips the numeric content.
// Comments become leading '# ' lines, which load_csv skips.
void write_csv(const Dataset& ds, const std::string& path);
void write_csv(const Dataset& ds, const std::string& path,
               const std::vector<std::string>& comments);

// Groups are the joint categories of the chosen attributes, ids assigned in
// lexicographic key order. Combinations with no members are dropped with a
// warning. A sample matching every privileged value is in the privileged
// side; everything else is unprivileged.
GroupPartition make_groups(const Dataset& ds, const std::vector<std::string>& attrs,
                           const std::vector<std::string>& privileged_values);

// Deterministic stratified split: part sizes are floor(n * ratio) with the
// remainder going to the first part, and each label class is spread across
// parts in proportion. Returns row indices per part (disjoint, covering).
std::vector<std::vector<std::size_t>> split_indices(const std::vector<int>& labels,
                                                    const SplitSpec& spec);
std::vector<Dataset> split(const Dataset& ds, const SplitSpec& spec);

// Default labels for a k-way split: train/validation/test for 3 parts,
// train/validation/ensemble/test for 4, part0..k otherwise.
std::vector<std::string> default_part_names(std::size_t parts);

// Synthetic binary-sensitive dataset whose positive-label rate differs
// between the two groups by about `bias`. Features carry a strong label
// signal and a weak group signal. Byte-identical for a fixed seed.
Dataset synth_biased(std::size_t n, std::size_t d, double bias, std::uint64_t seed);

}  // namespace fairmoo
