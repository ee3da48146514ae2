#include "fairmoo/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>

#include "fairmoo/errors.hpp"
#include "fairmoo/rng.hpp"

namespace fairmoo {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

bool is_missing(const std::string& v) {
    if (v.empty() || v == "?") return true;
    std::string low;
    low.reserve(v.size());
    for (char c : v) low.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    return low == "na" || low == "nan" || low == "n/a" || low == "null";
}

bool parse_number(const std::string& v, double& out) {
    if (v.empty()) return false;
    char* end = nullptr;
    out = std::strtod(v.c_str(), &end);
    return end == v.c_str() + v.size();
}

// One CSV record; quoted fields may hold commas, "" escapes a quote.
std::vector<std::string> split_record(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    fields.push_back(trim(cur));
    return fields;
}

std::string csv_field(const std::string& v) {
    if (v.find_first_of(",\"\n") == std::string::npos) return v;
    std::string out = "\"";
    for (char c : v) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string bucket_name(double v, const std::vector<double>& thresholds) {
    char buf[40];
    for (double t : thresholds) {
        if (v <= t) {
            std::snprintf(buf, sizeof buf, "le%g", t);
            return buf;
        }
    }
    std::snprintf(buf, sizeof buf, "gt%g", thresholds.back());
    return buf;
}

}  // namespace

void Dataset::validate() const {
    if (n < 2) throw DataError("dataset needs at least 2 rows, got " + std::to_string(n));
    if (features.size() != n * dim) throw DataError("feature matrix size mismatch");
    if (feature_names.size() != dim) throw DataError("feature name count mismatch");
    if (labels.size() != n) throw DataError("label count mismatch");
    for (int y : labels) {
        if (y != 0 && y != 1) throw DataError("labels must be 0 or 1");
    }
    if (sensitive_names.empty()) throw DataError("at least one sensitive column required");
    if (sensitive.size() != sensitive_names.size()) throw DataError("sensitive column count mismatch");
    for (const auto& col : sensitive) {
        if (col.size() != n) throw DataError("sensitive column length mismatch");
    }
}

Dataset Dataset::subset(const std::vector<std::size_t>& idx) const {
    Dataset out;
    out.n = idx.size();
    out.dim = dim;
    out.feature_names = feature_names;
    out.sensitive_names = sensitive_names;
    out.features.reserve(out.n * dim);
    out.labels.reserve(out.n);
    out.sensitive.resize(sensitive.size());
    for (auto& col : out.sensitive) col.reserve(out.n);
    for (std::size_t i : idx) {
        if (i >= n) throw DataError("subset index out of range");
        out.features.insert(out.features.end(), row(i), row(i) + dim);
        out.labels.push_back(labels[i]);
        for (std::size_t c = 0; c < sensitive.size(); ++c) {
            out.sensitive[c].push_back(sensitive[c][i]);
        }
    }
    return out;
}

GroupPartition GroupPartition::restrict_to(const std::vector<std::size_t>& idx) const {
    GroupPartition out;
    out.group_names = group_names;
    out.privileged = privileged;
    out.group_sizes.assign(group_sizes.size(), 0);
    out.group_of.reserve(idx.size());
    for (std::size_t i : idx) {
        if (i >= group_of.size()) throw DataError("group restriction index out of range");
        std::size_t g = group_of[i];
        out.group_of.push_back(g);
        ++out.group_sizes[g];
    }
    return out;
}

GroupPartition GroupPartition::compact() const {
    GroupPartition out;
    std::vector<std::size_t> remap(group_sizes.size(), static_cast<std::size_t>(-1));
    for (std::size_t g = 0; g < group_sizes.size(); ++g) {
        if (group_sizes[g] == 0) continue;
        remap[g] = out.group_sizes.size();
        out.group_sizes.push_back(group_sizes[g]);
        if (g < group_names.size()) out.group_names.push_back(group_names[g]);
        if (g < privileged.size()) out.privileged.push_back(privileged[g]);
    }
    out.group_of.reserve(group_of.size());
    for (std::size_t g : group_of) out.group_of.push_back(remap[g]);
    return out;
}

Dataset load_csv(const std::string& path, const CsvOptions& opt) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);

    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty() && line[0] == '#') continue;  // provenance comments
        if (first) {
            header = split_record(line);
            first = false;
            continue;
        }
        if (trim(line).empty()) continue;
        rows.push_back(split_record(line));
    }
    if (first) throw DataError(path + ": empty file");

    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != header.size()) {
            throw DataError(path + ": row " + std::to_string(r + 2) + " has " +
                            std::to_string(rows[r].size()) + " fields, expected " +
                            std::to_string(header.size()));
        }
    }

    auto col_index = [&](const std::string& name) -> std::size_t {
        for (std::size_t j = 0; j < header.size(); ++j) {
            if (header[j] == name) return j;
        }
        throw ConfigError("column '" + name + "' not found in " + path);
    };
    if (opt.sensitive_cols.empty()) throw ConfigError("at least one sensitive column required");
    const std::size_t label_idx = col_index(opt.label_col);
    std::vector<std::size_t> sens_idx;
    for (const auto& name : opt.sensitive_cols) sens_idx.push_back(col_index(name));

    // Rows missing the label or any sensitive value are unusable for group
    // bookkeeping; drop them up front.
    std::vector<std::size_t> keep;
    std::vector<int> labels;
    std::size_t dropped = 0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        bool miss = is_missing(rows[r][label_idx]);
        for (std::size_t s : sens_idx) miss = miss || is_missing(rows[r][s]);
        if (miss) {
            ++dropped;
            continue;
        }
        double y = 0.0;
        if (!parse_number(rows[r][label_idx], y) || (y != 0.0 && y != 1.0)) {
            throw DataError(path + ": row " + std::to_string(r + 2) + " label '" +
                            rows[r][label_idx] + "' is not 0 or 1");
        }
        keep.push_back(r);
        labels.push_back(static_cast<int>(y));
    }
    if (dropped > 0) {
        warn(path + ": dropped " + std::to_string(dropped) +
             " rows with missing label or sensitive value");
    }

    // Sensitive values, with numeric columns bucketed when thresholds are given.
    std::vector<std::vector<std::string>> sens_vals(sens_idx.size());
    for (std::size_t s = 0; s < sens_idx.size(); ++s) {
        auto bucket_it = opt.buckets.find(opt.sensitive_cols[s]);
        sens_vals[s].reserve(keep.size());
        if (bucket_it != opt.buckets.end()) {
            const auto& ts = bucket_it->second;
            if (ts.empty() || !std::is_sorted(ts.begin(), ts.end())) {
                throw ConfigError("bucket thresholds for '" + opt.sensitive_cols[s] +
                                  "' must be non-empty and ascending");
            }
            for (std::size_t r : keep) {
                double v = 0.0;
                if (!parse_number(rows[r][sens_idx[s]], v)) {
                    throw DataError(path + ": sensitive column '" + opt.sensitive_cols[s] +
                                    "' has non-numeric value '" + rows[r][sens_idx[s]] +
                                    "' but bucket thresholds were given");
                }
                sens_vals[s].push_back(bucket_name(v, ts));
            }
        } else {
            for (std::size_t r : keep) sens_vals[s].push_back(rows[r][sens_idx[s]]);
        }
    }

    // Feature assembly, column-major first. Non-sensitive columns in header
    // order: numeric if every present value parses, otherwise one-hot over
    // the sorted categories. Sensitive one-hot blocks go last.
    std::vector<std::vector<double>> cols;
    std::vector<std::string> col_names;
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (j == label_idx) continue;
        if (std::find(sens_idx.begin(), sens_idx.end(), j) != sens_idx.end()) continue;

        bool numeric = true;
        bool any_present = false;
        for (std::size_t r : keep) {
            const std::string& v = rows[r][j];
            if (is_missing(v)) continue;
            any_present = true;
            double tmp = 0.0;
            if (!parse_number(v, tmp)) {
                numeric = false;
                break;
            }
        }
        if (!any_present) {
            warn(path + ": column '" + header[j] + "' has no values; skipped");
            continue;
        }
        if (numeric) {
            double sum = 0.0;
            std::size_t cnt = 0;
            for (std::size_t r : keep) {
                double v = 0.0;
                if (parse_number(rows[r][j], v)) {
                    sum += v;
                    ++cnt;
                }
            }
            const double mean = sum / static_cast<double>(cnt);
            std::vector<double> col;
            col.reserve(keep.size());
            for (std::size_t r : keep) {
                double v = 0.0;
                col.push_back(parse_number(rows[r][j], v) ? v : mean);
            }
            cols.push_back(std::move(col));
            col_names.push_back(header[j]);
        } else {
            std::set<std::string> cat_set;
            for (std::size_t r : keep) {
                if (!is_missing(rows[r][j])) cat_set.insert(rows[r][j]);
            }
            for (const auto& cat : cat_set) {
                std::vector<double> col;
                col.reserve(keep.size());
                for (std::size_t r : keep) col.push_back(rows[r][j] == cat ? 1.0 : 0.0);
                cols.push_back(std::move(col));
                col_names.push_back(header[j] + "=" + cat);
            }
        }
    }
    if (opt.sensitive_in_features) {
        for (std::size_t s = 0; s < sens_idx.size(); ++s) {
            std::set<std::string> cat_set(sens_vals[s].begin(), sens_vals[s].end());
            for (const auto& cat : cat_set) {
                std::vector<double> col;
                col.reserve(keep.size());
                for (const auto& v : sens_vals[s]) col.push_back(v == cat ? 1.0 : 0.0);
                cols.push_back(std::move(col));
                col_names.push_back(opt.sensitive_cols[s] + "=" + cat);
            }
        }
    }

    Dataset ds;
    ds.n = keep.size();
    ds.dim = cols.size();
    ds.feature_names = std::move(col_names);
    ds.labels = std::move(labels);
    ds.sensitive_names = opt.sensitive_cols;
    ds.sensitive = std::move(sens_vals);
    ds.features.resize(ds.n * ds.dim);
    for (std::size_t i = 0; i < ds.n; ++i) {
        for (std::size_t j = 0; j < ds.dim; ++j) ds.features[i * ds.dim + j] = cols[j][i];
    }
    ds.validate();
    return ds;
}

Dataset load_csv(const std::string& path, const std::string& label_col,
                 const std::vector<std::string>& sensitive_cols) {
    CsvOptions opt;
    opt.label_col = label_col;
    opt.sensitive_cols = sensitive_cols;
    return load_csv(path, opt);
}

void write_csv(const Dataset& ds, const std::string& path) { write_csv(ds, path, {}); }

void write_csv(const Dataset& ds, const std::string& path,
               const std::vector<std::string>& comments) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    for (const auto& c : comments) out << "# " << c << "\n";
    for (std::size_t j = 0; j < ds.dim; ++j) out << csv_field(ds.feature_names[j]) << ",";
    for (const auto& name : ds.sensitive_names) out << csv_field(name) << ",";
    out << "label\n";
    for (std::size_t i = 0; i < ds.n; ++i) {
        for (std::size_t j = 0; j < ds.dim; ++j) out << format_g17(ds.at(i, j)) << ",";
        for (std::size_t s = 0; s < ds.sensitive.size(); ++s) out << csv_field(ds.sensitive[s][i]) << ",";
        out << ds.labels[i] << "\n";
    }
    if (!out) throw DataError("write failed for " + path);
}

GroupPartition make_groups(const Dataset& ds, const std::vector<std::string>& attrs,
                           const std::vector<std::string>& privileged_values) {
    if (attrs.empty()) throw ConfigError("make_groups needs at least one attribute");
    if (privileged_values.size() != attrs.size()) {
        throw ConfigError("need one privileged value per attribute");
    }
    std::vector<std::size_t> attr_idx;
    for (const auto& a : attrs) {
        auto it = std::find(ds.sensitive_names.begin(), ds.sensitive_names.end(), a);
        if (it == ds.sensitive_names.end()) {
            throw ConfigError("unknown sensitive attribute '" + a + "'");
        }
        attr_idx.push_back(static_cast<std::size_t>(it - ds.sensitive_names.begin()));
    }

    std::vector<std::vector<std::string>> cats(attrs.size());
    for (std::size_t a = 0; a < attrs.size(); ++a) {
        std::set<std::string> s(ds.sensitive[attr_idx[a]].begin(), ds.sensitive[attr_idx[a]].end());
        cats[a].assign(s.begin(), s.end());
        if (s.count(privileged_values[a]) == 0) {
            warn("privileged value '" + privileged_values[a] + "' never occurs in attribute '" +
                 attrs[a] + "'");
        }
    }

    // Full cross product in lexicographic order; ids are assigned over the
    // combinations that actually occur.
    std::vector<std::string> keys;
    std::vector<char> key_priv;
    std::vector<std::size_t> odo(attrs.size(), 0);
    while (true) {
        std::string key;
        bool priv = true;
        for (std::size_t a = 0; a < attrs.size(); ++a) {
            if (a > 0) key += "|";
            key += cats[a][odo[a]];
            priv = priv && cats[a][odo[a]] == privileged_values[a];
        }
        keys.push_back(key);
        key_priv.push_back(priv ? 1 : 0);
        std::size_t a = attrs.size();
        while (a > 0) {
            --a;
            if (++odo[a] < cats[a].size()) break;
            odo[a] = 0;
            if (a == 0) goto done;
        }
    }
done:;

    std::map<std::string, std::size_t> key_pos;
    for (std::size_t i = 0; i < keys.size(); ++i) key_pos[keys[i]] = i;
    std::vector<std::size_t> counts(keys.size(), 0);
    std::vector<std::size_t> row_key(ds.n);
    for (std::size_t i = 0; i < ds.n; ++i) {
        std::string key;
        for (std::size_t a = 0; a < attrs.size(); ++a) {
            if (a > 0) key += "|";
            key += ds.sensitive[attr_idx[a]][i];
        }
        row_key[i] = key_pos.at(key);
        ++counts[row_key[i]];
    }

    GroupPartition gp;
    std::vector<std::size_t> remap(keys.size(), static_cast<std::size_t>(-1));
    for (std::size_t i = 0; i < keys.size(); ++i) {
        if (counts[i] == 0) {
            warn("group '" + keys[i] + "' has no members; dropped");
            continue;
        }
        remap[i] = gp.group_names.size();
        gp.group_names.push_back(keys[i]);
        gp.group_sizes.push_back(counts[i]);
        gp.privileged.push_back(key_priv[i]);
    }
    gp.group_of.resize(ds.n);
    for (std::size_t i = 0; i < ds.n; ++i) gp.group_of[i] = remap[row_key[i]];
    return gp;
}

std::vector<std::vector<std::size_t>> split_indices(const std::vector<int>& labels,
                                                    const SplitSpec& spec) {
    const std::size_t n = labels.size();
    const std::size_t p = spec.ratios.size();
    if (p < 2) throw ConfigError("split needs at least 2 parts");
    double sum = 0.0;
    for (double r : spec.ratios) {
        if (r <= 0.0) throw ConfigError("split ratios must be positive");
        sum += r;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("split ratios must sum to 1");

    // Global sizes: floors, remainder to the first part.
    std::vector<std::size_t> want(p);
    std::size_t assigned = 0;
    for (std::size_t j = 0; j < p; ++j) {
        want[j] = static_cast<std::size_t>(std::floor(static_cast<double>(n) * spec.ratios[j]));
        assigned += want[j];
    }
    want[0] += n - assigned;

    // One shuffled pool per label class; each class hands its floor share to
    // every part, then leftovers fill the remaining deficits in part order.
    // Summed class floors never exceed the global floor, so deficits stay
    // non-negative and the fill is exact.
    std::map<int, std::vector<std::size_t>> pools;
    for (std::size_t i = 0; i < n; ++i) pools[labels[i]].push_back(i);
    Rng rng(spec.seed);
    for (auto& [cls, pool] : pools) {
        (void)cls;
        rng.shuffle(pool);
    }

    std::vector<std::vector<std::size_t>> parts(p);
    std::vector<std::size_t> deficit = want;
    for (auto& [cls, pool] : pools) {
        (void)cls;
        std::size_t off = 0;
        for (std::size_t j = 0; j < p; ++j) {
            auto q = static_cast<std::size_t>(
                std::floor(static_cast<double>(pool.size()) * spec.ratios[j]));
            q = std::min(q, deficit[j]);
            parts[j].insert(parts[j].end(), pool.begin() + off, pool.begin() + off + q);
            deficit[j] -= q;
            off += q;
        }
        std::size_t j = 0;
        while (off < pool.size()) {
            while (j < p && deficit[j] == 0) ++j;
            if (j == p) throw DataError("split bookkeeping underflow");
            parts[j].push_back(pool[off++]);
            --deficit[j];
        }
    }
    for (std::size_t j = 0; j < p; ++j) {
        if (parts[j].empty()) {
            throw DataError("split part " + std::to_string(j) + " is empty (n=" +
                            std::to_string(n) + ")");
        }
        std::sort(parts[j].begin(), parts[j].end());
    }
    return parts;
}

std::vector<Dataset> split(const Dataset& ds, const SplitSpec& spec) {
    auto parts = split_indices(ds.labels, spec);
    std::vector<Dataset> out;
    out.reserve(parts.size());
    for (const auto& idx : parts) out.push_back(ds.subset(idx));
    return out;
}

std::vector<std::string> default_part_names(std::size_t parts) {
    if (parts == 3) return {"train", "validation", "test"};
    if (parts == 4) return {"train", "validation", "ensemble", "test"};
    std::vector<std::string> names;
    for (std::size_t i = 0; i < parts; ++i) names.push_back("part" + std::to_string(i));
    return names;
}

Dataset synth_biased(std::size_t n, std::size_t d, double bias, std::uint64_t seed) {
    if (n < 20) throw ConfigError("synth_biased needs n >= 20");
    if (d < 2) throw ConfigError("synth_biased needs d >= 2");
    if (bias < 0.0 || bias > 1.0) throw ConfigError("bias must be in [0,1]");

    Rng rng(seed);
    // Label signal sized for a Bayes error around ten percent: a noisier
    // task keeps confusion cells populated, so ratio metrics stay informative
    // instead of folding to 1 whenever a group's error count hits zero.
    std::vector<double> label_coef(d), group_coef(d);
    for (std::size_t j = 0; j < d; ++j) label_coef[j] = rng.uniform(0.4, 0.75);
    for (std::size_t j = 0; j < d; ++j) group_coef[j] = rng.uniform(0.05, 0.25);

    Dataset ds;
    ds.n = n;
    ds.dim = d;
    for (std::size_t j = 0; j < d; ++j) ds.feature_names.push_back("x" + std::to_string(j));
    ds.sensitive_names = {"group"};
    ds.sensitive.resize(1);
    ds.features.reserve(n * d);
    ds.labels.reserve(n);
    ds.sensitive[0].reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const bool priv = rng.uniform() < 0.5;
        const double pos_rate = 0.5 + (priv ? bias : -bias) / 2.0;
        const int y = rng.uniform() < pos_rate ? 1 : 0;
        ds.labels.push_back(y);
        ds.sensitive[0].push_back(priv ? "A" : "B");
        const double ysign = y == 1 ? 1.0 : -1.0;
        const double gsign = priv ? 1.0 : -1.0;
        for (std::size_t j = 0; j < d; ++j) {
            ds.features.push_back(ysign * label_coef[j] + gsign * group_coef[j] + rng.normal(1.0));
        }
    }
    ds.validate();
    return ds;
}

}  // namespace fairmoo
