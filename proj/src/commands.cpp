#include "fairmoo/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include "json.hpp"

#include "fairmoo/ensemble.hpp"
#include "fairmoo/errors.hpp"
#include "fairmoo/evolve.hpp"
#include "fairmoo/fairmetrics.hpp"
#include "fairmoo/indicators.hpp"
#include "fairmoo/io.hpp"
#include "fairmoo/kernels.hpp"
#include "fairmoo/rng.hpp"

namespace fs = std::filesystem;

namespace fairmoo {

namespace {

using nlohmann::json;

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        out += c;
        if (c == '"') out += '"';
    }
    out += '"';
    return out;
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DataError("cannot create directory " + dir + ": " + ec.message());
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    return out;
}

void finish(std::ofstream& out, const std::string& path) {
    if (!out) throw DataError("write failed for " + path);
}

std::string trial_stem(const std::string& dir, std::size_t t) {
    return dir + "/trial" + std::to_string(t);
}

// trial<k>_history.csv files in ascending trial order.
std::vector<std::string> history_files(const std::string& dir) {
    std::vector<std::pair<std::size_t, std::string>> found;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
        std::string name = entry.path().filename().string();
        const std::string pre = "trial", post = "_history.csv";
        if (name.size() <= pre.size() + post.size()) continue;
        if (name.rfind(pre, 0) != 0 || name.substr(name.size() - post.size()) != post) continue;
        std::string num = name.substr(pre.size(), name.size() - pre.size() - post.size());
        if (num.empty() || num.find_first_not_of("0123456789") != std::string::npos) continue;
        found.emplace_back(std::stoull(num), entry.path().string());
    }
    if (ec) throw DataError("cannot read directory " + dir + ": " + ec.message());
    std::sort(found.begin(), found.end());
    std::vector<std::string> out;
    out.reserve(found.size());
    for (auto& [t, path] : found) out.push_back(std::move(path));
    return out;
}

std::string run_label(const std::string& dir) {
    fs::path p(dir);
    if (!p.has_filename()) p = p.parent_path();  // trailing slash
    std::string name = p.filename().string();
    return name.empty() ? dir : name;
}

const char* verdict_symbol(RankSumVerdict v) {
    switch (v) {
        case RankSumVerdict::better: return "+";
        case RankSumVerdict::worse: return "−";
        default: return "≈";
    }
}

}  // namespace

void cmd_train(const TrainOptions& opt) {
    ExperimentSpec spec = load_experiment(opt.spec_path);
    if (!opt.out_dir.empty()) spec.out_dir = opt.out_dir;
    if (spec.out_dir.empty())
        throw ConfigError("no output directory: set 'out' in the spec or pass --out");
    ensure_dir(spec.out_dir);

    {
        auto out = open_out(spec.out_dir + "/spec.txt");
        out << "# spec " << hex_digest(spec.digest) << "\n" << spec.canonical;
        finish(out, spec.out_dir + "/spec.txt");
    }

    SplitParts data = build_data(spec);
    RunConfig cfg = spec.run;
    cfg.net.input_dim = data.parts[data.train].dim;
    cfg.validate();

    for (std::size_t t = 0; t < spec.trials; ++t) {
        cfg.seed = spec.trial_seed(t);
        auto [pop, hist] = run(cfg, data.parts[data.train], data.groups[data.train],
                               data.parts[data.val], data.groups[data.val]);

        std::string stem = trial_stem(spec.out_dir, t);
        write_history_csv(stem + "_history.csv", hist, spec.digest);
        write_population_jsonl(stem + "_population.jsonl",
                               {pop, cfg.net, cfg.criteria, cfg.alpha, spec.digest, cfg.seed});

        double total = std::accumulate(hist.wall_seconds.begin(), hist.wall_seconds.end(), 0.0);
        {
            auto log = open_out(stem + "_log.txt");
            log << "spec " << hex_digest(spec.digest) << "\n";
            log << "trial " << t << "\n";
            log << "seed " << cfg.seed << "\n";
            log << "kernels " << kern::active().name << "\n";
            log << "rows";
            for (std::size_t p = 0; p < data.parts.size(); ++p)
                log << " " << data.names[p] << "=" << data.parts[p].n;
            log << "\n";
            log << "generation_seeds";
            for (auto s : hist.generation_seeds) log << " " << s;
            log << "\n";
            log << "wall_seconds";
            for (double w : hist.wall_seconds) log << " " << g17(w);
            log << "\ntotal_seconds " << g17(total) << "\n";
            finish(log, stem + "_log.txt");
        }
        std::cout << "trial " << t << ": " << cfg.generations << " generations, " << g17(total)
                  << "s, " << stem << "_history.csv\n";
    }
}

void cmd_synth(const SynthOptions& opt) {
    if (opt.out_path.empty()) throw ConfigError("synth needs --out");
    Dataset ds = synth_biased(opt.n, opt.dim, opt.bias, opt.seed);
    std::ostringstream recipe;
    recipe << "synth n=" << opt.n << " dim=" << opt.dim << " bias=" << g17(opt.bias);
    write_csv(ds, opt.out_path, {recipe.str(), "seed " + std::to_string(opt.seed)});
    std::cout << "wrote " << ds.n << " rows to " << opt.out_path << "\n";
}

void cmd_ensemble(const EnsembleOptions& opt) {
    ExperimentSpec spec = load_experiment(opt.spec_path);
    PopulationDump dump = read_population_jsonl(opt.population_path);
    if (opt.out_dir.empty()) throw ConfigError("ensemble needs --out");
    if (dump.pop.empty()) throw DataError(opt.population_path + ": no members");

    SplitParts data = build_data(spec);
    const Dataset& sel_data = data.parts[data.sel];
    const Dataset& test_data = data.parts[data.test];
    if (dump.net.input_dim != sel_data.dim)
        throw DataError("population dump expects " + std::to_string(dump.net.input_dim) +
                        " features, data has " + std::to_string(sel_data.dim));

    std::vector<EnsembleStrategy> strategies;
    if (!opt.strategies.empty()) {
        for (const auto& name : opt.strategies)
            strategies.push_back(ensemble_strategy_from_name(name));
    } else {
        strategies = spec.strategies;
    }
    std::size_t e = opt.size ? opt.size : spec.ensemble_size;
    std::vector<Metric> report_criteria =
        opt.criteria.empty() ? spec.report_criteria : parse_metric_list(opt.criteria);

    ensure_dir(opt.out_dir);

    // Selection scores on the selection part, one row per dump member.
    GroupPartition sel_part = data.groups[data.sel].compact();
    std::vector<std::vector<double>> rows;
    rows.reserve(dump.pop.size());
    for (const auto& ind : dump.pop)
        rows.push_back(
            evaluate(dump.net, ind.genome, sel_data, sel_part, dump.criteria, dump.alpha));
    auto ce_it = std::find(dump.criteria.begin(), dump.criteria.end(), Metric::CE);
    std::size_t ce_index = ce_it == dump.criteria.end()
                               ? std::string::npos
                               : static_cast<std::size_t>(ce_it - dump.criteria.begin());

    GroupPartition test_part = data.groups[data.test].compact();
    std::string report_path = opt.out_dir + "/ensemble_report.csv";
    auto report = open_out(report_path);
    report << "# fairmoo ensemble report\n";
    report << "# spec " << hex_digest(spec.digest) << "\n";
    report << "# population " << hex_digest(dump.digest) << " seed " << dump.seed << "\n";
    report << "strategy,members";
    for (Metric m : report_criteria) report << "," << metric_name(m);
    report << ",gmean\n";

    for (EnsembleStrategy strategy : strategies) {
        auto idx = select_indices(rows, strategy, e, ce_index);
        Ensemble ens;
        ens.net = dump.net;
        for (std::size_t i : idx) ens.members.push_back(dump.pop[i].genome);

        auto vals = evaluate_ensemble(ens, test_data, test_part, report_criteria, dump.alpha);
        report << ensemble_strategy_name(strategy) << "," << idx.size();
        for (double v : vals) report << "," << g17(v);
        report << "," << g17(g_mean(vals)) << "\n";

        auto test_objectives =
            evaluate_ensemble(ens, test_data, test_part, dump.criteria, dump.alpha);
        json manifest;
        manifest["kind"] = "fairmoo_ensemble";
        manifest["spec"] = hex_digest(spec.digest);
        manifest["population"] = hex_digest(dump.digest);
        manifest["seed"] = dump.seed;
        manifest["strategy"] = ensemble_strategy_name(strategy);
        manifest["requested_size"] = e;
        manifest["members"] = idx;
        json crit = json::array();
        for (Metric m : dump.criteria) crit.push_back(metric_name(m));
        manifest["criteria"] = crit;
        manifest["test_objectives"] = test_objectives;
        std::string mpath =
            opt.out_dir + "/ensemble_" + ensemble_strategy_name(strategy) + "_manifest.json";
        auto mout = open_out(mpath);
        mout << manifest.dump(2) << "\n";
        finish(mout, mpath);
    }
    finish(report, report_path);
    std::cout << "wrote " << report_path << "\n";
}

void cmd_report(const ReportOptions& opt) {
    if (opt.run_dirs.empty()) throw ConfigError("report needs at least one run directory");
    if (opt.out_dir.empty()) throw ConfigError("report needs --out");
    if (!(opt.alpha_sig > 0.0 && opt.alpha_sig < 1.0))
        throw ConfigError("--alpha-sig must be in (0, 1)");

    struct RunData {
        std::string label;
        std::string dir;
        std::vector<RunHistory> trials;
    };
    std::vector<RunData> runs;
    std::vector<Metric> criteria;
    for (const auto& dir : opt.run_dirs) {
        RunData rd;
        rd.dir = dir;
        rd.label = run_label(dir);
        for (const auto& path : history_files(dir)) rd.trials.push_back(read_history_csv(path));
        if (rd.trials.empty()) throw ReportError("no trial histories in " + dir);
        for (const auto& h : rd.trials) {
            if (criteria.empty()) criteria = h.criteria;
            if (h.criteria != criteria)
                throw ReportError(dir + ": criteria differ across runs; reports need one set");
        }
        for (const auto& h : rd.trials)
            if (h.objectives.size() != rd.trials[0].objectives.size())
                throw ReportError(dir + ": trials disagree on generation count");
        runs.push_back(std::move(rd));
    }
    // Duplicate labels would merge rows downstream; disambiguate by index.
    for (std::size_t i = 0; i < runs.size(); ++i)
        for (std::size_t j = i + 1; j < runs.size(); ++j)
            if (runs[j].label == runs[i].label) runs[j].label += "#" + std::to_string(j);

    std::vector<Metric> tags =
        opt.objectives.empty() ? criteria : parse_metric_list(opt.objectives);
    std::vector<std::size_t> cols;
    for (Metric m : tags) {
        auto it = std::find(criteria.begin(), criteria.end(), m);
        if (it == criteria.end())
            throw ConfigError("objective " + metric_name(m) + " is not among the run criteria");
        cols.push_back(static_cast<std::size_t>(it - criteria.begin()));
    }
    auto project = [&](const std::vector<std::vector<double>>& gen) {
        std::vector<std::vector<double>> out(gen.size(), std::vector<double>(cols.size()));
        for (std::size_t i = 0; i < gen.size(); ++i)
            for (std::size_t k = 0; k < cols.size(); ++k) out[i][k] = gen[i][cols[k]];
        return out;
    };

    // Reference front over every solution of every run, trial and
    // generation; all indicator values are relative to it.
    std::vector<std::vector<std::vector<double>>> pooled;
    for (const auto& rd : runs)
        for (const auto& h : rd.trials)
            for (const auto& gen : h.objectives) pooled.push_back(project(gen));
    PseudoFront front = build_pseudo_front(pooled);

    ensure_dir(opt.out_dir);
    auto run_comments = [&](std::ofstream& out) {
        out << "# criteria " << format_metric_list(tags) << "\n";
        for (const auto& rd : runs) {
            out << "# run " << csv_quote(rd.label) << " dir " << rd.dir << " trials "
                << rd.trials.size() << " seeds";
            for (const auto& h : rd.trials) out << " " << h.seed;
            out << "\n";
        }
    };

    {
        std::string path = opt.out_dir + "/front.csv";
        auto out = open_out(path);
        out << "# fairmoo pooled front\n";
        run_comments(out);
        for (std::size_t k = 0; k < tags.size(); ++k)
            out << (k ? "," : "") << metric_name(tags[k]);
        out << "\n";
        for (const auto& p : front.points) {
            for (std::size_t k = 0; k < p.size(); ++k) out << (k ? "," : "") << g17(p[k]);
            out << "\n";
        }
        finish(out, path);
    }

    // hv[run][trial][gen], cpf likewise.
    std::vector<std::vector<std::vector<double>>> hv(runs.size()), cov(runs.size());
    for (std::size_t r = 0; r < runs.size(); ++r) {
        for (const auto& h : runs[r].trials) {
            std::vector<double> hv_t, cov_t;
            for (const auto& gen : h.objectives) {
                auto pts = project(gen);
                hv_t.push_back(hypervolume(normalize(pts, front)).value);
                cov_t.push_back(cpf(pts, front));
            }
            hv[r].push_back(std::move(hv_t));
            cov[r].push_back(std::move(cov_t));
        }
    }

    {
        std::string path = opt.out_dir + "/curves.csv";
        auto out = open_out(path);
        out << "# fairmoo per-generation trial means\n";
        run_comments(out);
        out << "run,generation,hv,cpf\n";
        for (std::size_t r = 0; r < runs.size(); ++r) {
            std::size_t gens = hv[r][0].size();
            for (std::size_t g = 0; g < gens; ++g) {
                double mh = 0.0, mc = 0.0;
                for (std::size_t t = 0; t < hv[r].size(); ++t) {
                    mh += hv[r][t][g];
                    mc += cov[r][t][g];
                }
                mh /= static_cast<double>(hv[r].size());
                mc /= static_cast<double>(hv[r].size());
                out << csv_quote(runs[r].label) << "," << g << "," << g17(mh) << "," << g17(mc)
                    << "\n";
            }
        }
        finish(out, path);
    }

    {
        std::string path = opt.out_dir + "/final.csv";
        auto out = open_out(path);
        out << "# fairmoo final-generation indicators per trial\n";
        run_comments(out);
        out << "run,trial,hv,cpf\n";
        for (std::size_t r = 0; r < runs.size(); ++r)
            for (std::size_t t = 0; t < hv[r].size(); ++t)
                out << csv_quote(runs[r].label) << "," << t << "," << g17(hv[r][t].back()) << ","
                    << g17(cov[r][t].back()) << "\n";
        finish(out, path);
    }

    if (runs.size() >= 2) {
        bool enough = true;
        for (const auto& per_run : hv) enough = enough && per_run.size() >= 3;
        if (!enough) {
            warn("rank-sum verdicts need at least 3 trials per run; verdicts.csv skipped");
        } else {
            std::string path = opt.out_dir + "/verdicts.csv";
            auto out = open_out(path);
            out << "# fairmoo pairwise rank-sum verdicts, row run vs column run\n";
            run_comments(out);
            out << "indicator,run_a,run_b,verdict,symbol\n";
            auto finals = [&](const std::vector<std::vector<double>>& per_run) {
                std::vector<double> v;
                for (const auto& t : per_run) v.push_back(t.back());
                return v;
            };
            for (std::size_t a = 0; a < runs.size(); ++a)
                for (std::size_t b = 0; b < runs.size(); ++b) {
                    if (a == b) continue;
                    for (auto [name, table] :
                         {std::pair{"hv", &hv}, std::pair{"cpf", &cov}}) {
                        auto v = rank_sum_test(finals((*table)[a]), finals((*table)[b]),
                                               opt.alpha_sig, true);
                        out << name << "," << csv_quote(runs[a].label) << ","
                            << csv_quote(runs[b].label) << "," << verdict_name(v) << ","
                            << verdict_symbol(v) << "\n";
                    }
                }
            finish(out, path);
        }
    }

    if (!opt.baseline_path.empty()) {
        KvSpec base = KvSpec::parse_file(opt.baseline_path);
        std::vector<double> s;
        for (Metric m : tags) s.push_back(base.get_double(metric_name(m)));

        std::string path = opt.out_dir + "/dominance.csv";
        auto out = open_out(path);
        out << "# fairmoo final-front dominance vs baseline point\n";
        out << "# baseline " << opt.baseline_path << "\n";
        run_comments(out);
        out << "run,dominate,incomparable,dominated\n";
        for (const auto& rd : runs) {
            TrialArchive arch;
            arch.s = s;
            for (const auto& h : rd.trials) arch.trials.push_back(project(h.objectives.back()));
            out << csv_quote(rd.label) << "," << g17(dominate_metric(arch)) << ","
                << g17(incomparable_metric(arch)) << "," << g17(dominated_metric(arch)) << "\n";
        }
        finish(out, path);
    }

    std::cout << "wrote report to " << opt.out_dir << "\n";
}

}  // namespace fairmoo
