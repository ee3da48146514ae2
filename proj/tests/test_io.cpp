#include "fairmoo/io.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include "doctest.h"
#include "fairmoo/errors.hpp"
#include "fairmoo/metric.hpp"
#include "support.hpp"

using namespace fairmoo;

namespace {

std::string write_file(const std::string& dir, const std::string& name,
                       const std::string& content) {
    const std::string path = dir + "/" + name;
    std::ofstream out(path);
    out << content;
    return path;
}

}  // namespace

TEST_CASE("KvSpec parses key=value lines, comments, and blanks") {
    const auto kv = KvSpec::parse_text(
        "# a comment\n"
        "\n"
        "alpha = 2\n"
        "name= spaced value \n"
        "  indented.key =7\n");
    CHECK(kv.has("alpha"));
    CHECK(kv.get("alpha") == "2");
    CHECK(kv.get("name") == "spaced value");
    CHECK(kv.get_double("indented.key") == 7.0);
    CHECK(kv.get_or("absent", "dflt") == "dflt");
    CHECK(kv.get_double_or("absent", 1.5) == 1.5);
    CHECK(kv.get_u64_or("absent", 9) == 9);
    CHECK_FALSE(kv.has("absent"));
    CHECK_THROWS_AS(kv.get("absent"), ConfigError);
}

TEST_CASE("KvSpec rejects malformed and duplicate lines with their position") {
    CHECK_THROWS_WITH_AS(KvSpec::parse_text("a = 1\nnonsense\n", "f.spec"),
                         doctest::Contains("f.spec:2"), ConfigError);
    CHECK_THROWS_WITH_AS(KvSpec::parse_text("a = 1\na = 2\n", "f.spec"),
                         doctest::Contains("duplicate key"), ConfigError);
    CHECK_THROWS_AS(KvSpec::parse_text("= 3\n"), ConfigError);
    CHECK_THROWS_AS(KvSpec::parse_text("x = nope\n").get_double("x"), ConfigError);
    CHECK_THROWS_AS(KvSpec::parse_text("x = 1.5\n").get_u64_or("x", 0), ConfigError);
    CHECK_THROWS_AS(KvSpec::parse_text("x = maybe\n").get_bool_or("x", true), ConfigError);
    CHECK(KvSpec::parse_text("x = TRUE\n").get_bool_or("x", false));
    CHECK_FALSE(KvSpec::parse_text("x = no\n").get_bool_or("x", true));
}

TEST_CASE("the digest sees canonical content, not formatting") {
    const auto a = KvSpec::parse_text("b = 2\na = 1\n");
    const auto b = KvSpec::parse_text("# noise\na= 1\n\nb =2\n");
    const auto c = KvSpec::parse_text("a = 1\nb = 3\n");
    CHECK(a.canonical() == "a = 1\nb = 2\n");
    CHECK(a.canonical() == b.canonical());
    CHECK(a.digest() == b.digest());
    CHECK(a.digest() != c.digest());
    CHECK(hex_digest(a.digest()).size() == 16);
    CHECK(hex_digest(0x1f) == "000000000000001f");
}

TEST_CASE("unread keys are reported so typos cannot pass silently") {
    const auto kv = KvSpec::parse_text("used = 1\nmoea.lambada = 20\n");
    kv.get("used");
    CHECK(kv.unread() == std::vector<std::string>{"moea.lambada"});
    CHECK_THROWS_WITH_AS(experiment_from_kv(kv), doctest::Contains("unknown spec keys"),
                         ConfigError);
}

TEST_CASE("split_list trims items and drops empties") {
    CHECK(split_list("a, b ,c") == std::vector<std::string>{"a", "b", "c"});
    CHECK(split_list("") == std::vector<std::string>{});
    CHECK(split_list(" one ") == std::vector<std::string>{"one"});
}

TEST_CASE("an empty spec yields the documented defaults") {
    const auto spec = experiment_from_kv(KvSpec::parse_text(""));
    CHECK(spec.synthetic);
    CHECK(spec.synth_n == 2000);
    CHECK(spec.synth_d == 5);
    CHECK(spec.synth_bias == 0.3);
    CHECK(spec.group_attrs == std::vector<std::string>{"group"});
    CHECK(spec.privileged_values == std::vector<std::string>{"A"});
    CHECK(spec.ratios == std::vector<double>{0.5, 0.125, 0.125, 0.25});
    CHECK(spec.run.net.hidden == 16);
    CHECK(spec.run.criteria == std::vector<Metric>{Metric::CE, Metric::FI, Metric::FG});
    CHECK(spec.run.objectives.empty());
    CHECK(spec.run.repro.losses == spec.run.criteria);  // CE, FI, FG all differentiable
    CHECK(spec.run.repro.K == 10);
    CHECK(spec.run.lambda == 20);
    CHECK(spec.run.generations == 30);
    CHECK(spec.trials == 1);
    CHECK(spec.strategies.size() == 4);
    CHECK(spec.report_criteria.size() == 9);
    CHECK(spec.report_criteria.front() == Metric::ACC);
}

TEST_CASE("spec keys reach their fields") {
    const auto spec = experiment_from_kv(KvSpec::parse_text(
        "seed = 99\n"
        "data.synth.n = 500\n"
        "data.synth.dim = 3\n"
        "split.ratios = 0.6,0.2,0.2\n"
        "net.hidden = 8\n"
        "net.activation = tanh\n"
        "train.lr = 0.1\n"
        "moea.criteria = CE,ACC,FI\n"
        "moea.objectives = CE\n"
        "moea.losses = CE,FI\n"
        "moea.K = 3\n"
        "moea.lambda = 12\n"
        "trials = 4\n"
        "ensemble.strategies = EnsAll\n"
        "ensemble.criteria = ACC,Fair1\n"
        "out = runs/demo\n"));
    CHECK(spec.run.seed == 99);
    CHECK(spec.synth_n == 500);
    CHECK(spec.synth_d == 3);
    CHECK(spec.ratios.size() == 3);
    CHECK(spec.run.net.activation == Activation::tanh);
    CHECK(spec.run.train_spec.learning_rate == 0.1);
    CHECK(spec.run.criteria == std::vector<Metric>{Metric::CE, Metric::ACC, Metric::FI});
    CHECK(spec.run.objectives == std::vector<Metric>{Metric::CE});
    CHECK(spec.run.repro.losses == std::vector<Metric>{Metric::CE, Metric::FI});
    CHECK(spec.run.repro.K == 3);
    CHECK(spec.run.lambda == 12);
    CHECK(spec.trials == 4);
    CHECK(spec.strategies == std::vector<EnsembleStrategy>{EnsembleStrategy::all});
    CHECK(spec.report_criteria == std::vector<Metric>{Metric::ACC, Metric::Fair1});
    CHECK(spec.out_dir == "runs/demo");
    CHECK(spec.digest != 0);
    CHECK(!spec.canonical.empty());

    CHECK_THROWS_AS(experiment_from_kv(KvSpec::parse_text("data.source = parquet\n")),
                    ConfigError);
    CHECK_THROWS_AS(experiment_from_kv(KvSpec::parse_text("net.activation = selu\n")),
                    ConfigError);
    CHECK_THROWS_AS(experiment_from_kv(KvSpec::parse_text("trials = 0\n")), ConfigError);
}

TEST_CASE("per-trial seeds differ from each other and from the master") {
    const auto spec = experiment_from_kv(KvSpec::parse_text("seed = 7\n"));
    std::set<std::uint64_t> seen{spec.run.seed};
    for (std::size_t t = 0; t < 32; ++t) {
        CHECK(spec.trial_seed(t) == spec.trial_seed(t));  // pure
        CHECK(seen.insert(spec.trial_seed(t)).second);
    }
    const auto other = experiment_from_kv(KvSpec::parse_text("seed = 8\n"));
    CHECK(other.trial_seed(0) != spec.trial_seed(0));
}

TEST_CASE("build_data assigns part roles by split arity") {
    auto spec = experiment_from_kv(KvSpec::parse_text(
        "data.synth.n = 400\ndata.synth.dim = 3\nsplit.ratios = 0.5,0.5\n"));
    auto two = build_data(spec);
    REQUIRE(two.parts.size() == 2);
    CHECK(two.train == 0);
    CHECK(two.val == 1);
    CHECK(two.sel == 1);
    CHECK(two.test == 1);

    spec = experiment_from_kv(KvSpec::parse_text(
        "data.synth.n = 400\ndata.synth.dim = 3\nsplit.ratios = 0.5,0.25,0.25\n"));
    auto three = build_data(spec);
    REQUIRE(three.parts.size() == 3);
    CHECK(three.sel == 1);
    CHECK(three.test == 2);
    CHECK(three.names == std::vector<std::string>{"train", "validation", "test"});

    spec = experiment_from_kv(KvSpec::parse_text("data.synth.n = 400\ndata.synth.dim = 3\n"));
    auto four = build_data(spec);
    REQUIRE(four.parts.size() == 4);
    CHECK(four.sel == 2);
    CHECK(four.test == 3);

    std::size_t total = 0;
    for (std::size_t p = 0; p < four.parts.size(); ++p) {
        CHECK(four.groups[p].size() == four.parts[p].n);
        total += four.parts[p].n;
    }
    CHECK(total == 400);

    spec.ratios = {1.0};
    CHECK_THROWS_AS(build_data(spec), ConfigError);
}

TEST_CASE("history CSVs round-trip exactly") {
    const std::string dir = fairmoo::test::scratch_dir("io_history");
    RunHistory hist;
    hist.criteria = {Metric::CE, Metric::FI};
    hist.seed = 1234;
    hist.generation_seeds = {0, 111, 222};
    hist.objectives = {
        {{0.125, 0.25}, {1.0 / 3.0, 0.7071067811865476}},
        {{0.5, 1e-17}, {2.0, 3.0}},
        {{0.1, 0.2}, {0.3, 0.4}},
    };
    hist.wall_seconds = {0.0, 0.0, 0.0};
    const std::string path = dir + "/hist.csv";
    write_history_csv(path, hist, 0xabcdef);

    const RunHistory back = read_history_csv(path);
    CHECK(back.criteria == hist.criteria);
    CHECK(back.seed == hist.seed);
    CHECK(back.generation_seeds == hist.generation_seeds);
    CHECK(back.objectives == hist.objectives);  // bit-exact via %.17g

    // The digest comment is in the bytes, so provenance survives copies.
    std::ifstream in(path);
    std::string first, second;
    std::getline(in, first);
    std::getline(in, second);
    CHECK(first == "# fairmoo history");
    CHECK(second == "# spec 0000000000abcdef");
}

TEST_CASE("history reader rejects mangled files") {
    const std::string dir = fairmoo::test::scratch_dir("io_badhist");
    const std::string missing_header = write_file(dir, "a.csv", "# criteria CE\n1,0,CE,0.5\n");
    CHECK_THROWS_AS(read_history_csv(missing_header), ReportError);
    const std::string wrong_metric = write_file(
        dir, "b.csv",
        "# criteria CE\ngeneration,individual,criterion,value\n0,0,FG,0.5\n");
    CHECK_THROWS_AS(read_history_csv(wrong_metric), ReportError);
    const std::string incomplete = write_file(
        dir, "c.csv",
        "# criteria CE,FI\ngeneration,individual,criterion,value\n0,0,CE,0.5\n");
    CHECK_THROWS_AS(read_history_csv(incomplete), ReportError);
    CHECK_THROWS_AS(read_history_csv(dir + "/nope.csv"), DataError);
}

TEST_CASE("population dumps round-trip exactly") {
    const std::string dir = fairmoo::test::scratch_dir("io_pop");
    PopulationDump dump;
    dump.net.input_dim = 2;
    dump.net.hidden = 2;
    dump.net.activation = Activation::tanh;
    dump.criteria = {Metric::CE, Metric::Fair3};
    dump.alpha = 0.5;
    dump.digest = 0xfeed;
    dump.seed = 77;
    Individual a;
    a.genome.weights.assign(dump.net.genome_length(), 0.0);
    a.genome.weights[0] = 0.1;
    a.genome.weights[8] = -1.0 / 3.0;
    a.objectives = {0.25, 1e-300};
    a.birth_gen = 4;
    a.lineage_tag = "FI";
    dump.pop = {a, a};
    dump.pop[1].genome.weights[1] = 5e-324;  // denormal survives too

    const std::string path = dir + "/pop.jsonl";
    write_population_jsonl(path, dump);
    const PopulationDump back = read_population_jsonl(path);
    CHECK(back.net.input_dim == dump.net.input_dim);
    CHECK(back.net.hidden == dump.net.hidden);
    CHECK(back.net.activation == Activation::tanh);
    CHECK(back.criteria == dump.criteria);
    CHECK(back.alpha == dump.alpha);
    CHECK(back.digest == dump.digest);
    CHECK(back.seed == dump.seed);
    REQUIRE(back.pop.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(back.pop[i].genome.weights == dump.pop[i].genome.weights);
        CHECK(back.pop[i].objectives == dump.pop[i].objectives);
        CHECK(back.pop[i].birth_gen == dump.pop[i].birth_gen);
        CHECK(back.pop[i].lineage_tag == dump.pop[i].lineage_tag);
    }
}

TEST_CASE("population reader rejects foreign or broken files") {
    const std::string dir = fairmoo::test::scratch_dir("io_badpop");
    const std::string not_ours = write_file(dir, "a.jsonl", "{\"kind\":\"something\"}\n");
    CHECK_THROWS_AS(read_population_jsonl(not_ours), DataError);
    const std::string not_json = write_file(dir, "b.jsonl", "hello\n");
    CHECK_THROWS_AS(read_population_jsonl(not_json), DataError);
    const std::string empty = write_file(dir, "c.jsonl", "");
    CHECK_THROWS_AS(read_population_jsonl(empty), DataError);

    // A genome disagreeing with the net shape is caught on the way back in.
    PopulationDump dump;
    dump.net.input_dim = 2;
    dump.net.hidden = 2;
    Individual bad;
    bad.genome.weights = {1.0, 2.0};
    bad.objectives = {0.5};
    dump.criteria = {Metric::CE};
    dump.pop = {bad};
    const std::string path = dir + "/d.jsonl";
    write_population_jsonl(path, dump);
    CHECK_THROWS_AS(read_population_jsonl(path), DataError);
}
