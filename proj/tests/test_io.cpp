#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "evl/evl.hpp"

using namespace evl;

namespace {

std::string data_path(const std::string& name) { return std::string(EVL_TEST_DATA) + "/" + name; }

// key -> type tree; arrays are described by their first element
json schema_of(const json& j) {
    if (j.is_object()) {
        json s = json::object();
        for (auto it = j.begin(); it != j.end(); ++it) s[it.key()] = schema_of(it.value());
        return s;
    }
    if (j.is_array()) return j.empty() ? json::array() : json::array({schema_of(j.front())});
    if (j.is_boolean()) return "bool";
    if (j.is_number()) return "number";
    if (j.is_null()) return "null";
    return "string";
}

struct CliRun {
    int code = -1;
    std::string out;
};

CliRun run_cli(const std::string& args) {
    CliRun r;
    const std::string cmd = std::string(EVL_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return r;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

json read_json(const std::string& path) {
    std::ifstream in(path);
    return json::parse(in);
}

void expect_schema(const std::string& args, const std::string& golden) {
    const CliRun r = run_cli(args);
    ASSERT_EQ(r.code, 0) << args;
    const json got = schema_of(json::parse(r.out));
    const json want = read_json(data_path(golden));
    EXPECT_EQ(got, want) << "schema drift for '" << args << "':\n" << got.dump(2);
}

} // namespace

TEST(Config, RoundTripIsLossless) {
    RunConfig c = load_config(data_path("light_config.json"));
    c.generic.h_type = 2;
    c.generic.param = Rational(3, 7);
    c.decay.r = Rational(1, 5);
    c.tau = Rational(5, 3);
    const json j = to_json(c);
    const RunConfig back = config_from_json(j);
    EXPECT_EQ(to_json(back), j);
    EXPECT_EQ(back.seed, 7u);
    EXPECT_EQ(back.mc_taus.size(), 2u);
    EXPECT_EQ(back.generic.param, Rational(3, 7));
}

TEST(Config, RejectsUnknownRulesAndBadValues) {
    EXPECT_THROW(config_from_json(json{{"sequences", {{"t_n", "log"}}}}), BadConfig);
    EXPECT_THROW(config_from_json(json{{"observable", "ex3"}}), BadConfig);
    EXPECT_THROW(config_from_json(json{{"decay", {{"r", "3/2"}}}}), BadConfig);
    EXPECT_THROW(config_from_json(json{{"seed", "abc"}}), BadConfig);
    EXPECT_THROW(load_config("/nonexistent/config.json"), BadConfig);
}

TEST(Json, IntervalUnionRoundTrip) {
    const IntervalUnion u = IntervalUnion::normalize(
        {Interval{BoundedValue(Rational(1, 3)), BoundedValue(Rational(1, 2), Rational(1, 1024)), false, true},
         Interval{BoundedValue(Rational(2, 3)), BoundedValue(Rational(5, 6)), true, false}});
    const IntervalUnion back = interval_union_from_json(to_json(u));
    ASSERT_EQ(back.size(), u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        EXPECT_TRUE(identical(back.parts()[i].lo, u.parts()[i].lo));
        EXPECT_TRUE(identical(back.parts()[i].hi, u.parts()[i].hi));
        EXPECT_EQ(back.parts()[i].lo_closed, u.parts()[i].lo_closed);
        EXPECT_EQ(back.parts()[i].hi_closed, u.parts()[i].hi_closed);
    }
}

TEST(Json, ExactValuesCarryFractionAndDecimal) {
    const json j = to_json(BoundedValue(Rational(1, 3)));
    EXPECT_EQ(j["value"], "1/3");
    EXPECT_EQ(j["decimal"].get<std::string>().size(), std::string("3.33333333333333333333333333333e-01").size());
    EXPECT_EQ(j["radius"], "0/1");
}

TEST(Json, CsvRowHasHeaderColumns) {
    const ObservableSpec s = ObservableSpec::example1();
    MonteCarloConfig m;
    m.samples = 50;
    const ExperimentResult r = sample_block_maxima(s, level_for_tau(s, BigInt(100), Rational(1)), m);
    const std::string row = mc_csv_row(r);
    const std::string header = mc_csv_header();
    EXPECT_EQ(std::count(row.begin(), row.end(), ','), std::count(header.begin(), header.end(), ','));
}

TEST(Cli, ThetaExactSchema) { expect_schema("theta-exact --terms 3", "schema_theta_exact.json"); }

TEST(Cli, LevelsSchema) { expect_schema("levels --n 1000 --tau 1", "schema_levels.json"); }

TEST(Cli, DprimeSchema) { expect_schema("--observable ex2 dprime --n 60 --tau 1", "schema_dprime.json"); }

TEST(Cli, ThetaSeqEx2HasLimitField) {
    const CliRun r = run_cli("--observable ex2 theta-seq --u-grid 20,40");
    ASSERT_EQ(r.code, 0);
    const json j = json::parse(r.out);
    EXPECT_EQ(j["theta_limit"], 1);
    EXPECT_EQ(j["rows"].size(), 2u);
}

TEST(Cli, McCsvColumns) {
    const std::string csv = std::string(EVL_TEST_TMP) + "/mc.csv";
    const CliRun r = run_cli("--observable ex2 --seed 3 --csv " + csv + " mc --n 100 --tau-grid 0.5,1 --samples 100");
    ASSERT_EQ(r.code, 0);
    std::ifstream in(csv);
    std::string header, line;
    std::getline(in, header);
    EXPECT_EQ(header, "tau,n,u_n,p_hat,std_err,reference,samples,seed");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 2);
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run_cli("--config /nonexistent.json levels").code, 4);
    EXPECT_EQ(run_cli("--observable ex4 levels").code, 4);
    EXPECT_EQ(run_cli("levels --n 1000 --tau -1").code, 4);
    EXPECT_EQ(run_cli("--depth 2 --max-depth 2 --observable ex2 levels --n 1000000000000").code, 3);
    EXPECT_EQ(run_cli("--cap 10 --observable ex2 dprime --n 200").code, 3);
}

TEST(Reproduce, ReportSchemaAndDeterminism) {
    const RunConfig c = load_config(data_path("light_config.json"));
    const Report a = run_reproduction(c);
    const Report b = run_reproduction(c);
    EXPECT_EQ(deterministic_part(a.doc).dump(), deterministic_part(b.doc).dump());
    EXPECT_EQ(schema_of(a.doc["criteria"]), read_json(data_path("schema_criteria.json")));
    for (const char* key : {"config", "theta_ex1", "xi_bounds", "theta_seq_ex1", "theta_seq_ex2", "survivor_oracle",
                            "window_oracle", "hypotheses", "dprime", "bv_bounds", "monte_carlo", "runs_estimate",
                            "criteria", "timestamp", "theta_ex1_decimal", "theta_limit_ex2"})
        EXPECT_TRUE(a.doc.contains(key)) << key;
    EXPECT_EQ(a.doc["criteria"].size(), 9u);
    EXPECT_EQ(a.doc["theta_ex1_decimal"], "9.99289701946552e-01");
}
