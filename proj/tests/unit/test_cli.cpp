#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "otdro/backtest.hpp"
#include "otdro/commands.hpp"
#include "otdro/config.hpp"
#include "otdro/error.hpp"
#include "otdro/report.hpp"
#include "otdro/synthetic.hpp"

using namespace otdro;
using namespace otdro::cli;
using otdro::testing::TempDir;

namespace {

struct Run {
    int code = 0;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "otdro");
    std::ostringstream out, err;
    Run r;
    r.code = run_command(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void spit(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

std::size_t count_lines(const std::string& text) { return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')); }

const char* kSmallRun = R"({
  "synthetic": {"seed": 4, "hours": 4416, "start": "2019-03-01T00:00:00Z"},
  "epsilons": [1.0, 0.5],
  "max_samples": 30
})";

}  // namespace

TEST(LoadConfig, Defaults) {
    const auto c = parse_config("{}", ".");
    EXPECT_DOUBLE_EQ(c.backtest.reference.alpha, 1.0 / 3.0);
    EXPECT_EQ(c.backtest.reference.beta, 2.0);
    EXPECT_EQ(c.backtest.epsilons, (std::vector<double>{0.5, 1.0, 1.5}));
    EXPECT_EQ(c.backtest.margin, 0.2);
    EXPECT_FALSE(c.backtest.reference.max_samples.has_value());
    EXPECT_EQ(c.backtest.jobs, 0u);
    EXPECT_FALSE(c.market.has_value());
    EXPECT_FALSE(c.synthetic.has_value());
}

TEST(LoadConfig, AlphaRange) {
    try {
        parse_config(R"({"alpha": 0})", ".");
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.field(), "alpha");
        EXPECT_NE(std::string(e.what()).find("(0, 1]"), std::string::npos) << e.what();
    }
}

TEST(LoadConfig, EpsilonsSorted) {
    EXPECT_EQ(parse_config(R"({"epsilons": [1.5, 0.5, 1.0]})", ".").backtest.epsilons,
              (std::vector<double>{0.5, 1.0, 1.5}));
    EXPECT_THROW(parse_config(R"({"epsilons": [1.0, 1.0]})", "."), ConfigError);
    EXPECT_THROW(parse_config(R"({"epsilons": [-1.0]})", "."), ConfigError);
}

TEST(LoadConfig, SchemaErrors) {
    EXPECT_THROW(parse_config(R"({"alpa": 0.5})", "."), ConfigError);
    EXPECT_THROW(parse_config(R"({"beta": "two"})", "."), ConfigError);
    EXPECT_THROW(parse_config(R"({"transport_exponent": 2})", "."), ConfigError);
    EXPECT_THROW(parse_config(R"({"synthetic": {"hours": 10}})", "."), ConfigError);
    EXPECT_THROW(parse_config("[1, 2]", "."), ConfigError);
    EXPECT_THROW(parse_config("{not json", "."), ConfigError);
}

TEST(LoadConfig, PathsResolveAgainstConfigDirectory) {
    TempDir dir("cfg");
    spit(dir.path() / "m.csv", "x");
    spit(dir.path() / "f.csv", "x");
    spit(dir.path() / "run.json", R"({"market": "m.csv", "forecast": "f.csv", "output_dir": "out"})");
    const auto c = load_config(dir.path() / "run.json");
    EXPECT_EQ(*c.market, dir.path() / "m.csv");
    EXPECT_EQ(c.output_dir, dir.path() / "out");
    spit(dir.path() / "bad.json", R"({"market": "missing.csv", "forecast": "f.csv"})");
    try {
        load_config(dir.path() / "bad.json");
        FAIL() << "expected DataError";
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("missing.csv"), std::string::npos);
    }
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(run({}).code, kUsage);
    EXPECT_EQ(run({"frobnicate"}).code, kUsage);
    EXPECT_EQ(run({"calibrate"}).code, kUsage);
    EXPECT_EQ(run({"synth", "--out", "x"}).code, kUsage);
    EXPECT_EQ(run({"--help"}).code, kOk);
}

TEST(Cli, HelpListsEachFlagOnce) {
    const std::map<std::string, std::vector<std::string>> flags{
        {"ingest", {"--market", "--forecast", "--ensemble", "--out"}},
        {"validate", {"--market", "--thresholds", "--out"}},
        {"calibrate", {"--market", "--thresholds", "--out"}},
        {"nominate",
         {"--config", "--market", "--forecast", "--ensemble", "--date", "--epsilon", "--max-samples", "--jobs", "--out"}},
        {"backtest", {"--config", "--jobs", "--out", "--seed"}},
        {"synth", {"--seed", "--out", "--hours", "--start", "--preset", "--ensemble"}},
    };
    for (const auto& [sub, names] : flags) {
        const auto r = run({sub, "--help"});
        EXPECT_EQ(r.code, kOk) << sub;
        std::set<std::string> seen;
        const std::regex flag_re("--[a-z][a-z-]*");
        for (auto it = std::sregex_iterator(r.out.begin(), r.out.end(), flag_re); it != std::sregex_iterator(); ++it) {
            const std::string f = it->str();
            if (f == "--help") continue;
            EXPECT_TRUE(seen.insert(f).second) << sub << " lists " << f << " twice";
        }
        EXPECT_EQ(seen, std::set<std::string>(names.begin(), names.end())) << sub;
    }
}

TEST(Cli, MissingMarketFile) {
    TempDir dir("missing");
    const auto path = (dir.path() / "nope.csv").string();
    const auto r = run({"calibrate", "--market", path});
    EXPECT_EQ(r.code, kDataError);
    EXPECT_NE(r.err.find(path), std::string::npos) << r.err;
}

TEST(Cli, BacktestConfigWithMissingFile) {
    TempDir dir("missing_cfg");
    spit(dir.path() / "f.csv", "x");
    spit(dir.path() / "run.json", R"({"market": "absent.csv", "forecast": "f.csv"})");
    const auto r = run({"backtest", "--config", (dir.path() / "run.json").string()});
    EXPECT_EQ(r.code, kDataError);
    EXPECT_NE(r.err.find((dir.path() / "absent.csv").string()), std::string::npos) << r.err;
}

TEST(Cli, Calibrate) {
    TempDir dir("calibrate");
    std::ostringstream csv;
    std::vector<MarketRecord> recs;
    const double up[] = {250, 40, 600, 1200, 3500, 50, 30, 700};
    for (int h = 0; h < 8; ++h)
        recs.push_back({parse_timestamp("2018-01-01T00:00:00Z") + kHour * h, 5, 30, 20, up[h]});
    write_market_csv(csv, recs);
    spit(dir.path() / "market.csv", csv.str());
    const auto r = run({"calibrate", "--market", (dir.path() / "market.csv").string(), "--thresholds",
                        "200,500,1000,3000", "--out", dir.path().string()});
    ASSERT_EQ(r.code, kOk) << r.err;
    const auto table = slurp(dir.path() / "table1.csv");
    EXPECT_EQ(table.rfind("q_eur_mwh,count,freq,freq_percent,epsilon_q\n"
                          "200,5,0.625,62.50,125\n"
                          "500,4,0.5,50.00,250\n"
                          "1000,2,0.25,25.00,250\n"
                          "3000,1,0.125,12.50,375\n",
                          0),
              0u)
        << table;
    EXPECT_NE(r.out.find("suggested radii"), std::string::npos);
}

TEST(Cli, SynthIngestValidateNominate) {
    TempDir dir("nominate");
    const auto data = dir.path() / "data";
    auto r = run({"synth", "--seed", "9", "--out", data.string(), "--hours", std::to_string(24 * 60), "--ensemble",
                  "4"});
    ASSERT_EQ(r.code, kOk) << r.err;
    const auto market = (data / "market.csv").string(), forecast = (data / "forecast.csv").string();

    r = run({"ingest", "--market", market, "--forecast", forecast, "--out", (dir.path() / "clean").string()});
    ASSERT_EQ(r.code, kOk) << r.err;
    EXPECT_EQ(slurp(dir.path() / "clean" / "market.csv"), slurp(market));
    EXPECT_EQ(slurp(dir.path() / "clean" / "forecast.csv"), slurp(forecast));

    r = run({"validate", "--market", market});
    ASSERT_EQ(r.code, kOk) << r.err;
    EXPECT_EQ(r.out.front(), '{');

    const auto out = dir.path() / "noms.csv";
    r = run({"nominate", "--market", market, "--forecast", forecast, "--date", "2017-02-10", "--epsilon", "1.0",
             "--max-samples", "50", "--out", out.string()});
    ASSERT_EQ(r.code, kOk) << r.err;
    const auto text = slurp(out);
    EXPECT_EQ(count_lines(text), 25u);
    EXPECT_EQ(text.rfind("time,f_mean,mean_forecast,dro_eps_1,worst_case_eps_1,status\n", 0), 0u) << text;
    EXPECT_NE(text.find("2017-02-11T00:00:00Z,"), std::string::npos);
    EXPECT_NE(text.find("2017-02-11T23:00:00Z,"), std::string::npos);
    EXPECT_EQ(text.find("failed"), std::string::npos);

    // Day past the end of the forecast file.
    r = run({"nominate", "--market", market, "--forecast", forecast, "--date", "2017-03-01"});
    EXPECT_EQ(r.code, kDataError);
}

TEST(Cli, NominationsIgnoreDataAfterGateClosure) {
    TempDir dir("gate");
    const auto data = dir.path() / "data";
    ASSERT_EQ(run({"synth", "--seed", "2", "--out", data.string(), "--hours", std::to_string(24 * 40), "--ensemble",
                   "3"})
                  .code,
              kOk);
    const auto market = data / "market.csv";
    const auto a = run({"nominate", "--market", market.string(), "--forecast", (data / "forecast.csv").string(),
                        "--date", "2017-01-20", "--max-samples", "40"});
    ASSERT_EQ(a.code, kOk) << a.err;
    // Truncate the market file at 2017-01-20 12:00; nominations must not change.
    std::istringstream in(slurp(market));
    std::string line, kept;
    while (std::getline(in, line)) {
        if (line.rfind("2017-01-20T12", 0) == 0) break;
        kept += line + "\n";
    }
    spit(market, kept);
    const auto b = run({"nominate", "--market", market.string(), "--forecast", (data / "forecast.csv").string(),
                        "--date", "2017-01-20", "--max-samples", "40"});
    ASSERT_EQ(b.code, kOk) << b.err;
    EXPECT_EQ(a.out, b.out);
}

TEST(EmitReport, FileSetAndIdempotence) {
    TempDir dir("emit");
    const auto cfg = parse_config(kSmallRun, dir.path());
    const auto data = generate_synthetic(cfg.synthetic->config, cfg.synthetic->seed);
    const auto report = run_backtest(data, cfg.backtest);
    const auto out = dir.path() / "bundle";
    emit_report(report, out);
    std::set<std::string> names;
    for (const auto& e : std::filesystem::directory_iterator(out)) names.insert(e.path().filename().string());
    EXPECT_EQ(names, std::set<std::string>(kReportFiles.begin(), kReportFiles.end()));
    std::vector<std::string> first;
    for (const auto& f : kReportFiles) first.push_back(slurp(out / f));
    emit_report(report, out);
    for (std::size_t k = 0; k < kReportFiles.size(); ++k) EXPECT_EQ(slurp(out / kReportFiles[k]), first[k]);

    EXPECT_EQ(count_lines(first[4]), 1 + 3 * data.size());
    EXPECT_EQ(first[1].rfind("season,dro_eps_0.5,dro_eps_1\n", 0), 0u) << first[1];
    EXPECT_EQ(first[3].rfind("period,strategy,start,trough,end,magnitude,recovered\n", 0), 0u);

    // A regular file where the directory should be.
    spit(dir.path() / "blocker", "x");
    EXPECT_THROW(emit_report(report, dir.path() / "blocker"), DataError);
    EXPECT_THROW(emit_report(report, dir.path() / "blocker" / "sub"), DataError);
}

TEST(Cli, BacktestEndToEnd) {
    TempDir dir("backtest");
    spit(dir.path() / "run.json", kSmallRun);
    const auto cfg = (dir.path() / "run.json").string();
    const auto a = run({"backtest", "--config", cfg, "--jobs", "1", "--out", (dir.path() / "a").string()});
    ASSERT_EQ(a.code, kOk) << a.err;
    const auto b = run({"backtest", "--config", cfg, "--jobs", "3", "--out", (dir.path() / "b").string()});
    ASSERT_EQ(b.code, kOk) << b.err;
    for (const auto& f : kReportFiles) EXPECT_EQ(slurp(dir.path() / "a" / f), slurp(dir.path() / "b" / f)) << f;
    EXPECT_NE(a.out.find("mean_forecast"), std::string::npos);

    spit(dir.path() / "blocker", "x");
    const auto c = run({"backtest", "--config", cfg, "--out", (dir.path() / "blocker").string()});
    EXPECT_EQ(c.code, kDataError);
    EXPECT_NE(c.err.find("blocker"), std::string::npos);

    // The seed flag applies to synthetic runs only.
    const auto d = run({"backtest", "--config", cfg, "--seed", "5", "--out", (dir.path() / "d").string()});
    EXPECT_EQ(d.code, kOk) << d.err;
    EXPECT_NE(slurp(dir.path() / "d" / "nominations.csv"), slurp(dir.path() / "a" / "nominations.csv"));
}

TEST(Cli, ExecutableExitCodes) {
    const std::string exe = OTDRO_CLI_PATH;
    TempDir dir("exe");
    const auto quiet = " >" + (dir.path() / "o.txt").string() + " 2>&1";
    const auto status = [&](const std::string& args) {
        const int raw = std::system(("\"" + exe + "\" " + args + quiet).c_str());
        return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    };
    EXPECT_EQ(status("--help"), 0);
    EXPECT_EQ(status("nonsense"), 1);
    EXPECT_EQ(status("calibrate --market " + (dir.path() / "absent.csv").string()), 2);
    EXPECT_NE(slurp(dir.path() / "o.txt").find("absent.csv"), std::string::npos);
}
