#include "coxcs/commands.hpp"
#include "coxcs/csv.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace coxcs;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag)
        : path(fs::temp_directory_path() / ("coxcs-test-" + tag + "-" + std::to_string(::getpid())))
    {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str() const { return path.string(); }
};

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Index count_lines(const fs::path& p)
{
    const auto s = slurp(p);
    return static_cast<Index>(std::count(s.begin(), s.end(), '\n'));
}

std::string write_dataset(const TempDir& dir, const SurvivalDataset& data)
{
    const auto path = dir.path / "input.csv";
    std::ofstream out(path);
    write_csv(out, data);
    return path.string();
}

int run(const RunConfig& c, std::string* log_text = nullptr, std::string* out_text = nullptr)
{
    std::ostringstream out, log;
    const int code = run_command(c, out, log);
    if (log_text) *log_text = log.str();
    if (out_text) *out_text = out.str();
    return code;
}

} // namespace

TEST_SUITE("cli")
{
    TEST_CASE("screen writes one record per covariate outside C")
    {
        TempDir dir("screen");
        RunConfig c;
        c.input_path = write_dataset(dir, oracle::random_dataset(1, 60, 5));
        c.conditioning = ConditioningSpec::parse("1");
        c.out_dir = dir.str();
        c.statistics = {Statistic::wald, Statistic::plik};
        std::string log;
        REQUIRE(run(c, &log) == 0);
        CHECK(count_lines(dir.path / "screening.csv") == 5);
        const auto text = slurp(dir.path / "screening.csv");
        CHECK(text.rfind("index,name,beta_hat,sigma_hat,wald,plik,fit_status\n", 0) == 0);
        CHECK(text.find("\n2,z2,") != std::string::npos);
        CHECK(text.find("\n1,z1,") == std::string::npos);
        CHECK(log.find("null fit: C={1}") != std::string::npos);
        // Default budget caps at the four candidates.
        CHECK(count_lines(dir.path / "selected.csv") == 5);
    }

    TEST_CASE("default top-k selection size")
    {
        TempDir dir("topk");
        RunConfig c;
        c.input_path = write_dataset(dir, oracle::random_dataset(2, 160, 50));
        c.conditioning = ConditioningSpec::parse("none");
        c.out_dir = dir.str();
        REQUIRE(run(c) == 0);
        CHECK(count_lines(dir.path / "selected.csv") == 32);
        c.threshold.kind = ThresholdMode::Kind::top_k;
        c.threshold.k = 7;
        REQUIRE(run(c) == 0);
        CHECK(count_lines(dir.path / "selected.csv") == 8);
    }

    TEST_CASE("json screening output")
    {
        TempDir dir("json");
        RunConfig c;
        c.input_path = write_dataset(dir, oracle::random_dataset(3, 60, 4));
        c.conditioning = ConditioningSpec::parse("auto");
        c.out_dir = dir.str();
        c.format = OutputFormat::json;
        std::string log;
        REQUIRE(run(c, &log) == 0);
        CHECK(fs::exists(dir.path / "screening.json"));
        CHECK(log.find("conditioning: chose C=") != std::string::npos);
    }

    TEST_CASE("simulate then screen round trip")
    {
        TempDir dir("simulate");
        RunConfig s;
        s.command = Command::simulate;
        s.example = 1;
        s.n = 80;
        s.p = 20;
        s.replicates = 2;
        s.seed = 4;
        s.out_dir = dir.str();
        REQUIRE(run(s) == 0);
        CHECK(fs::exists(dir.path / "sim.cfg"));
        CHECK(count_lines(dir.path / "replicate_1.csv") == 81);
        const auto first = slurp(dir.path / "replicate_0.csv");
        REQUIRE(run(s) == 0);
        CHECK(slurp(dir.path / "replicate_0.csv") == first);

        RunConfig c;
        c.input_path = (dir.path / "replicate_0.csv").string();
        c.out_dir = dir.str();
        CHECK(run(c) == 0);
    }

    TEST_CASE("benchmark is reproducible across runs and worker counts")
    {
        TempDir a("bench-a"), b("bench-b");
        RunConfig c;
        c.command = Command::benchmark;
        c.example = 2;
        c.n = 60;
        c.p = 40;
        c.replicates = 6;
        c.seed = 9;
        c.conditioning = ConditioningSpec::parse("1");
        c.out_dir = a.str();
        REQUIRE(run(c) == 0);
        const auto scores = slurp(a.path / "scores.csv");
        const auto summary = slurp(a.path / "summary.csv");
        CHECK(count_lines(a.path / "summary.csv") == 8);
        CHECK(summary.find("example2-n60-p40-cr0.2") != std::string::npos);
        c.out_dir = b.str();
        c.workers = 3;
        REQUIRE(run(c) == 0);
        CHECK(slurp(b.path / "scores.csv") == scores);
        CHECK(slurp(b.path / "summary.csv") == summary);
    }

    TEST_CASE("calibrate prints the bound")
    {
        RunConfig c;
        c.command = Command::calibrate;
        c.example = 1;
        c.n = 100;
        c.p = 10;
        c.censoring = 0.4;
        std::string out;
        REQUIRE(run(c, nullptr, &out) == 0);
        CHECK(out.rfind("censor_upper=", 0) == 0);
    }

    TEST_CASE("diagnose with every covariate conditioned writes an empty table")
    {
        TempDir dir("diagnose");
        RunConfig c;
        c.command = Command::diagnose;
        c.input_path = write_dataset(dir, oracle::random_dataset(5, 40, 1));
        c.conditioning = ConditioningSpec::parse("1");
        c.out_dir = dir.str();
        std::string log;
        REQUIRE(run(c, &log) == 0);
        CHECK(slurp(dir.path / "signal_strength.csv") == "index,name,signal_strength\n");
        CHECK(log.find("warning") != std::string::npos);
    }

    TEST_CASE("errors map to exit codes")
    {
        TempDir dir("errors");
        RunConfig c;
        c.input_path = (dir.path / "missing.csv").string();
        c.out_dir = dir.str();
        std::string log;
        CHECK(run(c, &log) == 3);
        CHECK(log.rfind("error[io]: ", 0) == 0);
        CHECK(std::count(log.begin(), log.end(), '\n') == 1);

        {
            std::ofstream bad(dir.path / "bad.csv");
            bad << "time,status,z1\n1,3,0\n2,1,1\n";
        }
        c.input_path = (dir.path / "bad.csv").string();
        CHECK(run(c, &log) == 4);
        CHECK(log.rfind("error[validation]: ", 0) == 0);

        RunConfig b;
        b.command = Command::benchmark;
        b.example = 1;
        b.censoring = 1.5;
        CHECK(run(b, &log) == 2);
        b.censoring = 0.2;
        b.workers = 0;
        CHECK(run(b) == 2);

        c.input_path = write_dataset(dir, oracle::random_dataset(6, 40, 3));
        c.conditioning = ConditioningSpec::parse("4");
        CHECK(run(c) != 0);

        CHECK(exit_code(ErrorCategory::fit) == 5);
        CHECK_THROWS_AS(ConditioningSpec::parse("0"), ConfigError);
        CHECK_THROWS_AS(ConditioningSpec::parse("x"), ConfigError);
    }

    TEST_CASE("seed resolution")
    {
        CHECK(resolve_seed(7) == 7u);
        ::setenv("COXSCREEN_SEED", "42", 1);
        CHECK(resolve_seed(std::nullopt) == 42u);
        CHECK(resolve_seed(3) == 3u);
        ::setenv("COXSCREEN_SEED", "abc", 1);
        CHECK_THROWS_AS(resolve_seed(std::nullopt), ConfigError);
        ::unsetenv("COXSCREEN_SEED");
        CHECK_FALSE(resolve_seed(std::nullopt).has_value());
    }
}
