#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "rlw/rlw.hpp"

using namespace rlw;

namespace {

std::filesystem::path temp_path(const std::string& name)
{
    return std::filesystem::temp_directory_path() / ("rlw_cli_" + name);
}

void write_file(const std::filesystem::path& p, const std::string& text)
{
    std::ofstream(p) << text;
}

int cli(const std::string& args)
{
    const std::string cmd = std::string(RLW_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Settings, ApplySettingNormalizesKeys)
{
    RunSettings s;
    apply_setting(s, "--problem", "example2");
    apply_setting(s, "rhs_sign", "paper");
    apply_setting(s, "leapfrog-alpha", "off");
    apply_setting(s, "boundary", "paper-copy");
    apply_setting(s, "split", "additive");
    apply_setting(s, "k", "0.01");
    apply_setting(s, "levels", "3..5");
    apply_setting(s, "alpha", "0.25");
    EXPECT_EQ(s.problem, "example2");
    EXPECT_EQ(s.rhs_sign, RhsSign::paper);
    EXPECT_FALSE(s.leapfrog_alpha);
    EXPECT_EQ(s.boundary, BoundaryMode::paper_copy);
    EXPECT_EQ(s.split, SourceSplit::additive);
    EXPECT_DOUBLE_EQ(*s.k, 0.01);
    EXPECT_EQ(s.level_from, 3);
    EXPECT_EQ(s.level_to, 5);
    EXPECT_DOUBLE_EQ(s.coefficients.alpha, 0.25);
    apply_setting(s, "k", "auto");
    EXPECT_FALSE(s.k.has_value());
}

TEST(Settings, RejectsBadValues)
{
    RunSettings s;
    EXPECT_THROW(apply_setting(s, "colour", "red"), ConfigError);
    EXPECT_THROW(apply_setting(s, "M", "8x"), ConfigError);
    EXPECT_THROW(apply_setting(s, "k", "fast"), ConfigError);
    EXPECT_THROW(apply_setting(s, "boundary", "periodic"), ConfigError);
    EXPECT_THROW(apply_setting(s, "levels", "3-5"), ConfigError);
}

TEST(Settings, ParsesKeyValueAndJson)
{
    const auto kv = parse_config_text("# comment\nproblem = example3\nM = 12  # trailing\n\nsvg = \"a b.svg\"\n");
    ASSERT_EQ(kv.size(), 3u);
    EXPECT_EQ(kv[0], (std::pair<std::string, std::string>{"problem", "example3"}));
    EXPECT_EQ(kv[1].second, "12");
    EXPECT_EQ(kv[2].second, "a b.svg");

    const auto js = parse_config_text(R"({"problem": "example2", "M": 8, "T": 0.5, "leapfrog_alpha": false})");
    RunSettings s;
    for (const auto& [k, v] : js) apply_setting(s, k, v);
    EXPECT_EQ(s.problem, "example2");
    EXPECT_EQ(s.M, 8);
    EXPECT_DOUBLE_EQ(*s.T, 0.5);
    EXPECT_FALSE(s.leapfrog_alpha);

    EXPECT_THROW(parse_config_text("{not json"), ConfigError);
    EXPECT_THROW(parse_config_text("just words"), ConfigError);
    EXPECT_THROW(load_config_file("/nonexistent/config.txt"), IoError);
}

TEST(Settings, ManifestRecordsEverything)
{
    RunSettings s;
    s.problem = "example1";
    const RunManifest m{"solve", s, 16, 0.025, 40, "2026-01-01T00:00:00Z", {"a.csv"}};
    const auto j = to_json(m);
    EXPECT_EQ(j["command"], "solve");
    EXPECT_EQ(j["M"], 16);
    EXPECT_EQ(j["N"], 40);
    EXPECT_EQ(j["k_rule"], "auto");
    EXPECT_EQ(j["split"], "consistent");
    EXPECT_EQ(j["boundary"], "exact");
    EXPECT_EQ(j["outputs"][0], "a.csv");
}

TEST(Cli, ExitCodes)
{
    EXPECT_EQ(cli("solve --problem example1 --M 8"), 0);
    EXPECT_EQ(cli("verify --M 8 --seed 3"), 0);
    EXPECT_EQ(cli("solve --problem nope"), 2);
    EXPECT_EQ(cli("solve --M 3"), 2);
    EXPECT_EQ(cli("verify --M 6"), 2);
    EXPECT_EQ(cli("solve --boundary sideways"), 2);
    EXPECT_EQ(cli("frobnicate"), 2);
    EXPECT_EQ(cli("solve --config /nonexistent/file.json"), 4);
    EXPECT_EQ(cli("solve --M 8 --out /nonexistent-dir/out.csv"), 4);
}

TEST(Cli, ConfigFileLayeredUnderFlags)
{
    const auto cfg = temp_path("cfg.txt");
    const auto out = temp_path("levels.csv");
    write_file(cfg, "problem = example2\nM = 8\nT = 0.25\nout = " + out.string() + "\n");
    ASSERT_EQ(cli("solve --config " + cfg.string() + " --M 6"), 0);
    std::ifstream man(out.string() + ".manifest.json");
    ASSERT_TRUE(man.good());
    const auto j = nlohmann::json::parse(man);
    EXPECT_EQ(j["problem"], "example2");  // from the file
    EXPECT_EQ(j["M"], 6);                 // flag wins
    EXPECT_DOUBLE_EQ(j["T"].get<double>(), 0.25);
    std::filesystem::remove(cfg);
    std::filesystem::remove(out);
    std::filesystem::remove(out.string() + ".manifest.json");
}

TEST(Cli, ConvergenceWritesCsvAndSvg)
{
    const auto out = temp_path("conv.csv"), svg = temp_path("conv.svg");
    ASSERT_EQ(cli("convergence --problem example1 --levels 2..3 --out " + out.string() + " --svg " + svg.string()), 0);
    std::ifstream in(out);
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, "h,k,norm_u,norm_U,error,rate");
    EXPECT_TRUE(std::filesystem::exists(svg));
    // level 1 has no interior but is reported, not fatal
    EXPECT_EQ(cli("convergence --problem example1 --levels 1..2"), 0);
    std::filesystem::remove(out);
    std::filesystem::remove(svg);
    std::filesystem::remove(out.string() + ".manifest.json");
}

TEST(Cli, DumpAtWritesFieldSlice)
{
    const auto dump = temp_path("dump.csv");
    ASSERT_EQ(cli("solve --M 8 --dump-at 0.5 " + dump.string()), 0);
    std::ifstream in(dump);
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, "x,y,u,U,e");
    std::filesystem::remove(dump);
}
