#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qchill/runner.hpp"

using namespace qchill;
namespace fs = std::filesystem;

namespace {

std::string error_pointer(const json& doc)
{
    try {
        parse_config(doc);
    } catch (const ConfigError& e) {
        return e.pointer();
    }
    return "<accepted>";
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path fresh_dir(const std::string& name)
{
    const fs::path d = fs::temp_directory_path() / ("qchill_test_" + name);
    fs::remove_all(d);
    return d;
}

RunResult run_in(const std::string& sub, const fs::path& dir, json doc = default_config_json(),
                 RunOptions o = {})
{
    o.out_dir = dir.string();
    o.quiet = true;
    std::ostringstream log;
    return run(sub, doc, o, log);
}

} // namespace

TEST(Config, DefaultDocumentParses)
{
    const RunConfig c = parse_config(default_config_json());
    EXPECT_EQ(c.kind, ModelKind::FourLevel);
    EXPECT_EQ(c.params.omega_c, 2.0);
    EXPECT_EQ(c.params.g, 0.1);
    EXPECT_EQ(c.baths[Bath::c].temperature, 7.0);
    EXPECT_EQ(c.sweep.n, 120u);
}

TEST(Config, SchemaErrorsCarryPointers)
{
    json d = default_config_json();
    d["foo"] = 1;
    EXPECT_EQ(error_pointer(d), "/foo");

    d = default_config_json();
    d["g"] = -0.1;
    EXPECT_EQ(error_pointer(d), "/g");

    d = default_config_json();
    d["omega_c"] = "two";
    EXPECT_EQ(error_pointer(d), "/omega_c");

    d = default_config_json();
    d.erase("omega_h");
    EXPECT_EQ(error_pointer(d), "/omega_h");

    d = default_config_json();
    d["baths"][1]["T"] = 0.0;
    EXPECT_EQ(error_pointer(d), "/baths/1/T");

    d = default_config_json();
    d["baths"][2]["filter"] = {{"type", "high_cutoff"}};
    EXPECT_EQ(error_pointer(d), "/baths/2/filter/omega_max");

    d = default_config_json();
    d["baths"][2]["filter"] = {{"type", "flat"}, {"width", 1.0}};
    EXPECT_EQ(error_pointer(d), "/baths/2/filter/width");

    d = default_config_json();
    d["baths"][2]["label"] = "h";
    EXPECT_EQ(error_pointer(d).rfind("/baths", 0), 0u);

    d = default_config_json();
    d["kind"] = "five_level";
    EXPECT_EQ(error_pointer(d), "/kind");
}

TEST(Config, SemanticChecks)
{
    json d = default_config_json();
    d["omega_c"] = 7.0;
    EXPECT_THROW(parse_config(d), ConfigError);

    d = default_config_json();
    d["kind"] = "three_qubit";
    d["g"] = 0.0;
    EXPECT_THROW(parse_config(d), ConfigError);

    d = default_config_json();
    d["kappa"] = 0.2;
    EXPECT_THROW(parse_config(d), ConfigError);
    d["kind"] = "three_level_shorted";
    d.erase("g");
    EXPECT_NO_THROW(parse_config(d));
}

TEST(Digest, Fnv1aOfCanonicalDump)
{
    const json d = default_config_json();
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << oracle::fnv1a(d.dump());
    EXPECT_EQ(config_digest(d), os.str());
    EXPECT_EQ(oracle::fnv1a("a"), 0xaf63dc4c8601ec8cULL);
    // Key order in the source text does not matter.
    EXPECT_EQ(config_digest(json::parse(R"({"b":1,"a":2})")), config_digest(json::parse(R"({"a":2,"b":1})")));
    json e = d;
    e["g"] = 0.2;
    EXPECT_NE(config_digest(d), config_digest(e));
}

TEST(Format, ShortestRoundTrip)
{
    for (double x : {0.1, 1.0 / 3.0, 2.625, 1e-300, -7.0 / 9.0, 123456789.0}) {
        EXPECT_EQ(std::stod(format_double(x)), x);
    }
    EXPECT_EQ(format_double(0.1), "0.1");
    EXPECT_EQ(format_double(2.0), "2");
}

TEST(Csv, WritesHeaderRowsAndBlanks)
{
    const fs::path d = fresh_dir("csv");
    fs::create_directories(d);
    {
        CsvWriter w((d / "t.csv").string(), {"a", "b"});
        w.row({1.5, std::nullopt});
    }
    EXPECT_EQ(slurp(d / "t.csv"), "a,b\n1.5,\n");
    EXPECT_THROW(CsvWriter((d / "missing" / "t.csv").string(), {"a"}), std::runtime_error);
    fs::remove_all(d);
}

TEST(Run, BadConfigWritesNothing)
{
    const fs::path d = fresh_dir("bad");
    json doc = default_config_json();
    doc["g"] = -0.1;
    const RunResult r = run_in("steady", d, doc);
    EXPECT_EQ(r.exit_code, kExitConfig);
    EXPECT_NE(r.message.find("/g"), std::string::npos);
    EXPECT_FALSE(fs::exists(d));
}

TEST(Run, UnknownSubcommandAndWrongKind)
{
    const fs::path d = fresh_dir("kind");
    EXPECT_EQ(run_in("frobnicate", d).exit_code, kExitConfig);
    EXPECT_FALSE(fs::exists(d));
    json doc = default_config_json();
    doc["kind"] = "three_level";
    doc.erase("g");
    EXPECT_EQ(run_in("breakdown", d, doc).exit_code, kExitConfig);
    fs::remove_all(d);
}

TEST(Run, SteadyWritesReportAndManifest)
{
    const fs::path d = fresh_dir("steady");
    const RunResult r = run_in("steady", d);
    ASSERT_EQ(r.exit_code, kExitOk) << r.message;
    const json s = json::parse(slurp(d / "steady.json"));
    const SteadyReport ref = solve_steady(build_four_level(2.0, 6.0, 0.1), make_baths(9, 8, 7));
    EXPECT_EQ(s["currents"]["Q_c"].get<double>(), ref.currents[Bath::c]);
    const json m = json::parse(slurp(d / "manifest.json"));
    EXPECT_EQ(m["subcommand"], "steady");
    EXPECT_EQ(m["exit_code"], 0);
    EXPECT_EQ(m["config_digest"], config_digest(m["config"]));
    for (const auto& c : m["checks"]) EXPECT_TRUE(c["pass"].get<bool>()) << c.dump();
    fs::remove_all(d);
}

TEST(Run, ArtifactsAreByteIdenticalAcrossRuns)
{
    RunOptions o;
    o.n_trajectories = 4;
    o.duration = 2e4;
    o.seed = 5;
    const fs::path d = fresh_dir("det");
    for (const std::string sub : {"breakdown", "mcwf", "optimize", "diagnose"}) {
        fs::remove_all(d);
        ASSERT_EQ(run_in(sub, d, default_config_json(), o).exit_code, kExitOk) << sub;
        std::map<std::string, std::string> first;
        for (const auto& e : fs::directory_iterator(d)) first[e.path().filename().string()] = slurp(e.path());
        fs::remove_all(d);
        ASSERT_EQ(run_in(sub, d, default_config_json(), o).exit_code, kExitOk) << sub;
        for (const auto& [name, bytes] : first) {
            if (name == "manifest.json") {
                json ma = json::parse(bytes);
                json mb = json::parse(slurp(d / name));
                ma.erase("wall_time_s");
                mb.erase("wall_time_s");
                EXPECT_EQ(ma, mb) << sub;
            } else {
                EXPECT_EQ(bytes, slurp(d / name)) << sub << "/" << name;
            }
        }
    }
    fs::remove_all(d);
}

TEST(Run, CheckOnlyWritesManifestAlone)
{
    const fs::path d = fresh_dir("check");
    RunOptions o;
    o.check_only = true;
    const RunResult r = run_in("sweep", d, default_config_json(), o);
    EXPECT_EQ(r.exit_code, kExitOk) << r.message;
    std::vector<std::string> names;
    for (const auto& e : fs::directory_iterator(d)) names.push_back(e.path().filename().string());
    EXPECT_EQ(names, std::vector<std::string>{"manifest.json"});
    EXPECT_FALSE(r.checks.empty());
    fs::remove_all(d);
}

TEST(Run, ReproductionWritesAllCurves)
{
    const fs::path d = fresh_dir("repro");
    json doc = default_config_json();
    doc["reproduction"] = {{"n_points", 40}};
    const RunResult r = run_in("repro-fig2", d, doc);
    ASSERT_EQ(r.exit_code, kExitOk) << r.message;
    for (const char* f : {"closed_g0p1.csv", "closed_g0p3.csv", "closed_g0p5.csv", "open_g0p1.csv",
                          "entropy_scan.csv", "manifest.json"}) {
        EXPECT_TRUE(fs::exists(d / f)) << f;
    }
    const std::string head = slurp(d / "closed_g0p1.csv").substr(0, 40);
    EXPECT_EQ(head.rfind("omega_c,Qdot_w,Qdot_h,Qdot_c,cop", 0), 0u);
    fs::remove_all(d);
}

TEST(Run, ChannelDump)
{
    const fs::path d = fresh_dir("channels");
    RunOptions o;
    o.dump_channels = true;
    ASSERT_EQ(run_in("steady", d, default_config_json(), o).exit_code, kExitOk);
    const std::string s = slurp(d / "channels.csv");
    EXPECT_EQ(s.rfind("bath,omega,rate_down,rate_up,transitions\n", 0), 0u);
    EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 6);
    fs::remove_all(d);
}
