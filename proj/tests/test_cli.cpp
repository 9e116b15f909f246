#include <doctest.h>

#include "relscott/error.hpp"
#include "relscott/runner.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace relscott;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::path(RELSCOTT_TEST_SCRATCH) / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

fs::path write_manifest(const fs::path& dir, const std::string& text)
{
    const fs::path p = dir / "manifest.ini";
    std::ofstream(p) << text;
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream is(p);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

int run_manifest(const fs::path& dir, const std::string& text, const fs::path& out)
{
    cli::RunOptions o;
    o.manifest = write_manifest(dir, text);
    o.out = out;
    return cli::run(o);
}

} // namespace

TEST_CASE("manifest values and validation")
{
    const auto m = cli::Manifest::parse("[run]\ncommand = tf\n[tf]\ncharges = 1, 10 ,100\nflag = yes\nbad = 1.5x\n");
    CHECK(m.command() == "tf");
    CHECK(m.numbers("tf.charges", {}) == std::vector<double>{1, 10, 100});
    CHECK(m.flag("tf.flag", false));
    CHECK(m.number("tf.missing", 2.5) == 2.5);
    CHECK_THROWS_AS(m.number("tf.bad", 0.0), ValidationError);
    CHECK_THROWS_AS(m.numbers("tf.empty", {}), ValidationError);
    CHECK_THROWS_AS(m.integer("tf.charges", 0), ValidationError);
    CHECK_THROWS_AS(cli::Manifest::parse("[run\ncommand"), ValidationError);
    // defaults are echoed
    bool seen = false;
    for (const auto& [k, v] : m.echo()) {
        seen = seen || (k == "tf.missing" && v == "2.5");
    }
    CHECK(seen);
}

TEST_CASE("nuclear parameters beyond the semiclassical constraint are rejected")
{
    const auto ok = cli::Manifest::parse("[nuclei]\nZ = 10\nalpha = 0.01\n");
    CHECK(cli::nuclei_from(ok).max_coupling() == doctest::Approx(0.1));
    const auto bad = cli::Manifest::parse("[nuclei]\nZ = 100\nalpha = 0.01\n");
    try {
        cli::nuclei_from(bad);
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("beta") != std::string::npos);
    }
}

TEST_CASE("tf command writes the solution and reruns byte-identically")
{
    const auto dir = scratch("tf");
    const std::string text = "[run]\ncommand = tf\n";
    REQUIRE(run_manifest(dir, text, dir / "a") == cli::exit_ok);
    REQUIRE(run_manifest(dir, text, dir / "b") == cli::exit_ok);
    const auto j = nlohmann::json::parse(slurp(dir / "a" / "tf.json"));
    CHECK(j["slope"].get<double>() == doctest::Approx(-1.58807).epsilon(1e-4 / 1.58807));
    CHECK(slurp(dir / "a" / "tf_energy.csv") == slurp(dir / "b" / "tf_energy.csv"));
    CHECK(slurp(dir / "a" / "run.log").find("tf.charges = 1,10,100") != std::string::npos);
}

TEST_CASE("validation failures exit with code 2 and an error record")
{
    const auto dir = scratch("bad");
    CHECK(run_manifest(dir, "[run]\ncommand = nothing\n", dir / "o1") == cli::exit_validation);
    CHECK(fs::exists(dir / "o1" / "error.json"));
    CHECK(run_manifest(dir, "[run]\ncommand = crit\n[crit]\nbetas = 0.5, 0.7\n", dir / "o2") == cli::exit_validation);
    CHECK(run_manifest(dir, "[run]\ncommand = asymptotics\n[asymptotics]\nh = 0.2,0.1,0.05,0.04,0.03\nbeta = 0.1\n",
                       dir / "o3") == cli::exit_validation);
    const auto err = nlohmann::json::parse(slurp(dir / "o3" / "error.json"));
    CHECK(err["status"] == "validation_error");
    CHECK(err["message"].get<std::string>().find("beta") != std::string::npos);
}

TEST_CASE("lemmas report hash is deterministic and the seed flag overrides the manifest")
{
    const auto dir = scratch("lemmas");
    const std::string text = "[run]\ncommand = lemmas\nseed = 42\n[lemmas]\ninstances = 100\n";
    REQUIRE(run_manifest(dir, text, dir / "a") == cli::exit_ok);
    REQUIRE(run_manifest(dir, text, dir / "b") == cli::exit_ok);
    const auto a = nlohmann::json::parse(slurp(dir / "a" / "lemmas.json"));
    const auto b = nlohmann::json::parse(slurp(dir / "b" / "lemmas.json"));
    CHECK(a["violations"] == 0);
    CHECK(a["report_hash"] == b["report_hash"]);

    cli::RunOptions o;
    o.manifest = write_manifest(dir, text);
    o.out = dir / "c";
    o.seed = 7;
    REQUIRE(cli::run(o) == cli::exit_ok);
    const auto c = nlohmann::json::parse(slurp(dir / "c" / "lemmas.json"));
    CHECK(c["seed"] == 7);
    CHECK(c["report_hash"] != a["report_hash"]);
}

TEST_CASE("spectrum and cover commands")
{
    const auto dir = scratch("misc");
    CHECK(run_manifest(dir, "[run]\ncommand = spectrum\n[spectrum]\nl_max = 0\n", dir / "s") == cli::exit_ok);
    CHECK(slurp(dir / "s" / "spectrum.csv").rfind("l,n,eigenvalue", 0) == 0);
    CHECK(run_manifest(dir, "[run]\ncommand = cover\n[cover]\nr = 0.5\nR = 2\nsamples = 200\n", dir / "c") ==
          cli::exit_ok);
    const auto j = nlohmann::json::parse(slurp(dir / "c" / "cover.json"));
    CHECK(j["covered"] == true);
}
