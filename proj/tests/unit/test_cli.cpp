#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "commands.hpp"
#include "config.hpp"
#include "doctest.h"
#include "phonon/data.hpp"
#include "phonon/errors.hpp"

using namespace phonon;
using namespace phonon::cli;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("phonon_cli_" + name);
    fs::remove_all(p);
    return p;
}

RunConfig tiny_config(const fs::path& dir) {
    RunConfig c;
    c.grid.by_counts = true;
    c.grid.counts = GridCounts{0.5, 1.0, 0.1, 2.0, 5, 8, 10, 50};
    c.experiment.I = 10;
    c.inversion.max_iters = 30;
    c.adjoint.psi_time = 1.0;
    c.output.dir = dir.string();
    return c;
}

std::string config_error(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("every preset round-trips through JSON") {
    for (const auto& name : preset_names()) {
        const auto c = preset(name);
        CHECK(config_from_json(config_to_json(c)) == c);
        CHECK(parse_config(config_to_json(c).dump()) == c);
        CHECK_NOTHROW(validate(c));
    }
    CHECK_THROWS_AS(preset("fig99"), ConfigError);
}

TEST_CASE("preset contents") {
    CHECK(preset("fig3").forward.snapshot_times == std::vector<double>{0.01, 0.5, 1.0, 3.0});
    CHECK(preset("fig5").adjoint.snapshot_times == std::vector<double>{5.0, 4.0, 2.0, 0.01});
    CHECK(preset("fig5").adjoint.boundary == AdjointBoundary::interface_demo);
    CHECK(preset("example2").inversion.snapshot_iters == std::vector<std::size_t>{100, 200, 500, 3000});
    const auto e1 = preset("example1");
    CHECK(e1.inversion.mode == InversionMode::parametrized);
    REQUIRE(e1.inversion.initial.size() == 3);
    CHECK(e1.inversion.initial[1].params == TanhParams{2.0, 0.4});
    CHECK(preset("example1b").inversion.initial[1].params == TanhParams{2.0, 0.5});
    const auto e3 = preset("example3");
    CHECK(e3.experiment.J == 50);
    CHECK(e3.experiment.noise == 0.025);
}

TEST_CASE("config errors name the field") {
    CHECK(config_error(R"({"grid": {"dx": 0.02, "colour": 1}})").find("grid.colour") != std::string::npos);
    CHECK(config_error(R"({"inversion": {"mode": "newton"}})").find("inversion.mode") != std::string::npos);
    CHECK(config_error(R"({"grid": {"dx": 0.02, "nx": 10}})").find("grid") != std::string::npos);
    CHECK(config_error(R"({"experiment": {"I": "many"}})").find("experiment.I") != std::string::npos);
    CHECK(config_error(R"({"inversion": {"initial": [{"kind": "params", "c": 1}]}})")
              .find("inversion.initial[0].c") != std::string::npos);
    CHECK(config_error("{not json").find("config") != std::string::npos);
    CHECK(config_error(R"({"sgd": {}})").find("sgd") != std::string::npos);
}

TEST_CASE("validation catches bad values before any solve") {
    auto c = preset("example2");
    c.experiment.I = 21;
    CHECK_THROWS_AS(validate(c), ConfigError);
    c = preset("example2");
    c.grid.counts.nt = 100;  // CFL
    CHECK_THROWS_AS(validate(c), ConfigError);
    c = preset("example1");
    c.inversion.initial[0].kind = EtaSpec::Kind::constant;
    CHECK_THROWS_AS(validate(c), ConfigError);
    c = preset("fig3");
    c.forward.eta.kind = EtaSpec::Kind::constant;
    c.forward.eta.value = 1.5;
    CHECK_THROWS_AS(validate(c), ConfigError);
}

TEST_CASE("eta specs") {
    const auto g = PhaseGrid::make(GridSpacing{});
    EtaSpec q;
    q.kind = EtaSpec::Kind::quadratic;
    q.value = 0.4891;
    q.c2 = 0.1;
    q.center = 0.05;
    const auto e = q.build(g);
    CHECK(e[0] == doctest::Approx(0.4891));
    CHECK(e[g.nomega() - 1] == doctest::Approx(0.4891 - 0.1 * 1.95 * 1.95));
    EtaSpec v;
    v.kind = EtaSpec::Kind::values;
    v.values = {0.1, 0.2};
    CHECK_THROWS_AS(v.build(g), ConfigError);
}

TEST_CASE("forward with zero inflow writes zeros") {
    const auto dir = scratch("zero");
    auto c = tiny_config(dir);
    c.forward.phi.kind = PhiSpec::Kind::zero;
    c.forward.snapshot_times = {0.5};
    std::ostringstream err;
    CHECK(run_command("forward", c, {}, err) == exit_ok);
    std::istringstream in(slurp(dir / "deltaT.csv"));
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,deltaT");
    int rows = 0;
    while (std::getline(in, line)) {
        CHECK(line.substr(line.find(',') + 1) == "0");
        ++rows;
    }
    CHECK(rows == 51);
    CHECK(fs::exists(dir / "forward_x_mu_t0.5.csv"));
    CHECK(fs::exists(dir / "forward_x_omega_t0.5.csv"));
    const auto meta = nlohmann::json::parse(slurp(dir / "metadata.json"));
    CHECK(config_from_json(meta["config"]) == c);
    fs::remove_all(dir);
}

TEST_CASE("reconstruct is byte-reproducible and records the dataset hash") {
    const auto d1 = scratch("r1");
    const auto d2 = scratch("r2");
    std::ostringstream err;
    auto c = tiny_config(d1);
    c.inversion.snapshot_iters = {10, 30};
    REQUIRE(run_command("reconstruct", c, {}, err) == exit_ok);
    c.output.dir = d2.string();
    REQUIRE(run_command("reconstruct", c, {}, err) == exit_ok);
    for (const char* f : {"history.csv", "eta_final.csv", "eta_snapshots.csv", "dataset.csv"}) {
        CHECK(slurp(d1 / f) == slurp(d2 / f));
    }
    const auto meta = nlohmann::json::parse(slurp(d1 / "metadata.json"));
    CHECK(meta["dataset_hash"] == dataset_hash(load_dataset(d1 / "dataset.csv")));
    CHECK(meta["runs"][0]["iterations"] == 30);
    fs::remove_all(d1);
    fs::remove_all(d2);
}

TEST_CASE("generate then reconstruct from the truth stops at once with zero loss") {
    const auto dir = scratch("gen");
    std::ostringstream err;
    auto c = tiny_config(dir);
    REQUIRE(run_command("generate", c, {}, err) == exit_ok);
    auto r = tiny_config(dir / "rec");
    r.experiment.dataset = (dir / "dataset.csv").string();
    r.inversion.mode = InversionMode::parametrized;
    r.inversion.initial = {EtaSpec{}};
    REQUIRE(run_command("reconstruct", r, {}, err) == exit_ok);
    const auto meta = nlohmann::json::parse(slurp(dir / "rec" / "metadata.json"));
    CHECK(meta["runs"][0]["iterations"] == 1);
    CHECK(meta["runs"][0]["converged"] == true);
    CHECK(meta["runs"][0]["final_loss"] == 0.0);
    fs::remove_all(dir);
}

TEST_CASE("exit codes") {
    std::ostringstream err;
    auto c = tiny_config(scratch("codes"));
    c.experiment.I = 50;
    CHECK(run_command("generate", c, {}, err) == exit_usage);
    CHECK(err.str().find("config") != std::string::npos);
    c = tiny_config(scratch("codes"));
    c.experiment.dataset = "/nonexistent.csv";
    CHECK(run_command("reconstruct", c, {}, err) == exit_usage);
    CHECK(run_command("bogus", tiny_config(scratch("codes")), {}, err) == exit_usage);
}
