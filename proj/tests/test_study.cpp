#include "doctest.h"

#include "gradfem/generators.hpp"
#include "gradfem/study.hpp"
#include "study_options.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

using namespace gradfem;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name)
{
    const fs::path d = fs::temp_directory_path() / ("gradfem_test_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::vector<std::string> lines_of(const std::string& path)
{
    std::ifstream in(path);
    std::vector<std::string> out;
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

std::string without_seconds(const std::string& row)
{
    return row.substr(0, row.rfind(','));
}

StudyConfig small_point_study(const fs::path& dir)
{
    StudyConfig cfg;
    cfg.problem = Problem::Point2d;
    cfg.strategy = GradingStrategy::RescaledIsotropic;
    cfg.mu = 0.5;
    cfg.beta = 0.4;
    cfg.h = {0.25, 0.125};
    cfg.output_dir = dir.string();
    return cfg;
}

int run_cli(const std::string& args)
{
    const std::string cmd = std::string(GRADFEM_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("single-level study has an undefined order")
{
    const fs::path dir = scratch_dir("single");
    StudyConfig cfg = small_point_study(dir);
    cfg.h = {0.25};
    const StudyResult r = run_study(cfg);
    CHECK_FALSE(r.eoc.defined);
    const auto rows = lines_of(r.csv_path);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == csv_header());
    CHECK(r.table.find("e.o.c.(h)") != std::string::npos);
}

TEST_CASE("studies are deterministic apart from timings")
{
    const fs::path dir = scratch_dir("determinism");
    StudyConfig cfg = small_point_study(dir);
    cfg.sigma = 0.6;
    cfg.name = "a";
    const StudyResult a = run_study(cfg);
    cfg.name = "b";
    const StudyResult b = run_study(cfg);
    const auto ra = lines_of(a.csv_path);
    const auto rb = lines_of(b.csv_path);
    REQUIRE(ra.size() == 3);
    REQUIRE(rb.size() == ra.size());
    for (std::size_t i = 0; i < ra.size(); ++i) CHECK(without_seconds(ra[i]) == without_seconds(rb[i]));
    REQUIRE(a.eoc.defined);
    CHECK(a.eoc.by_h.count(kErrL2) == 1);
    CHECK(a.eoc.by_h.count(kErrL2Beta) == 1);
    CHECK(a.eoc.by_h.count(kErrH1Sigma) == 1);
}

TEST_CASE("a failing level keeps the completed rows")
{
    const fs::path dir = scratch_dir("partial");
    StudyConfig cfg = small_point_study(dir);
    cfg.h = {0.25, 1.0 / 64};
    const std::size_t saved = vertex_budget();
    set_vertex_budget(2000);
    bool raised = false;
    try {
        (void)run_study(cfg);
    } catch (const StageError& e) {
        raised = true;
        CHECK(e.stage() == Stage::Mesh);
        CHECK(e.level() == 1);
        CHECK(e.kind() == ErrorKind::ResourceLimit);
    }
    set_vertex_budget(saved);
    CHECK(raised);
    const auto rows = lines_of((dir / "study.csv").string());
    CHECK(rows.size() == 2);
}

TEST_CASE("solving on a re-imported mesh reproduces the errors")
{
    const fs::path dir = scratch_dir("reimport");
    StudyConfig cfg;
    cfg.problem = Problem::Segment3d;
    cfg.strategy = GradingStrategy::AnisotropicTensor;
    cfg.mu = 0.5;
    cfg.beta = 0.3;
    cfg.h = {0.4};
    cfg.output_dir = dir.string();
    const MeshRunResult m = run_mesh(cfg);
    CHECK(m.validation.passed());
    CHECK(m.audit.passed());
    const SolveRunResult direct = run_solve_on(cfg, m.mesh, 0.4);
    const SolveRunResult reread = run_solve_on(cfg, read_mesh_file(m.mesh_path), 0.4);
    for (const auto& [name, value] : direct.level.record.errors)
        CHECK(reread.level.record.errors.at(name) == doctest::Approx(value).epsilon(1e-12));
}

TEST_CASE("configuration validation")
{
    StudyConfig cfg;
    cfg.h = {0.1};
    CHECK_NOTHROW(cfg.validate());
    auto rejects = [](StudyConfig c) {
        CHECK_THROWS_AS(c.validate(), Error);
    };
    StudyConfig c = cfg;
    c.mu = 0.0;
    rejects(c);
    c = cfg;
    c.mu = 1.2;
    rejects(c);
    c = cfg;
    c.strategy = GradingStrategy::Uniform;
    c.mu = 0.5;
    rejects(c);
    c = cfg;
    c.strategy = GradingStrategy::AnisotropicTensor;
    rejects(c);
    c = cfg;
    c.h.clear();
    rejects(c);
    c = cfg;
    c.beta = -1.5;
    rejects(c);
    c = cfg;
    c.problem = Problem::Segment2d;
    c.strategy = GradingStrategy::ConstructedIsotropic;
    c.approximation = Approximation::TruncatedInterpolant;
    rejects(c);

    c = cfg;
    c.h.clear();
    c.h0 = 0.125;
    c.levels = 3;
    c.ratio = 2.0;
    const auto sizes = c.level_sizes();
    REQUIRE(sizes.size() == 3);
    CHECK(sizes[2] == doctest::Approx(0.03125));
}

TEST_CASE("manifests and flags share one binding")
{
    const fs::path dir = scratch_dir("manifest");
    const fs::path file = dir / "m.cfg";
    std::ofstream(file) << "problem = segment3d\nstrategy = anisotropic\nmu = 0.4\nbeta = 0.5\nh = [0.4, 0.2]\n"
                           "depth = 2\n";
    const StudyConfig m = tools::load_manifest(file.string());
    CHECK(m.problem == Problem::Segment3d);
    CHECK(m.strategy == GradingStrategy::AnisotropicTensor);
    CHECK(m.mu == 0.4);
    REQUIRE(m.beta.has_value());
    CHECK(*m.beta == 0.5);
    CHECK_FALSE(m.sigma.has_value());
    CHECK(m.h == std::vector<double>{0.4, 0.2});
    CHECK(m.depth == 2);

    CLI::App app;
    app.set_help_flag();
    tools::StudyOptions opts(app);
    app.parse(std::vector<std::string>{"0.7", "--mu", file.string(), "--config"});
    const StudyConfig o = opts.finish();
    CHECK(o.mu == 0.7);
    CHECK(o.problem == Problem::Segment3d);
}

TEST_CASE("CLI exit codes")
{
    const fs::path dir = scratch_dir("cli");
    const std::string out = " --output-dir " + dir.string();
    CHECK(run_cli("check-mu --problem point2d --mu 0.4 --beta 0") == 0);
    CHECK(run_cli("mesh --problem point2d --strategy rescaled --mu 0.5 --h 0.25" + out) == 0);
    CHECK(fs::exists(dir / "study.mesh"));
    CHECK(run_cli("study --problem point2d --mu 0.5 --h 0.25 0.125 --name s" + out) == 0);
    CHECK(fs::exists(dir / "s.csv"));
    CHECK(run_cli("solve --problem point2d --mu 0.5 --h 0.25 --name v" + out) == 0);
    CHECK(fs::exists(dir / "v.vtk"));
    CHECK(run_cli("solve --input " + (dir / "study.mesh").string() + " --problem point2d --mu 0.5 --h 0.25 --name w" +
                  out) == 0);
    CHECK(run_cli("study --problem point2d --mu 1.5 --h 0.25" + out) == 2);
    CHECK(run_cli("study --problem bogus --h 0.25" + out) == 2);
    CHECK(run_cli("study --unknown-flag" + out) == 2);
    CHECK(run_cli("solve --input " + (dir / "missing.mesh").string() + " --h 0.25" + out) == 3);
    CHECK(run_cli("--help") == 0);
}
