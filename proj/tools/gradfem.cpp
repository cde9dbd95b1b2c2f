#include "study_options.hpp"

#include "gradfem/parallel.hpp"

#include <cstdio>

using namespace gradfem;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitMesh = 3;
constexpr int kExitSolver = 4;
constexpr int kExitQuadrature = 5;

int exit_code(Stage s)
{
    switch (s) {
    case Stage::Config: return kExitConfig;
    case Stage::Mesh: return kExitMesh;
    case Stage::Solve: return kExitSolver;
    case Stage::Quadrature: return kExitQuadrature;
    }
    return 1;
}

void print_theory(const std::vector<TheoryCheck>& checks, double mu)
{
    for (const auto& c : checks) {
        if (!c.covered) {
            std::printf("%-22s no estimate: %s\n", c.norm.c_str(), c.note.c_str());
            continue;
        }
        std::printf("%-22s %s [%s]: mu = %g %s\n", c.norm.c_str(), c.note.c_str(),
                    c.theorem.c_str(), mu, c.satisfied ? "pass" : "fail");
    }
}

void print_errors(const StudyRecord& rec)
{
    for (const auto& [name, value] : rec.errors) std::printf("%-12s %.6e\n", name.c_str(), value);
}

int cmd_mesh(const StudyConfig& cfg)
{
    const MeshRunResult r = run_mesh(cfg);
    std::printf("N = %zu, NT = %zu\n", r.mesh.num_vertices(), r.mesh.num_elements());
    std::printf("validation: %s\n", r.validation.passed() ? "pass" : "FAIL");
    for (const auto& m : r.validation.messages) std::printf("  %s\n", m.c_str());
    std::printf("grading audit: %s (ratios %.3f .. %.3f, %zu outside factor %g)\n",
                r.audit.passed() ? "pass" : "FAIL", r.audit.global_min, r.audit.global_max,
                r.audit.violations, r.audit.factor);
    std::printf("mesh: %s\n", r.mesh_path.c_str());
    if (!r.vtk_path.empty()) std::printf("vtk: %s\n", r.vtk_path.c_str());
    return r.validation.passed() ? 0 : kExitMesh;
}

int cmd_solve(const StudyConfig& cfg, const std::string& input)
{
    SolveRunResult r;
    if (input.empty()) {
        r = run_solve(cfg);
    } else {
        Mesh mesh;
        try {
            mesh = read_mesh_file(input);
        } catch (const Error& e) {
            throw StageError(Stage::Mesh, e.kind(), e.what(), 0);
        }
        r = run_solve_on(cfg, mesh, cfg.level_sizes().front());
    }
    const auto& rec = r.level.record;
    std::printf("N = %zu, NT = %zu\n", rec.vertices, rec.elements);
    if (cfg.approximation == Approximation::Galerkin)
        std::printf("solver: %d iterations, relative residual %.3e\n", r.level.solve.iterations,
                    r.level.solve.relative_residual);
    print_errors(rec);
    std::printf("vtk: %s\n", r.vtk_path.c_str());
    return 0;
}

int cmd_study(const StudyConfig& cfg)
{
    const StudyResult r = run_study(cfg);
    for (const auto& w : r.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
    print_theory(r.theory, cfg.mu);
    std::printf("\n%s", r.table.c_str());
    std::printf("csv: %s\n", r.csv_path.c_str());
    return 0;
}

int cmd_check_mu(const StudyConfig& cfg)
{
    std::vector<TheoryCheck> checks;
    try {
        cfg.problem_class().validate();
        checks = check_theory(cfg);
    } catch (const Error& e) {
        throw StageError(Stage::Config, e.kind(), e.what(), -1);
    }
    print_theory(checks, cfg.mu);
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Finite elements on graded meshes for singular sources"};
    app.set_help_flag("--help", "print this help and exit");
    tools::StudyOptions options(app);
    unsigned threads = 0;
    app.add_option("--threads", threads, "worker threads, 0 for all cores");

    auto* mesh = app.add_subcommand("mesh", "generate, validate and audit one mesh");
    auto* solve = app.add_subcommand("solve", "single solve with VTK export");
    auto* study = app.add_subcommand("study", "convergence study with CSV and table output");
    auto* check = app.add_subcommand("check-mu", "report the estimates covering the configuration");
    std::string input;
    solve->add_option("--input", input, "solve on this mesh file instead of generating one");
    for (auto* sub : {mesh, solve, study, check}) {
        sub->fallthrough();
        sub->set_help_flag("--help", "print this help and exit");
    }
    app.require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        set_thread_count(threads);
        StudyConfig cfg;
        try {
            cfg = options.finish();
            if (!check->parsed()) cfg.validate();
        } catch (const Error& e) {
            throw StageError(Stage::Config, e.kind(), e.what(), -1);
        }
        if (mesh->parsed()) return cmd_mesh(cfg);
        if (solve->parsed()) return cmd_solve(cfg, input);
        if (study->parsed()) return cmd_study(cfg);
        return cmd_check_mu(cfg);
    } catch (const StageError& e) {
        std::fprintf(stderr, "error [%s stage", to_string(e.stage()));
        if (e.level() >= 0) std::fprintf(stderr, ", level %d", e.level());
        std::fprintf(stderr, "] %s: %s\n", to_string(e.kind()), e.what());
        return exit_code(e.stage());
    } catch (const Error& e) {
        std::fprintf(stderr, "error %s: %s\n", to_string(e.kind()), e.what());
        return 1;
    }
}
