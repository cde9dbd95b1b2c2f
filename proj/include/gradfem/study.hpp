#pragma once

#include "gradfem/analysis.hpp"
#include "gradfem/error.hpp"
#include "gradfem/geometry.hpp"
#include "gradfem/mesh.hpp"
#include "gradfem/solver.hpp"
#include "gradfem/theory.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace gradfem {

enum class Problem { Point2d, Point3d, Segment3d, Segment2d };

const char* to_string(Problem p);
Problem parse_problem(const std::string& name);

/// What is compared against the exact solution at each level.
enum class Approximation { Galerkin, TruncatedInterpolant };

const char* to_string(Approximation a);
Approximation parse_approximation(const std::string& name);

struct StudyConfig {
    Problem problem = Problem::Point2d;
    GradingStrategy strategy = GradingStrategy::RescaledIsotropic;
    double mu = 1.0;
    double tau = 0.8;
    /// The unweighted L2 error is always reported; these add one weighted column each.
    std::optional<double> beta;
    std::optional<double> sigma;

    /// Explicit levels, or h0 / ratio^i for i < levels when empty.
    std::vector<double> h;
    double h0 = 0.0;
    int levels = 0;
    double ratio = 2.0;

    SolveConfig solver;
    int depth = 3;
    double density = 1.0;  // line density of segment sources
    Approximation approximation = Approximation::Galerkin;

    std::string output_dir;  // empty: $GRADFEM_OUTPUT_DIR, else the working directory
    std::string name = "study";
    bool vtk = false;
    std::uint64_t seed = 0;

    /// Throws invalid-argument on inconsistent settings.
    void validate() const;
    [[nodiscard]] std::vector<double> level_sizes() const;
    [[nodiscard]] ProblemClass problem_class() const;
    [[nodiscard]] SingularSource source() const;
    [[nodiscard]] Domain domain() const;
    /// Closed-form solution, absent for segment2d.
    [[nodiscard]] std::optional<ExactSolution> exact() const;
    [[nodiscard]] GradingSpec grading(double h) const;
    [[nodiscard]] std::string resolved_output_dir() const;
};

/// Pipeline stage at which a level failed; the CLI maps it to an exit code.
enum class Stage { Config, Mesh, Solve, Quadrature };

const char* to_string(Stage s);

class StageError : public Error {
public:
    StageError(Stage stage, ErrorKind kind, const std::string& message, int level)
        : Error(kind, message), stage_(stage), level_(level) {}

    [[nodiscard]] Stage stage() const noexcept { return stage_; }
    [[nodiscard]] int level() const noexcept { return level_; }

private:
    Stage stage_;
    int level_;
};

/// Error column names in CSV order.
inline constexpr const char* kErrL2 = "err_L2";
inline constexpr const char* kErrL2Beta = "err_L2beta";
inline constexpr const char* kErrH1Sigma = "err_H1sigma";

/// Status of the configured mu against one estimate.
struct TheoryCheck {
    std::string norm;       // e.g. "L2_0.4"
    std::string theorem;    // empty when no estimate applies
    double bound = 0.0;
    bool covered = false;   // an estimate applies
    bool satisfied = false; // mu strictly below the bound
    std::string note;
};

std::vector<TheoryCheck> check_theory(const StudyConfig& cfg);

Mesh build_mesh(const StudyConfig& cfg, double h);

struct LevelResult {
    Mesh mesh;
    Vector uh;  // nodal values, one per vertex
    StudyRecord record;
    SolveReport solve;
};

/// Mesh, solve (or interpolate) and measure one level. Failures raise
/// StageError tagged with the pipeline stage.
LevelResult run_level(const StudyConfig& cfg, double h, int level);

struct StudyResult {
    std::vector<StudyRecord> records;
    EocReport eoc;
    std::vector<TheoryCheck> theory;
    std::vector<std::string> warnings;
    std::string csv_path;
    std::string table;
};

/// Runs all levels sequentially. The CSV is written row by row, so a failing
/// level leaves the completed rows on disk before StageError propagates.
StudyResult run_study(const StudyConfig& cfg);

/// CSV header and one row; errors print with 12 significant digits.
std::string csv_header();
std::string csv_row(const StudyRecord& rec);

/// Text table: each error column scaled by 10^k with k taken from its
/// first level, followed by e.o.c.(N) and e.o.c.(h) rows.
std::string format_table(const StudyConfig& cfg, const std::vector<StudyRecord>& records,
                         const EocReport& eoc);

struct MeshRunResult {
    Mesh mesh;
    ValidationReport validation;
    GradingAudit audit;
    std::string mesh_path;
    std::string vtk_path;
};

/// Generates the first level's mesh, validates and audits it, and writes it.
MeshRunResult run_mesh(const StudyConfig& cfg);

struct SolveRunResult {
    LevelResult level;
    std::string vtk_path;
};

/// Single level with VTK export of the discrete solution (and exact values
/// and pointwise error when the exact solution is known).
SolveRunResult run_solve(const StudyConfig& cfg);

/// Same as run_solve on a mesh read from disk.
SolveRunResult run_solve_on(const StudyConfig& cfg, const Mesh& mesh, double h);

}  // namespace gradfem
