#include "gradfem/study.hpp"

#include "gradfem/assembly.hpp"
#include "gradfem/generators.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace gradfem {

const char* to_string(Problem p)
{
    switch (p) {
    case Problem::Point2d: return "point2d";
    case Problem::Point3d: return "point3d";
    case Problem::Segment3d: return "segment3d";
    case Problem::Segment2d: return "segment2d";
    }
    return "?";
}

Problem parse_problem(const std::string& name)
{
    for (Problem p : {Problem::Point2d, Problem::Point3d, Problem::Segment3d, Problem::Segment2d})
        if (name == to_string(p)) return p;
    fail(ErrorKind::InvalidArgument, "unknown problem '" + name + "'");
}

const char* to_string(Approximation a)
{
    return a == Approximation::Galerkin ? "galerkin" : "interpolant";
}

Approximation parse_approximation(const std::string& name)
{
    if (name == "galerkin") return Approximation::Galerkin;
    if (name == "interpolant") return Approximation::TruncatedInterpolant;
    fail(ErrorKind::InvalidArgument, "unknown approximation '" + name + "'");
}

const char* to_string(Stage s)
{
    switch (s) {
    case Stage::Config: return "config";
    case Stage::Mesh: return "mesh";
    case Stage::Solve: return "solve";
    case Stage::Quadrature: return "quadrature";
    }
    return "?";
}

namespace {

int problem_dim(Problem p)
{
    return p == Problem::Point2d || p == Problem::Segment2d ? 2 : 3;
}

bool is_segment(Problem p)
{
    return p == Problem::Segment2d || p == Problem::Segment3d;
}

std::string fmt_g(double v, int digits)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

std::string fmt_f(double v, int decimals)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

}  // namespace

void StudyConfig::validate() const
{
    GRADFEM_CHECK(std::isfinite(mu) && mu > 0.0 && mu <= 1.0, InvalidArgument,
                  "mu must lie in (0, 1]");
    GRADFEM_CHECK(std::isfinite(tau) && tau > 0.0, InvalidArgument, "tau must be positive");
    GRADFEM_CHECK(depth >= 0 && depth <= 8, InvalidArgument, "depth must lie in [0, 8]");
    GRADFEM_CHECK(std::isfinite(density) && density > 0.0, InvalidArgument,
                  "density must be positive");
    GRADFEM_CHECK(!name.empty() && name.find('/') == std::string::npos, InvalidArgument,
                  "name must be a plain file stem");
    if (h.empty()) {
        GRADFEM_CHECK(levels >= 1, InvalidArgument, "give h values or levels >= 1 with h0");
        GRADFEM_CHECK(std::isfinite(h0) && h0 > 0.0, InvalidArgument, "h0 must be positive");
        GRADFEM_CHECK(std::isfinite(ratio) && ratio > 1.0, InvalidArgument,
                      "ratio must exceed 1");
    }
    for (double v : level_sizes())
        GRADFEM_CHECK(std::isfinite(v) && v > 0.0 && v <= 1.0, InvalidArgument,
                      "h values must lie in (0, 1]");
    if (strategy == GradingStrategy::Uniform)
        GRADFEM_CHECK(mu == 1.0, InvalidArgument, "the uniform strategy requires mu = 1");
    if (strategy == GradingStrategy::AnisotropicTensor)
        GRADFEM_CHECK(is_segment(problem), InvalidArgument,
                      "anisotropic meshes need a segment source");
    if (strategy == GradingStrategy::RescaledIsotropic)
        GRADFEM_CHECK(!is_segment(problem), InvalidArgument,
                      "rescaled grading is defined for point sources; use constructed");
    if (problem == Problem::Segment2d && approximation == Approximation::TruncatedInterpolant)
        fail(ErrorKind::InvalidArgument, "segment2d has no closed-form solution to interpolate");
    if (beta) GRADFEM_CHECK(std::isfinite(*beta), InvalidArgument, "beta must be finite");
    if (sigma) GRADFEM_CHECK(std::isfinite(*sigma), InvalidArgument, "sigma must be finite");
    const int n = problem_dim(problem);
    const double lim = -(n - (is_segment(problem) ? 1 : 0)) / 2.0;
    if (beta) GRADFEM_CHECK(*beta > lim, InvalidArgument, "beta makes the L2 weight non-integrable");
    if (sigma)
        GRADFEM_CHECK(*sigma > lim, InvalidArgument, "sigma makes the energy weight non-integrable");
    solver.validate();
}

std::vector<double> StudyConfig::level_sizes() const
{
    if (!h.empty()) return h;
    std::vector<double> out;
    for (int i = 0; i < levels; ++i) out.push_back(h0 / std::pow(ratio, i));
    return out;
}

ProblemClass StudyConfig::problem_class() const
{
    ProblemClass pc;
    pc.n = problem_dim(problem);
    pc.m = is_segment(problem) ? 1 : 0;
    pc.mesh_kind = strategy == GradingStrategy::AnisotropicTensor ? MeshKind::Anisotropic
                                                                   : MeshKind::Isotropic;
    return pc;
}

SingularSource StudyConfig::source() const
{
    switch (problem) {
    case Problem::Point2d: return PointDelta{Point(0.0, 0.0)};
    case Problem::Point3d: return PointDelta{Point(0.0, 0.0, 0.0)};
    case Problem::Segment3d: return axis_segment(3, 1.0, density);
    case Problem::Segment2d: return axis_segment(2, 1.0, density);
    }
    return PointDelta{};
}

Domain StudyConfig::domain() const
{
    switch (problem) {
    case Problem::Point2d: return UnitDisk{};
    case Problem::Point3d: return UnitBall{};
    case Problem::Segment3d: return Ellipsoid{};
    case Problem::Segment2d: return ellipse_domain(std::sqrt(3.0), 2.0);
    }
    return UnitDisk{};
}

std::optional<ExactSolution> StudyConfig::exact() const
{
    switch (problem) {
    case Problem::Point2d: return point_2d_solution();
    case Problem::Point3d: return point_3d_solution();
    case Problem::Segment3d: return segment_3d_solution(density);
    case Problem::Segment2d: return std::nullopt;
    }
    return std::nullopt;
}

GradingSpec StudyConfig::grading(double hv) const
{
    GradingSpec g;
    g.mu = mu;
    g.h = hv;
    g.strategy = strategy;
    g.tau = tau;
    return g;
}

std::string StudyConfig::resolved_output_dir() const
{
    if (!output_dir.empty()) return output_dir;
    if (const char* env = std::getenv("GRADFEM_OUTPUT_DIR"); env && *env) return env;
    return ".";
}

std::vector<TheoryCheck> check_theory(const StudyConfig& cfg)
{
    const ProblemClass pc = cfg.problem_class();
    std::vector<TargetNorm> norms{L2Norm{0.0}};
    if (cfg.beta && *cfg.beta != 0.0) norms.emplace_back(L2Norm{*cfg.beta});
    if (cfg.sigma) norms.emplace_back(EnergyNorm{*cfg.sigma});
    std::vector<TheoryCheck> out;
    for (const auto& norm : norms) {
        TheoryCheck c;
        c.norm = describe(norm);
        try {
            const MuBound b = mu_bound(pc, norm);
            c.theorem = b.theorem;
            c.bound = b.bound;
            c.covered = true;
            c.satisfied = b.admits(cfg.mu);
            c.note = b.condition;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::NoTheorem) throw;
            c.note = e.what();
        }
        out.push_back(std::move(c));
    }
    return out;
}

Mesh build_mesh(const StudyConfig& cfg, double h)
{
    const Domain dom = cfg.domain();
    const auto src = cfg.source();
    const GradingStrategy s = cfg.strategy;
    if (s == GradingStrategy::Uniform) return uniform_mesh(dom, h);
    switch (cfg.problem) {
    case Problem::Point2d:
        if (s == GradingStrategy::RescaledIsotropic)
            return grade_by_rescaling(uniform_mesh(dom, h), cfg.mu, Point(0.0, 0.0));
        return graded_disk_by_construction(h, cfg.mu);
    case Problem::Point3d:
        if (s == GradingStrategy::RescaledIsotropic) return rescaled_ball(h, cfg.mu);
        return graded_ball_by_construction(h, cfg.mu);
    case Problem::Segment3d:
    case Problem::Segment2d: {
        const auto& seg = std::get<SegmentMeasure>(src);
        if (s == GradingStrategy::AnisotropicTensor)
            return anisotropic_segment_mesh(dom, seg, h, cfg.mu, cfg.tau);
        return isotropic_segment_mesh(dom, seg, h, cfg.mu);
    }
    }
    fail(ErrorKind::InvalidArgument, "unsupported problem");
}

namespace {

LevelResult measure_level(const StudyConfig& cfg, Mesh mesh, double h, int level,
                          std::chrono::steady_clock::time_point t0)
{
    const auto src = cfg.source();
    const auto exact = cfg.exact();
    LevelResult out;
    out.record.level = level;
    out.record.h = h;
    out.record.vertices = mesh.num_vertices();
    out.record.elements = mesh.num_elements();

    try {
        if (cfg.approximation == Approximation::TruncatedInterpolant) {
            out.uh = truncated_interpolant(mesh, *exact, src);
        } else {
            const SparseSystem sys =
                apply_dirichlet(assemble_stiffness(mesh), assemble_rhs(mesh, src), mesh);
            SolveResult res = solve_spd(sys, cfg.solver);
            out.solve = res.report;
            out.uh = sys.expand(res.u);
        }
    } catch (const Error& e) {
        throw StageError(Stage::Solve, e.kind(), e.what(), level);
    }

    if (exact) {
        try {
            WeightedNormSpec spec;
            spec.source = src;
            spec.depth = cfg.depth;
            out.record.errors[kErrL2] = weighted_error(mesh, out.uh, *exact, spec);
            if (cfg.beta) {
                spec.exponent = *cfg.beta;
                out.record.errors[kErrL2Beta] = weighted_error(mesh, out.uh, *exact, spec);
            }
            if (cfg.sigma) {
                spec.kind = NormKind::H1SemiWeighted;
                spec.exponent = *cfg.sigma;
                out.record.errors[kErrH1Sigma] = weighted_error(mesh, out.uh, *exact, spec);
            }
        } catch (const Error& e) {
            throw StageError(Stage::Quadrature, e.kind(), e.what(), level);
        }
    }
    out.mesh = std::move(mesh);
    out.record.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

std::filesystem::path output_path(const StudyConfig& cfg, const std::string& suffix)
{
    const std::filesystem::path dir = cfg.resolved_output_dir();
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    GRADFEM_CHECK(!ec, Io, "cannot create output directory '" + dir.string() + "'");
    return dir / (cfg.name + suffix);
}

void write_solution_vtk(const std::string& path, const LevelResult& lr, const StudyConfig& cfg)
{
    const Mesh& mesh = lr.mesh;
    std::vector<double> uh(lr.uh.data(), lr.uh.data() + lr.uh.size());
    std::vector<PointField> fields{{"u_h", uh}};
    std::vector<double> ex;
    std::vector<double> err;
    if (const auto exact = cfg.exact()) {
        ex.resize(mesh.num_vertices());
        err.resize(mesh.num_vertices());
        for (std::size_t i = 0; i < mesh.num_vertices(); ++i) {
            double v = std::numeric_limits<double>::quiet_NaN();
            try {
                v = exact->value(mesh.vertices()[i]);
            } catch (const Error&) {
                // singular vertex
            }
            ex[i] = v;
            err[i] = v - uh[i];
        }
        fields.push_back({"u_exact", ex});
        fields.push_back({"error", err});
    }
    write_vtk_file(path, mesh, fields);
}

}  // namespace

LevelResult run_level(const StudyConfig& cfg, double h, int level)
{
    const auto t0 = std::chrono::steady_clock::now();
    Mesh mesh;
    try {
        mesh = build_mesh(cfg, h);
    } catch (const Error& e) {
        throw StageError(Stage::Mesh, e.kind(), e.what(), level);
    }
    return measure_level(cfg, std::move(mesh), h, level, t0);
}

std::string csv_header()
{
    return std::string("level,h,N,NT,") + kErrL2 + "," + kErrL2Beta + "," + kErrH1Sigma +
           ",seconds";
}

std::string csv_row(const StudyRecord& rec)
{
    std::string row = std::to_string(rec.level) + "," + fmt_g(rec.h, 12) + "," +
                      std::to_string(rec.vertices) + "," + std::to_string(rec.elements);
    for (const char* key : {kErrL2, kErrL2Beta, kErrH1Sigma}) {
        row += ",";
        if (const auto it = rec.errors.find(key); it != rec.errors.end())
            row += fmt_g(it->second, 12);
    }
    return row + "," + fmt_f(rec.seconds, 3);
}

std::string format_table(const StudyConfig& cfg, const std::vector<StudyRecord>& records,
                         const EocReport& eoc)
{
    struct Column {
        std::string key;
        std::string title;
        int power = 0;
    };
    std::vector<Column> cols;
    const auto add = [&](const char* key, const std::string& title) {
        if (records.empty() || !records.front().errors.count(key)) return;
        const double first = records.front().errors.at(key);
        const int k = first > 0.0 ? static_cast<int>(std::floor(std::log10(first))) : 0;
        cols.push_back({key, title, k});
    };
    add(kErrL2, "L2");
    if (cfg.beta) add(kErrL2Beta, "L2_" + fmt_g(*cfg.beta, 6));
    if (cfg.sigma) add(kErrH1Sigma, "H1_" + fmt_g(*cfg.sigma, 6));

    std::ostringstream os;
    os << to_string(cfg.problem) << ", " << to_string(cfg.strategy) << ", mu = " << fmt_g(cfg.mu, 6)
       << "\n";
    char line[256];
    std::snprintf(line, sizeof line, "%-12s %10s %10s", "h", "N", "NT");
    os << line;
    for (const auto& c : cols) {
        std::snprintf(line, sizeof line, " %14s", c.title.c_str());
        os << line;
    }
    os << "\n";
    std::snprintf(line, sizeof line, "%-12s %10s %10s", "", "", "");
    os << line;
    for (const auto& c : cols) {
        std::snprintf(line, sizeof line, " %14s", ("x10^" + std::to_string(c.power)).c_str());
        os << line;
    }
    os << "\n";
    for (const auto& rec : records) {
        std::snprintf(line, sizeof line, "%-12.6g %10zu %10zu", rec.h, rec.vertices, rec.elements);
        os << line;
        for (const auto& c : cols) {
            const double v = rec.errors.at(c.key) / std::pow(10.0, c.power);
            std::snprintf(line, sizeof line, " %14.4f", v);
            os << line;
        }
        os << "\n";
    }
    const auto eoc_row = [&](const char* label, const std::map<std::string, EocFit>& fits) {
        std::snprintf(line, sizeof line, "%-12s %10s %10s", label, "", "");
        os << line;
        for (const auto& c : cols) {
            const auto it = fits.find(c.key);
            if (eoc.defined && it != fits.end())
                std::snprintf(line, sizeof line, " %14.3f", it->second.order);
            else
                std::snprintf(line, sizeof line, " %14s", "-");
            os << line;
        }
        os << "\n";
    };
    eoc_row("e.o.c.(N)", eoc.by_n);
    eoc_row("e.o.c.(h)", eoc.by_h);
    return os.str();
}

StudyResult run_study(const StudyConfig& cfg)
{
    try {
        cfg.validate();
    } catch (const Error& e) {
        throw StageError(Stage::Config, e.kind(), e.what(), -1);
    }
    StudyResult out;
    try {
        out.theory = check_theory(cfg);
    } catch (const Error& e) {
        throw StageError(Stage::Config, e.kind(), e.what(), -1);
    }
    for (const auto& c : out.theory) {
        if (!c.covered)
            out.warnings.push_back(c.norm + ": no estimate applies (" + c.note + ")");
        else if (!c.satisfied)
            out.warnings.push_back(c.norm + ": mu = " + fmt_g(cfg.mu, 6) + " violates " +
                                   c.note + " (" + c.theorem + ")");
    }
    if (!cfg.exact())
        out.warnings.push_back("no closed-form solution for " + std::string(to_string(cfg.problem)) +
                               "; error columns stay empty");

    const auto csv_path = output_path(cfg, ".csv");
    out.csv_path = csv_path.string();
    std::ofstream csv(csv_path);
    GRADFEM_CHECK(csv.good(), Io, "cannot write '" + out.csv_path + "'");
    csv << csv_header() << "\n" << std::flush;

    const auto sizes = cfg.level_sizes();
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        LevelResult lr = run_level(cfg, sizes[i], static_cast<int>(i));
        csv << csv_row(lr.record) << "\n" << std::flush;
        if (cfg.vtk)
            write_solution_vtk(output_path(cfg, "_level" + std::to_string(i) + ".vtk").string(), lr,
                               cfg);
        out.records.push_back(std::move(lr.record));
    }
    try {
        out.eoc = estimate_eoc(out.records, problem_dim(cfg.problem));
    } catch (const Error& e) {
        out.warnings.push_back(std::string("e.o.c. undefined: ") + e.what());
        out.eoc = EocReport{};
    }
    if (out.eoc.defined && out.eoc.by_h.empty()) out.eoc.defined = false;
    out.table = format_table(cfg, out.records, out.eoc);
    return out;
}

MeshRunResult run_mesh(const StudyConfig& cfg)
{
    try {
        cfg.validate();
    } catch (const Error& e) {
        throw StageError(Stage::Config, e.kind(), e.what(), -1);
    }
    const double h = cfg.level_sizes().front();
    MeshRunResult out;
    try {
        out.mesh = build_mesh(cfg, h);
    } catch (const Error& e) {
        throw StageError(Stage::Mesh, e.kind(), e.what(), 0);
    }
    const Domain dom = cfg.domain();
    out.validation = validate_mesh(out.mesh, &dom);
    out.audit = grading_audit(out.mesh, cfg.grading(h), cfg.source());
    out.mesh_path = output_path(cfg, ".mesh").string();
    write_mesh_file(out.mesh_path, out.mesh);
    if (cfg.vtk) {
        out.vtk_path = output_path(cfg, ".vtk").string();
        write_vtk_file(out.vtk_path, out.mesh);
    }
    return out;
}

SolveRunResult run_solve(const StudyConfig& cfg)
{
    try {
        cfg.validate();
    } catch (const Error& e) {
        throw StageError(Stage::Config, e.kind(), e.what(), -1);
    }
    SolveRunResult out;
    out.level = run_level(cfg, cfg.level_sizes().front(), 0);
    out.vtk_path = output_path(cfg, ".vtk").string();
    write_solution_vtk(out.vtk_path, out.level, cfg);
    return out;
}

SolveRunResult run_solve_on(const StudyConfig& cfg, const Mesh& mesh, double h)
{
    try {
        cfg.validate();
    } catch (const Error& e) {
        throw StageError(Stage::Config, e.kind(), e.what(), -1);
    }
    GRADFEM_CHECK(mesh.dim() == problem_dim(cfg.problem), InvalidArgument,
                  "mesh dimension does not match the problem");
    SolveRunResult out;
    out.level = measure_level(cfg, mesh, h, 0, std::chrono::steady_clock::now());
    out.vtk_path = output_path(cfg, ".vtk").string();
    write_solution_vtk(out.vtk_path, out.level, cfg);
    return out;
}

}  // namespace gradfem
