#pragma once

#include "gradfem/study.hpp"

#include "CLI11.hpp"

#include <string>

namespace gradfem::tools {

/// Binds every StudyConfig field to a flag of `app` (and to the same key in an
/// optional flat `--config` file). Call finish() after parsing.
class StudyOptions {
public:
    explicit StudyOptions(CLI::App& app)
    {
        app.set_config("--config", "", "flat key = value file; flags override it");
        app.add_option("--problem", problem_, "point2d | point3d | segment3d | segment2d");
        app.add_option("--strategy", strategy_, "uniform | rescaled | constructed | anisotropic");
        app.add_option("--mu", cfg_.mu, "grading parameter in (0, 1]");
        app.add_option("--tau", cfg_.tau, "endpoint cone constant of anisotropic meshes");
        beta_opt_ = app.add_option("--beta", beta_, "weight exponent of the L2_beta column");
        sigma_opt_ = app.add_option("--sigma", sigma_, "weight exponent of the H1_sigma column");
        app.add_option("--h", cfg_.h, "mesh steps, coarse to fine");
        app.add_option("--h0", cfg_.h0, "first step when --h is not given");
        app.add_option("--levels", cfg_.levels, "number of levels from --h0");
        app.add_option("--ratio", cfg_.ratio, "step ratio between levels");
        app.add_option("--method", method_, "cg | direct");
        app.add_option("--tol", cfg_.solver.rel_tolerance, "relative residual target");
        app.add_option("--max-iter", cfg_.solver.max_iterations, "CG cap, 0 for automatic");
        app.add_option("--precond", precond_, "none | diagonal");
        app.add_option("--depth", cfg_.depth, "error quadrature subdivision depth near the source");
        app.add_option("--density", cfg_.density, "line density of segment sources");
        app.add_option("--approximation", approx_, "galerkin | interpolant");
        app.add_option("--output-dir", cfg_.output_dir, "defaults to $GRADFEM_OUTPUT_DIR or .");
        app.add_option("--name", cfg_.name, "output file stem");
        app.add_flag("--vtk", cfg_.vtk, "also write VTK files");
        app.add_option("--seed", cfg_.seed, "seed recorded with the study");
    }

    /// Resolves enumerations and optional columns. Throws invalid-argument.
    StudyConfig finish()
    {
        cfg_.problem = parse_problem(problem_);
        cfg_.strategy = parse_strategy(strategy_);
        cfg_.solver.method = parse_method(method_);
        cfg_.solver.preconditioner = parse_preconditioner(precond_);
        cfg_.approximation = parse_approximation(approx_);
        if (beta_opt_->count() > 0) cfg_.beta = beta_;
        if (sigma_opt_->count() > 0) cfg_.sigma = sigma_;
        return cfg_;
    }

private:
    StudyConfig cfg_;
    std::string problem_ = "point2d";
    std::string strategy_ = "rescaled";
    std::string method_ = "cg";
    std::string precond_ = "diagonal";
    std::string approx_ = "galerkin";
    double beta_ = 0.0;
    double sigma_ = 0.0;
    CLI::Option* beta_opt_ = nullptr;
    CLI::Option* sigma_opt_ = nullptr;
};

/// Parses a manifest file into a StudyConfig.
inline StudyConfig load_manifest(const std::string& path)
{
    CLI::App app;
    app.set_help_flag();
    StudyOptions opts(app);
    app.parse(std::vector<std::string>{path, "--config"});
    return opts.finish();
}

}  // namespace gradfem::tools
