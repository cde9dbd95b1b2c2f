#pragma once

#include "gradfem/assembly.hpp"

#include <string>

namespace gradfem {

enum class SolveMethod { CG, Direct };
enum class Preconditioner { None, Diagonal };

struct SolveConfig {
    SolveMethod method = SolveMethod::CG;
    double rel_tolerance = 1e-10;
    int max_iterations = 0;  // 0: max(1000, 20 sqrt(n))
    Preconditioner preconditioner = Preconditioner::Diagonal;

    void validate() const;
    [[nodiscard]] int iteration_cap(std::size_t n) const;
};

SolveMethod parse_method(const std::string& name);
Preconditioner parse_preconditioner(const std::string& name);

struct SolveReport {
    int iterations = 0;
    double relative_residual = 0.0;  // ||b - A u|| / ||b||
};

struct SolveResult {
    Vector u;
    SolveReport report;
};

/// Solves the reduced SPD system. CG failures raise SolverError carrying the
/// best iterate; a non-positive curvature p^T A p raises not-spd.
SolveResult solve_spd(const SparseSystem& sys, const SolveConfig& cfg = {});

/// y = A x with rows split across workers; each row sums in storage order.
void spmv(const SparseMatrix& a, const Vector& x, Vector& y);

}  // namespace gradfem
