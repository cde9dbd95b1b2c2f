#include "gradfem/solver.hpp"

#include "gradfem/error.hpp"
#include "gradfem/parallel.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>

namespace gradfem {

void SolveConfig::validate() const
{
    GRADFEM_CHECK(rel_tolerance > 0.0 && rel_tolerance < 1.0, InvalidArgument,
                  "solver tolerance must lie in (0,1)");
    GRADFEM_CHECK(max_iterations >= 0, InvalidArgument, "max_iterations must be positive");
}

int SolveConfig::iteration_cap(std::size_t n) const
{
    if (max_iterations > 0) return max_iterations;
    return std::max(1000, static_cast<int>(std::ceil(20.0 * std::sqrt(static_cast<double>(n)))));
}

SolveMethod parse_method(const std::string& name)
{
    if (name == "cg" || name == "CG") return SolveMethod::CG;
    if (name == "direct") return SolveMethod::Direct;
    fail(ErrorKind::InvalidArgument, "unknown solver method '" + name + "'");
}

Preconditioner parse_preconditioner(const std::string& name)
{
    if (name == "none") return Preconditioner::None;
    if (name == "diagonal" || name == "jacobi") return Preconditioner::Diagonal;
    fail(ErrorKind::InvalidArgument, "unknown preconditioner '" + name + "'");
}

void spmv(const SparseMatrix& a, const Vector& x, Vector& y)
{
    y.resize(a.rows());
    parallel_for(static_cast<std::size_t>(a.rows()), [&](std::size_t i) {
        double s = 0.0;
        for (SparseMatrix::InnerIterator it(a, static_cast<Eigen::Index>(i)); it; ++it)
            s += it.value() * x[it.col()];
        y[static_cast<Eigen::Index>(i)] = s;
    });
}

namespace {

double residual_norm(const SparseMatrix& a, const Vector& u, const Vector& b)
{
    Vector au;
    spmv(a, u, au);
    return (b - au).norm();
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

SolveResult solve_direct(const SparseSystem& sys)
{
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
    ldlt.compute(Eigen::SparseMatrix<double>(sys.matrix));
    if (ldlt.info() != Eigen::Success) fail(ErrorKind::NotSpd, "sparse LDLT factorization failed");
    const auto d = ldlt.vectorD();
    GRADFEM_CHECK((d.array() > 0.0).all(), NotSpd, "matrix has a non-positive pivot");
    SolveResult res;
    res.u = ldlt.solve(sys.rhs);
    const double bn = sys.rhs.norm();
    res.report.relative_residual = bn > 0.0 ? residual_norm(sys.matrix, res.u, sys.rhs) / bn : 0.0;
    return res;
}

SolveResult solve_cg(const SparseSystem& sys, const SolveConfig& cfg)
{
    const SparseMatrix& a = sys.matrix;
    const Vector& b = sys.rhs;
    const Eigen::Index n = b.size();
    Vector inv_diag = Vector::Ones(n);
    if (cfg.preconditioner == Preconditioner::Diagonal) {
        const Vector d = a.diagonal();
        for (Eigen::Index i = 0; i < n; ++i) {
            GRADFEM_CHECK(d[i] > 0.0, NotSpd, "non-positive diagonal entry");
            inv_diag[i] = 1.0 / d[i];
        }
    }
    SolveResult res;
    res.u = Vector::Zero(n);
    const double bn = b.norm();
    if (bn == 0.0) return res;

    Vector r = b;
    Vector z = inv_diag.cwiseProduct(r);
    Vector p = z;
    Vector ap(n);
    double rz = r.dot(z);
    Vector best = res.u;
    double best_rel = 1.0;
    const int cap = cfg.iteration_cap(static_cast<std::size_t>(n));
    for (int k = 1; k <= cap; ++k) {
        spmv(a, p, ap);
        const double pap = p.dot(ap);
        if (!(pap > 0.0))
            throw SolverError(ErrorKind::NotSpd, "non-positive curvature p^T A p in CG", to_std(best),
                              best_rel, k);
        const double alpha = rz / pap;
        res.u += alpha * p;
        r -= alpha * ap;
        const double rel = r.norm() / bn;
        if (rel < best_rel) {
            best_rel = rel;
            best = res.u;
        }
        if (rel <= cfg.rel_tolerance) {
            // Confirm with the true residual; recurrence drift can hide a few digits.
            const double true_rel = residual_norm(a, res.u, b) / bn;
            if (true_rel <= cfg.rel_tolerance) {
                res.report = {k, true_rel};
                return res;
            }
            Vector au;
            spmv(a, res.u, au);
            r = b - au;
            z = inv_diag.cwiseProduct(r);
            rz = r.dot(z);
            p = z;
            continue;
        }
        z = inv_diag.cwiseProduct(r);
        const double rz_next = r.dot(z);
        p = z + (rz_next / rz) * p;
        rz = rz_next;
    }
    throw SolverError(ErrorKind::SolverFailure, "CG did not converge within the iteration cap",
                      to_std(best), best_rel, cap);
}

}  // namespace

SolveResult solve_spd(const SparseSystem& sys, const SolveConfig& cfg)
{
    cfg.validate();
    GRADFEM_CHECK(sys.matrix.rows() == sys.rhs.size() && sys.matrix.cols() == sys.rhs.size(),
                  InvalidArgument, "matrix and right-hand side sizes differ");
    GRADFEM_CHECK(sys.rhs.allFinite(), InvalidArgument, "right-hand side is not finite");
    GRADFEM_CHECK(sys.rhs.size() > 0, EmptySystem, "system has no unknowns");
    return cfg.method == SolveMethod::Direct ? solve_direct(sys) : solve_cg(sys, cfg);
}

}  // namespace gradfem
