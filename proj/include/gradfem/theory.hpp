#pragma once

#include <string>
#include <variant>

namespace gradfem {

enum class MeshKind { Isotropic, Anisotropic };

/// n: space dimension, m: dimension of the singular set (0 point, 1 segment).
struct ProblemClass {
    int n = 2;
    int m = 0;
    MeshKind mesh_kind = MeshKind::Isotropic;

    void validate() const;
};

/// Open interval (lo, hi).
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    [[nodiscard]] bool contains(double x) const noexcept { return lo < x && x < hi; }
};

/// r^{2 sigma} is an A2 weight iff |sigma| < (n-m)/2.
bool a2_admissible(double sigma, const ProblemClass& pc);

/// Range of sigma for which the weighted problem is well posed: ((n-m)/2 - 1, (n-m)/2).
Interval wellposed_sigma_range(const ProblemClass& pc);

struct EnergyNorm {
    double sigma = 0.0;
};
struct L2Norm {
    double beta = 0.0;
};
using TargetNorm = std::variant<EnergyNorm, L2Norm>;

/// Strict upper bound on mu under which the cited estimate gives the optimal order.
struct MuBound {
    double bound = 0.0;
    std::string theorem;    // descriptive name of the estimate
    std::string condition;  // the bound as a formula
    [[nodiscard]] bool admits(double mu) const noexcept { return mu < bound; }
};

/// Throws no-theorem when no estimate covers the configuration, with the reason.
MuBound mu_bound(const ProblemClass& pc, const TargetNorm& norm);

/// Point-source energy estimate before optimizing the regularity parameter eta:
/// mu <= sigma - 1 - eta for any eta > n/2 - 2.
double point_energy_bound_raw(double sigma, double eta);

std::string describe(const TargetNorm& norm);

}  // namespace gradfem
