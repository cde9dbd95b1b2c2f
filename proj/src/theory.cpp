#include "gradfem/theory.hpp"

#include "gradfem/error.hpp"

#include <cmath>
#include <cstdio>

namespace gradfem {

void ProblemClass::validate() const
{
    GRADFEM_CHECK(n == 2 || n == 3, InvalidArgument, "space dimension must be 2 or 3");
    GRADFEM_CHECK(m == 0 || m == 1, InvalidArgument, "singular set dimension must be 0 or 1");
    GRADFEM_CHECK(!(m == 0 && mesh_kind == MeshKind::Anisotropic), InvalidArgument,
                  "anisotropic meshes require a segment source");
}

bool a2_admissible(double sigma, const ProblemClass& pc)
{
    return std::abs(sigma) < (pc.n - pc.m) / 2.0;
}

Interval wellposed_sigma_range(const ProblemClass& pc)
{
    const double half = (pc.n - pc.m) / 2.0;
    return {half - 1.0, half};
}

double point_energy_bound_raw(double sigma, double eta)
{
    return sigma - 1.0 - eta;
}

std::string describe(const TargetNorm& norm)
{
    char buf[64];
    if (const auto* e = std::get_if<EnergyNorm>(&norm))
        std::snprintf(buf, sizeof buf, "energy(sigma=%g)", e->sigma);
    else
        std::snprintf(buf, sizeof buf, "L2(beta=%g)", std::get<L2Norm>(norm).beta);
    return buf;
}

namespace {

[[noreturn]] void no_theorem(const std::string& why)
{
    fail(ErrorKind::NoTheorem, why);
}

MuBound make(double bound, const char* theorem, const char* condition)
{
    return {bound, theorem, condition};
}

}  // namespace

MuBound mu_bound(const ProblemClass& pc, const TargetNorm& norm)
{
    pc.validate();
    const bool segment = pc.m == 1;
    const bool aniso = pc.mesh_kind == MeshKind::Anisotropic;
    if (const auto* e = std::get_if<EnergyNorm>(&norm)) {
        const double s = e->sigma;
        if (!wellposed_sigma_range(pc).contains(s))
            no_theorem("sigma lies outside the well-posedness range of the weighted problem");
        if (!segment)
            return make(s + 1.0 - pc.n / 2.0, "point source, weighted energy estimate on graded meshes",
                        "mu < sigma + 1 - n/2");
        if (pc.n == 3) return make(s, "segment source, weighted energy estimate (3D)", "mu < sigma");
        return make(s + 0.5, "segment source, weighted energy estimate (2D)", "mu < sigma + 1/2");
    }
    const double b = std::get<L2Norm>(norm).beta;
    if (!a2_admissible(b, pc)) no_theorem("beta lies outside the admissible weight range |beta| < (n-m)/2");
    if (!segment) {
        if (b < pc.n / 4.0 - 1.0) no_theorem("the weighted L2 estimate needs beta >= n/4 - 1");
        return make(1.0 + b / 2.0 - pc.n / 4.0, "point source, weighted L2 estimate on graded meshes",
                    "mu < 1 + beta/2 - n/4");
    }
    if (pc.n == 3) {
        if (aniso) {
            if (!(b > 0.0))
                no_theorem("the anisotropic analysis does not give estimates for the L2 norm (needs beta > 0)");
            return make(b, "segment source, weighted L2 estimate on anisotropic meshes (3D)", "mu < beta");
        }
        return make((1.0 + b) / 2.0, "segment source, weighted L2 estimate on isotropic meshes (3D)",
                    "mu < (1 + beta)/2");
    }
    if (aniso)
        return make(b + 0.5, "segment source, weighted L2 estimate on anisotropic meshes (2D)",
                    "mu < beta + 1/2");
    return make(0.75 + b / 2.0, "segment source, weighted L2 estimate on isotropic meshes (2D)",
                "mu < 3/4 + beta/2");
}

}  // namespace gradfem
