#include "doctest.h"

#include "gradfem/analysis.hpp"
#include "gradfem/error.hpp"
#include "gradfem/generators.hpp"
#include "gradfem/solver.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

using namespace gradfem;

namespace {

constexpr double kPi = std::numbers::pi;

ErrorKind kind_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::Io;
}

double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm,
               double fb, double whole, double tol, int depth)
{
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
           simpson(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

/// Adaptive Simpson quadrature, independent of the library's Gauss rules.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol)
{
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    return simpson(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, 60);
}

/// (1/4pi) int_{-1}^{1} dt / |x - (0,0,t)| minus the constant that zeroes it on the ellipsoid.
double line_integral_oracle(const Point& x)
{
    const auto f = [&](double t) {
        return 1.0 / std::sqrt(x[0] * x[0] + x[1] * x[1] + (x[2] - t) * (x[2] - t));
    };
    // Split at the foot of the perpendicular, where the integrand peaks.
    const double z = std::clamp(x[2], -1.0, 1.0);
    double s = 0.0;
    if (z > -1.0) s += adaptive_simpson(f, -1.0, z, 1e-14);
    if (z < 1.0) s += adaptive_simpson(f, z, 1.0, 1e-14);
    return (s - std::log(3.0)) / (4.0 * kPi);
}

Mesh disk(double h) { return uniform_mesh(UnitDisk{}, h); }

Vector nodal(const Mesh& m, const std::function<double(const Point&)>& f)
{
    Vector v(static_cast<Eigen::Index>(m.num_vertices()));
    for (std::size_t i = 0; i < m.num_vertices(); ++i) v[static_cast<Eigen::Index>(i)] = f(m.vertices()[i]);
    return v;
}

Vector galerkin(const Mesh& m, const SingularSource& src)
{
    const SparseSystem sys = apply_dirichlet(assemble_stiffness(m), assemble_rhs(m, src), m);
    return sys.expand(solve_spd(sys).u);
}

}  // namespace

TEST_CASE("point-source exact solutions")
{
    CHECK(exact_point_2d(Point(1, 0)) == doctest::Approx(0.0));
    CHECK(exact_point_2d(Point(std::exp(-2 * kPi), 0)) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(exact_point_2d(Point(0, 0.5)) == doctest::Approx(std::log(2.0) / (2 * kPi)).epsilon(1e-14));
    CHECK(exact_point_2d(Point(0, 0.5)) == doctest::Approx(0.110318).epsilon(1e-6));
    CHECK(exact_point_3d(Point(0, 0, 1)) == doctest::Approx(0.0));
    CHECK(exact_point_3d(Point(0.5, 0, 0)) == doctest::Approx(1.0 / (4 * kPi)).epsilon(1e-14));
    CHECK(exact_point_3d(Point(0, 0.1, 0)) == doctest::Approx(9.0 / (4 * kPi)).epsilon(1e-14));
    CHECK(exact_point_3d(Point(0, 0.1, 0)) == doctest::Approx(0.716197).epsilon(1e-6));
    CHECK(exact_point_3d(Point(0.3, 0.4, 0)) == doctest::Approx(exact_point_3d(Point(0, 0, -0.5))).epsilon(1e-15));
    CHECK(kind_of([] { (void)exact_point_2d(Point(0, 0)); }) == ErrorKind::SingularEvaluation);
    CHECK(kind_of([] { (void)exact_point_3d(Point(0, 0, 0)); }) == ErrorKind::SingularEvaluation);
}

TEST_CASE("segment exact solution")
{
    CHECK(std::abs(exact_segment_3d(Point(std::sqrt(3.0), 0, 0))) <= 1e-15);
    CHECK(std::abs(exact_segment_3d(Point(0, 0, 2))) <= 1e-15);
    const double want = std::log((3 + 2 * std::sqrt(2.0)) / 3) / (4 * kPi);
    CHECK(exact_segment_3d(Point(1, 0, 0)) == doctest::Approx(want).epsilon(1e-14));
    CHECK(exact_segment_3d(Point(1, 0, 0)) == doctest::Approx(0.052853).epsilon(1e-5));
    CHECK(kind_of([] { (void)exact_segment_3d(Point(0, 0, 0.3)); }) == ErrorKind::SingularEvaluation);
    CHECK(kind_of([] { (void)exact_segment_3d(Point(0, 0, 1)); }) == ErrorKind::SingularEvaluation);
    // Beyond the endpoints on the axis the potential is finite.
    CHECK(exact_segment_3d(Point(0, 0, 1.5)) == doctest::Approx(line_integral_oracle(Point(0, 0, 1.5))).epsilon(1e-10));
}

TEST_CASE("property: segment solution matches the numeric line integral")
{
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> ux(-1.7, 1.7);
    std::uniform_real_distribution<double> uz(-2.0, 2.0);
    int checked = 0;
    while (checked < 100) {
        const Point x(ux(rng), ux(rng), uz(rng));
        if (!contains(Ellipsoid{}, x) || std::hypot(x[0], x[1]) < 1e-3) continue;
        ++checked;
        CHECK(std::abs(exact_segment_3d(x) - line_integral_oracle(x)) <= 1e-10);
        CHECK(exact_segment_3d(x) == doctest::Approx(exact_segment_3d(Point(x[0], x[1], -x[2]))).epsilon(1e-13));
    }
}

TEST_CASE("property: analytic gradients match finite differences")
{
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> u(-0.9, 0.9);
    const std::vector<ExactSolution> sols{point_2d_solution(), point_3d_solution(), segment_3d_solution(0.5)};
    const int dims[] = {2, 3, 3};
    for (std::size_t s = 0; s < sols.size(); ++s) {
        for (int i = 0; i < 50; ++i) {
            const Point x = dims[s] == 2 ? Point(u(rng), u(rng)) : Point(u(rng), u(rng), u(rng) * 2.0);
            if (norm(x) < 0.1 || std::hypot(x[0], x[1]) < 0.1) continue;
            const Point g = sols[s].gradient(x);
            for (int k = 0; k < dims[s]; ++k) {
                const double step = 1e-6;
                Point xp = x;
                Point xm = x;
                xp[k] += step;
                xm[k] -= step;
                const double fd = (sols[s].value(xp) - sols[s].value(xm)) / (2 * step);
                CHECK(g[k] == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
            }
        }
    }
    // Density scales the potential linearly.
    const Point x(0.4, 0.2, 0.7);
    CHECK(segment_3d_solution(0.5).value(x) == doctest::Approx(0.5 * exact_segment_3d(x)).epsilon(1e-15));
}

TEST_CASE("weighted error: closed-form cases")
{
    const Mesh m = disk(0.125);
    const SingularSource src = PointDelta{Point(0, 0)};
    const auto linear = [](const Point& x) { return 0.3 + 2.0 * x[0] - 1.5 * x[1]; };
    ExactSolution lin{linear, [](const Point&) { return Point(2.0, -1.5); }};
    for (double beta : {0.0, 0.4}) {
        WeightedNormSpec spec;
        spec.source = src;
        spec.exponent = beta;
        CHECK(weighted_error(m, nodal(m, linear), lin, spec) <= 1e-12);
        spec.kind = NormKind::H1SemiWeighted;
        CHECK(weighted_error(m, nodal(m, linear), lin, spec) <= 1e-12);
    }

    const Mesh tri(2, {Point(0, 0), Point(1, 0), Point(0, 1)}, {Element{0, 1, 2, -1}}, {1, 1, 1});
    ExactSolution one{[](const Point&) { return 1.0; }, [](const Point& x) { return Point::zero(x.dim()); }};
    WeightedNormSpec spec;
    spec.source = src;
    CHECK(weighted_error(tri, Vector::Zero(3), one, spec) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));

    // |x|^2 against zero with beta = 0.5: integral of r^5 over the disk is 2 pi / 7.
    const Mesh fine = disk(1.0 / 32);
    ExactSolution sq{[](const Point& x) { return dot(x, x); }, [](const Point& x) { return x * 2.0; }};
    spec.exponent = 0.5;
    const Vector zero = Vector::Zero(static_cast<Eigen::Index>(fine.num_vertices()));
    CHECK(weighted_error(fine, zero, sq, spec) == doctest::Approx(std::sqrt(2 * kPi / 7)).epsilon(0.02));

    spec.exponent = -1.0;
    CHECK(kind_of([&] { (void)weighted_error(fine, zero, sq, spec); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("property: a P1 field measured against itself has zero error")
{
    const Mesh m = grade_by_rescaling(disk(0.25), 0.5, Point(0, 0));
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vector uh(static_cast<Eigen::Index>(m.num_vertices()));
    for (auto& v : uh) v = u(rng);
    const auto field = [&](const Point& x) {
        const std::size_t e = locate_point(m, x);
        const auto lam = barycentric(m.simplex(e), x);
        double s = 0.0;
        for (int i = 0; i < 3; ++i) s += lam[static_cast<std::size_t>(i)] * uh[m.element(e)[static_cast<std::size_t>(i)]];
        return s;
    };
    ExactSolution self{field, [](const Point& x) { return Point::zero(x.dim()); }};
    WeightedNormSpec spec;
    spec.source = PointDelta{Point(0, 0)};
    spec.depth = 1;
    CHECK(weighted_error(m, uh, self, spec) <= 1e-13);
}

TEST_CASE("property: error quadrature converges in the subdivision depth")
{
    const SingularSource src = PointDelta{Point(0, 0)};
    const Mesh m = grade_by_rescaling(disk(1.0 / 16), 0.4, Point(0, 0));
    const Vector uh = galerkin(m, src);
    for (double beta : {0.0, 0.4}) {
        WeightedNormSpec spec;
        spec.source = src;
        spec.exponent = beta;
        std::vector<double> e;
        for (int d = 0; d <= 5; ++d) {
            spec.depth = d;
            e.push_back(weighted_error(m, uh, point_2d_solution(), spec));
        }
        const double sign = e[5] - e[4] >= 0.0 ? 1.0 : -1.0;
        // Monotone up to the smooth-part quadrature error once the sequence has settled.
        for (int d = 1; d <= 5; ++d)
            CHECK(sign * (e[static_cast<std::size_t>(d)] - e[static_cast<std::size_t>(d - 1)]) >= -1e-5 * e[5]);
        CHECK(std::abs(e[4] - e[3]) <= 0.01 * e[4]);
    }
}

TEST_CASE("truncated interpolant")
{
    const Mesh m = disk(0.125);
    const auto linear = [](const Point& x) { return 1.0 + x[0] + 2.0 * x[1]; };
    ExactSolution lin{linear, [](const Point&) { return Point(1.0, 2.0); }};
    const SingularSource src = PointDelta{Point(0, 0)};
    const Vector a = truncated_interpolant(m, lin, src);
    const auto meta = m.metadata(src);
    std::vector<char> near(m.num_vertices(), 0);
    // Elements whose vertex patch touches the source: every element sharing a
    // vertex with an element at distance zero.
    std::vector<char> touch_vertex(m.num_vertices(), 0);
    for (std::size_t e = 0; e < m.num_elements(); ++e)
        if ((*meta)[e].r <= 1e-14) for (Index v : m.element_span(e)) touch_vertex[static_cast<std::size_t>(v)] = 1;
    for (std::size_t e = 0; e < m.num_elements(); ++e) {
        bool hit = false;
        for (Index v : m.element_span(e)) hit = hit || touch_vertex[static_cast<std::size_t>(v)];
        if (hit) for (Index v : m.element_span(e)) near[static_cast<std::size_t>(v)] = 1;
    }
    std::size_t zeros = 0;
    for (std::size_t i = 0; i < m.num_vertices(); ++i) {
        const double want = near[i] ? 0.0 : linear(m.vertices()[i]);
        CHECK(a[static_cast<Eigen::Index>(i)] == want);
        zeros += near[i];
        if (norm(m.vertices()[i]) == 0.0) CHECK(a[static_cast<Eigen::Index>(i)] == 0.0);
    }
    CHECK(zeros > 0);

    // A source far outside the mesh leaves every vertex exact.
    const SingularSource far = PointDelta{Point(5, 5)};
    CHECK((truncated_interpolant(m, lin, far) - nodal(m, linear)).norm() == 0.0);
}

TEST_CASE("e.o.c. estimation")
{
    auto rec = [](double h, std::size_t n, double err) {
        StudyRecord r;
        r.h = h;
        r.vertices = n;
        r.errors["L2"] = err;
        return r;
    };
    const EocReport quarter = estimate_eoc({rec(0.1, 100, 1e-2), rec(0.05, 400, 2.5e-3)}, 2);
    REQUIRE(quarter.defined);
    CHECK(quarter.by_h.at("L2").order == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(quarter.by_n.at("L2").order == doctest::Approx(2.0).epsilon(1e-12));

    // Reference 2D point-source study, mu = 0.4, L2 column. The second entry is
    // sometimes quoted as 1.147; 1.473 is what the stated order 2.013 (and a solve) implies.
    const EocReport t1 = estimate_eoc({rec(1.0 / 16, 856, 5.802e-4), rec(1.0 / 32, 3319, 1.473e-4),
                                       rec(1.0 / 64, 13070, 0.371e-4), rec(1.0 / 128, 51875, 0.093e-4)},
                                      2);
    CHECK(std::abs(t1.by_n.at("L2").order - 2.013) <= 0.01);

    // Reference 3D segment study, mu = 1, L2 column. For three equispaced log h values the
    // least-squares slope equals the two-point slope between the ends.
    const EocReport t3 = estimate_eoc({rec(0.4, 693, 3.09e-2), rec(0.2, 3902, 2.06e-2), rec(0.1, 33663, 1.01e-2)}, 3);
    const double ends = std::log(3.09 / 1.01) / std::log(4.0);
    CHECK(t3.by_h.at("L2").order == doctest::Approx(ends).epsilon(1e-12));
    CHECK(t3.by_h.at("L2").order == doctest::Approx(0.807).epsilon(1e-3));

    CHECK_FALSE(estimate_eoc({rec(0.1, 100, 1e-2)}, 2).defined);
    CHECK(kind_of([&] { (void)estimate_eoc({rec(0.1, 100, 1e-2), rec(0.05, 400, 0.0)}, 2); }) ==
          ErrorKind::InvalidRecord);
    CHECK(kind_of([&] { (void)estimate_eoc({rec(0.1, 100, 1e-2), rec(0.2, 400, 1e-3)}, 2); }) ==
          ErrorKind::InvalidRecord);

    const EocFit f = fit_slope({0.0, 1.0, 2.0}, {1.0, 3.0, 5.0});
    CHECK(f.order == doctest::Approx(2.0));
    CHECK(f.residual <= 1e-14);
}
