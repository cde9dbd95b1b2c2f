#include "doctest.h"

#include "gradfem/error.hpp"
#include "gradfem/geometry.hpp"

#include <cmath>
#include <random>

using namespace gradfem;

namespace {

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

Point random_point(std::mt19937_64& rng, int dim, double scale)
{
    std::uniform_real_distribution<double> u(-scale, scale);
    return dim == 2 ? Point(u(rng), u(rng)) : Point(u(rng), u(rng), u(rng));
}

}  // namespace

TEST_CASE("distance to a segment and to a point")
{
    const SingularSource seg = axis_segment(3, 0.5, 0.5);
    CHECK(dist_to_source(Point(1, 0, 0), seg) == doctest::Approx(1.0));
    CHECK(dist_to_source(Point(0, 0, 1), seg) == doctest::Approx(0.5));
    const SingularSource pt = PointDelta{Point(0, 0, 0)};
    CHECK(dist_to_source(Point(0, 0, 0), pt) == 0.0);
    CHECK(kind_of([&] { (void)dist_to_source(Point(1, 0), seg); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("distance to the segment endpoints")
{
    const SingularSource seg = axis_segment(3, 0.5, 0.5);
    CHECK(dist_to_endpoints(Point(0, 0, 0), seg) == doctest::Approx(0.5));
    CHECK(dist_to_endpoints(Point(0, 3, 4.5), seg) == doctest::Approx(5.0));
    CHECK(dist_to_endpoints(Point(0, 0, 0.5), seg) == 0.0);
    const SingularSource pt = PointDelta{Point(0, 0, 0)};
    CHECK(kind_of([&] { (void)dist_to_endpoints(Point(1, 0, 0), pt); }) ==
          ErrorKind::InvalidArgument);
}

TEST_CASE("radial boundary projection")
{
    const Point p = boundary_project(Point(2, 0), UnitDisk{});
    CHECK(p[0] == doctest::Approx(1.0));
    CHECK(p[1] == doctest::Approx(0.0));
    const Point q = boundary_project(Point(0, 0, 3), Ellipsoid{});
    CHECK(q[2] == doctest::Approx(2.0));

    // Oracle: bisection on the boundary equation along the ray.
    const Point x(1, 1, 0);
    double lo = 0.0;
    double hi = 10.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double g = mid * mid * (1.0 / 3.0 + 1.0 / 3.0);
        (g < 1.0 ? lo : hi) = mid;
    }
    const Point e = boundary_project(x, Ellipsoid{});
    CHECK(e[0] == doctest::Approx(lo).epsilon(1e-12));
    CHECK(e[1] == doctest::Approx(lo).epsilon(1e-12));
    CHECK(e[0] == doctest::Approx(std::sqrt(1.5)).epsilon(1e-12));
    CHECK(e[2] == 0.0);
    CHECK(std::abs(boundary_residual(e, Ellipsoid{})) < 1e-12);

    CHECK(kind_of([] { (void)boundary_project(Point(0, 0), UnitDisk{}); }) ==
          ErrorKind::DegenerateInput);
}

TEST_CASE("property: distance is 1-Lipschitz and r <= r_e")
{
    std::mt19937_64 rng(7);
    const SingularSource seg = axis_segment(3, 1.0, 0.5);
    const SingularSource pt = PointDelta{Point(0.1, -0.2, 0.3)};
    for (int i = 0; i < 1000; ++i) {
        const Point x = random_point(rng, 3, 3.0);
        const Point y = random_point(rng, 3, 3.0);
        for (const auto* src : {&seg, &pt})
            CHECK(std::abs(dist_to_source(x, *src) - dist_to_source(y, *src)) <=
                  distance(x, y) + 1e-14);
        const double r = dist_to_source(x, seg);
        const double re = dist_to_endpoints(x, seg);
        CHECK(r <= re + 1e-15);
        // Equality exactly when the nearest point is an endpoint (|z| >= 1 on the axis segment).
        if (std::abs(x[2]) >= 1.0) CHECK(r == doctest::Approx(re).epsilon(1e-14));
        else CHECK(r < re);
    }
}

TEST_CASE("property: projection is idempotent")
{
    std::mt19937_64 rng(11);
    const Domain doms[] = {UnitDisk{}, UnitBall{}, Ellipsoid{}, ellipse_domain(std::sqrt(3.0), 2.0)};
    for (const auto& dom : doms) {
        const int dim = domain_dim(dom);
        for (int i = 0; i < 200; ++i) {
            const Point x = random_point(rng, dim, 4.0);
            const Point p = boundary_project(x, dom);
            const Point q = boundary_project(p, dom);
            CHECK(distance(p, q) <= 1e-12 * norm(p));
            CHECK(std::abs(boundary_residual(p, dom)) <= 1e-12);
        }
    }
}

TEST_CASE("segment measure helpers")
{
    const SegmentMeasure s = axis_segment(3, 1.0, 0.5);
    CHECK(s.length() == doctest::Approx(2.0));
    CHECK(s.density_at(0.3) == 0.5);
    CHECK(s.at(1.0)[2] == doctest::Approx(0.0));
    CHECK(kind_of([] { (void)SegmentMeasure::constant(Point(0, 0), Point(0, 0)); }) ==
          ErrorKind::InvalidArgument);
    const SegmentMeasure v = SegmentMeasure::variable(Point(0, 0), Point(2, 0), [](double t) { return t; });
    CHECK(v.density_at(1.5) == 1.5);
    CHECK(singular_set_dim(SingularSource{s}) == 1);
    CHECK(singular_set_dim(SingularSource{PointDelta{Point(0, 0)}}) == 0);
}
