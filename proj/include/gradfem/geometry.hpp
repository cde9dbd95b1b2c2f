#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <variant>

namespace gradfem {

/// A point (or vector) in R^2 or R^3. Unused trailing coordinates are zero.
class Point {
public:
    Point() = default;
    Point(double x, double y) : dim_(2), c_{x, y, 0.0} {}
    Point(double x, double y, double z) : dim_(3), c_{x, y, z} {}

    static Point zero(int dim);

    [[nodiscard]] int dim() const noexcept { return dim_; }
    [[nodiscard]] double operator[](int i) const noexcept { return c_[static_cast<std::size_t>(i)]; }
    double& operator[](int i) noexcept { return c_[static_cast<std::size_t>(i)]; }
    [[nodiscard]] const std::array<double, 3>& coords() const noexcept { return c_; }
    [[nodiscard]] bool finite() const noexcept;

    Point& operator+=(const Point& o) noexcept;
    Point& operator-=(const Point& o) noexcept;
    Point& operator*=(double s) noexcept;

    friend bool operator==(const Point&, const Point&) = default;

private:
    int dim_ = 0;
    std::array<double, 3> c_{0.0, 0.0, 0.0};
};

inline Point operator+(Point a, const Point& b) noexcept { return a += b; }
inline Point operator-(Point a, const Point& b) noexcept { return a -= b; }
inline Point operator*(Point a, double s) noexcept { return a *= s; }
inline Point operator*(double s, Point a) noexcept { return a *= s; }

inline double dot(const Point& a, const Point& b) noexcept
{
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline double norm(const Point& a) noexcept { return std::sqrt(dot(a, a)); }
inline double distance(const Point& a, const Point& b) noexcept { return norm(a - b); }
Point cross(const Point& a, const Point& b) noexcept;

/// Unit-mass Dirac delta at a point.
struct PointDelta {
    Point location;
};

/// Line measure on the straight segment [a, b] with a density given as a
/// function of arclength t in [0, |b-a|].
struct SegmentMeasure {
    Point a;
    Point b;
    std::function<double(double)> density;
    /// Set when the density is constant; enables exact shortcuts.
    double constant_density = 0.5;
    bool is_constant = true;

    static SegmentMeasure constant(const Point& a, const Point& b, double value = 0.5);
    static SegmentMeasure variable(const Point& a, const Point& b,
                                   std::function<double(double)> density);

    [[nodiscard]] double length() const noexcept { return distance(a, b); }
    [[nodiscard]] double density_at(double t) const;
    [[nodiscard]] Point at(double t) const;  // arclength parameter
};

using SingularSource = std::variant<PointDelta, SegmentMeasure>;

/// Canonical segment along the last axis from (0',-half) to (0',half).
SegmentMeasure axis_segment(int dim, double half_length, double density);

[[nodiscard]] int source_dim(const SingularSource& src);
/// Dimension m of the singular set (0 for a point, 1 for a segment).
[[nodiscard]] int singular_set_dim(const SingularSource& src);
[[nodiscard]] bool same_source(const SingularSource& a, const SingularSource& b);

/// r(x): Euclidean distance to the point or to the closed segment.
double dist_to_source(const Point& x, const SingularSource& src);
/// r_e(x): distance to the nearer segment endpoint.
double dist_to_endpoints(const Point& x, const SingularSource& src);
/// Arclength-normalized projection parameter t* in [0,1] of x onto [a,b].
double segment_parameter(const Point& x, const Point& a, const Point& b);

struct UnitDisk {};
struct UnitBall {};
struct Ellipsoid {
    std::array<double, 3> semi_axes{1.7320508075688772, 1.7320508075688772, 2.0};
};
/// Arbitrary star-shaped domain around the origin.
struct CustomDomain {
    int dim = 2;
    std::function<bool(const Point&)> inside;
    std::function<Point(const Point&)> project;
    /// Relative residual of the boundary equation (0 on the boundary).
    std::function<double(const Point&)> residual;
};

using Domain = std::variant<UnitDisk, UnitBall, Ellipsoid, CustomDomain>;

/// Ellipse x^2/a^2 + y^2/b^2 <= 1 as a custom 2D domain, projected radially.
CustomDomain ellipse_domain(double a, double b);

[[nodiscard]] int domain_dim(const Domain& dom);
[[nodiscard]] bool contains(const Domain& dom, const Point& x);
/// Radial projection from the origin onto the domain boundary.
Point boundary_project(const Point& x, const Domain& dom);
/// Relative residual of the boundary equation at x.
double boundary_residual(const Point& x, const Domain& dom);

}  // namespace gradfem
