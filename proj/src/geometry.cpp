#include "gradfem/geometry.hpp"

#include "gradfem/error.hpp"

#include <algorithm>
#include <utility>

namespace gradfem {

const char* to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::DegenerateInput: return "degenerate-input";
    case ErrorKind::ResourceLimit: return "resource-limit";
    case ErrorKind::GradingFailure: return "grading-failure";
    case ErrorKind::ConstructionFailure: return "construction-failure";
    case ErrorKind::AssemblyFailure: return "assembly-failure";
    case ErrorKind::PointLocationFailure: return "point-location-failure";
    case ErrorKind::ClippingFailure: return "clipping-failure";
    case ErrorKind::EmptySystem: return "empty-system";
    case ErrorKind::SolverFailure: return "solver-failure";
    case ErrorKind::NotSpd: return "not-spd";
    case ErrorKind::SingularEvaluation: return "singular-evaluation";
    case ErrorKind::QuadratureFailure: return "quadrature-failure";
    case ErrorKind::InvalidRecord: return "invalid-record";
    case ErrorKind::NoTheorem: return "no-theorem";
    case ErrorKind::Io: return "io-error";
    }
    return "unknown";
}

Point Point::zero(int dim)
{
    GRADFEM_CHECK(dim == 2 || dim == 3, InvalidArgument, "point dimension must be 2 or 3");
    return dim == 2 ? Point(0.0, 0.0) : Point(0.0, 0.0, 0.0);
}

bool Point::finite() const noexcept
{
    return std::isfinite(c_[0]) && std::isfinite(c_[1]) && std::isfinite(c_[2]);
}

Point& Point::operator+=(const Point& o) noexcept
{
    if (dim_ == 0) dim_ = o.dim_;
    for (std::size_t i = 0; i < 3; ++i) c_[i] += o.c_[i];
    return *this;
}

Point& Point::operator-=(const Point& o) noexcept
{
    if (dim_ == 0) dim_ = o.dim_;
    for (std::size_t i = 0; i < 3; ++i) c_[i] -= o.c_[i];
    return *this;
}

Point& Point::operator*=(double s) noexcept
{
    for (auto& v : c_) v *= s;
    return *this;
}

Point cross(const Point& a, const Point& b) noexcept
{
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

SegmentMeasure SegmentMeasure::constant(const Point& a, const Point& b, double value)
{
    GRADFEM_CHECK(a.dim() == b.dim(), InvalidArgument, "segment endpoints differ in dimension");
    GRADFEM_CHECK(a.finite() && b.finite(), InvalidArgument, "segment endpoints must be finite");
    GRADFEM_CHECK(distance(a, b) > 0.0, InvalidArgument, "segment endpoints coincide");
    SegmentMeasure s;
    s.a = a;
    s.b = b;
    s.constant_density = value;
    s.is_constant = true;
    s.density = [value](double) { return value; };
    return s;
}

SegmentMeasure SegmentMeasure::variable(const Point& a, const Point& b,
                                        std::function<double(double)> density)
{
    SegmentMeasure s = constant(a, b, 0.0);
    s.is_constant = false;
    s.density = std::move(density);
    return s;
}

double SegmentMeasure::density_at(double t) const
{
    return is_constant ? constant_density : density(t);
}

Point SegmentMeasure::at(double t) const
{
    return a + (b - a) * (t / length());
}

SegmentMeasure axis_segment(int dim, double half_length, double density)
{
    Point a = Point::zero(dim);
    Point b = Point::zero(dim);
    a[dim - 1] = -half_length;
    b[dim - 1] = half_length;
    return SegmentMeasure::constant(a, b, density);
}

int source_dim(const SingularSource& src)
{
    return std::visit(
        [](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, PointDelta>)
                return s.location.dim();
            else
                return s.a.dim();
        },
        src);
}

int singular_set_dim(const SingularSource& src)
{
    return std::holds_alternative<PointDelta>(src) ? 0 : 1;
}

bool same_source(const SingularSource& a, const SingularSource& b)
{
    if (a.index() != b.index()) return false;
    if (const auto* p = std::get_if<PointDelta>(&a))
        return p->location == std::get<PointDelta>(b).location;
    const auto& sa = std::get<SegmentMeasure>(a);
    const auto& sb = std::get<SegmentMeasure>(b);
    return sa.a == sb.a && sa.b == sb.b;
}

double segment_parameter(const Point& x, const Point& a, const Point& b)
{
    const Point d = b - a;
    return std::clamp(dot(x - a, d) / dot(d, d), 0.0, 1.0);
}

double dist_to_source(const Point& x, const SingularSource& src)
{
    GRADFEM_CHECK(x.dim() == source_dim(src), InvalidArgument,
                  "point and source dimensions differ");
    if (const auto* p = std::get_if<PointDelta>(&src)) return distance(x, p->location);
    const auto& s = std::get<SegmentMeasure>(src);
    const double t = segment_parameter(x, s.a, s.b);
    return distance(x, s.a + (s.b - s.a) * t);
}

double dist_to_endpoints(const Point& x, const SingularSource& src)
{
    const auto* s = std::get_if<SegmentMeasure>(&src);
    GRADFEM_CHECK(s != nullptr, InvalidArgument, "endpoint distance needs a segment source");
    GRADFEM_CHECK(x.dim() == s->a.dim(), InvalidArgument, "point and source dimensions differ");
    return std::min(distance(x, s->a), distance(x, s->b));
}

namespace {

// Value q(x) of the quadratic form whose unit level set is the boundary.
double quadric(const Point& x, const Domain& dom)
{
    if (std::holds_alternative<UnitDisk>(dom) || std::holds_alternative<UnitBall>(dom))
        return dot(x, x);
    const auto& e = std::get<Ellipsoid>(dom);
    double q = 0.0;
    for (int i = 0; i < 3; ++i) q += x[i] * x[i] / (e.semi_axes[i] * e.semi_axes[i]);
    return q;
}

}  // namespace

CustomDomain ellipse_domain(double a, double b)
{
    CustomDomain d;
    d.dim = 2;
    auto q = [a, b](const Point& x) { return x[0] * x[0] / (a * a) + x[1] * x[1] / (b * b); };
    d.inside = [q](const Point& x) { return q(x) <= 1.0 + 1e-12; };
    d.project = [q](const Point& x) {
        const double v = q(x);
        GRADFEM_CHECK(v > 0.0, DegenerateInput, "cannot project the center of an ellipse");
        return x * (1.0 / std::sqrt(v));
    };
    d.residual = [q](const Point& x) { return std::abs(std::sqrt(q(x)) - 1.0); };
    return d;
}

int domain_dim(const Domain& dom)
{
    if (std::holds_alternative<UnitDisk>(dom)) return 2;
    if (const auto* c = std::get_if<CustomDomain>(&dom)) return c->dim;
    return 3;
}

bool contains(const Domain& dom, const Point& x)
{
    if (const auto* c = std::get_if<CustomDomain>(&dom)) return c->inside(x);
    return quadric(x, dom) <= 1.0 + 1e-12;
}

Point boundary_project(const Point& x, const Domain& dom)
{
    GRADFEM_CHECK(x.dim() == domain_dim(dom), InvalidArgument,
                  "point and domain dimensions differ");
    if (const auto* c = std::get_if<CustomDomain>(&dom)) return c->project(x);
    const double q = quadric(x, dom);
    GRADFEM_CHECK(q > 0.0 && std::isfinite(q), DegenerateInput,
                  "radial projection undefined at the domain center");
    return x * (1.0 / std::sqrt(q));
}

double boundary_residual(const Point& x, const Domain& dom)
{
    if (const auto* c = std::get_if<CustomDomain>(&dom)) return c->residual(x);
    return std::abs(std::sqrt(quadric(x, dom)) - 1.0);
}

}  // namespace gradfem
