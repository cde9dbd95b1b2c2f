#include "gradfem/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gradfem {

Point Simplex::barycenter() const noexcept
{
    Point c = Point::zero(dim);
    for (int i = 0; i <= dim; ++i) c += v[static_cast<std::size_t>(i)];
    return c * (1.0 / (dim + 1));
}

double signed_volume(const Simplex& s) noexcept
{
    const Point e1 = s.v[1] - s.v[0];
    const Point e2 = s.v[2] - s.v[0];
    if (s.dim == 2) return 0.5 * (e1[0] * e2[1] - e1[1] * e2[0]);
    const Point e3 = s.v[3] - s.v[0];
    return dot(e1, cross(e2, e3)) / 6.0;
}

double diameter(const Simplex& s) noexcept
{
    double d = 0.0;
    for (int i = 0; i <= s.dim; ++i)
        for (int j = i + 1; j <= s.dim; ++j)
            d = std::max(d, distance(s.v[static_cast<std::size_t>(i)], s.v[static_cast<std::size_t>(j)]));
    return d;
}

std::array<Point, 4> barycentric_gradients(const Simplex& s) noexcept
{
    std::array<Point, 4> g{};
    if (s.dim == 2) {
        const double twice = 2.0 * signed_volume(s);
        for (int i = 0; i < 3; ++i) {
            const Point& p = s.v[static_cast<std::size_t>((i + 1) % 3)];
            const Point& q = s.v[static_cast<std::size_t>((i + 2) % 3)];
            g[static_cast<std::size_t>(i)] = Point(p[1] - q[1], q[0] - p[0]) * (1.0 / twice);
        }
        return g;
    }
    const double six = 6.0 * signed_volume(s);
    // grad lambda_i = (face normal opposite i) / (6 vol), oriented inward.
    static constexpr int faces[4][3] = {{1, 2, 3}, {0, 3, 2}, {0, 1, 3}, {0, 2, 1}};
    for (int i = 0; i < 4; ++i) {
        const Point& a = s.v[static_cast<std::size_t>(faces[i][0])];
        const Point& b = s.v[static_cast<std::size_t>(faces[i][1])];
        const Point& c = s.v[static_cast<std::size_t>(faces[i][2])];
        g[static_cast<std::size_t>(i)] = cross(b - a, c - a) * (-1.0 / six);
    }
    return g;
}

std::array<double, 4> barycentric(const Simplex& s, const Point& x) noexcept
{
    const auto g = barycentric_gradients(s);
    std::array<double, 4> lam{0.0, 0.0, 0.0, 0.0};
    double rest = 1.0;
    for (int i = 1; i <= s.dim; ++i) {
        lam[static_cast<std::size_t>(i)] = dot(g[static_cast<std::size_t>(i)], x - s.v[0]);
        rest -= lam[static_cast<std::size_t>(i)];
    }
    lam[0] = rest;
    return lam;
}

double point_segment_distance(const Point& x, const Point& a, const Point& b) noexcept
{
    const Point d = b - a;
    const double dd = dot(d, d);
    const double t = dd > 0.0 ? std::clamp(dot(x - a, d) / dd, 0.0, 1.0) : 0.0;
    return distance(x, a + d * t);
}

double segment_segment_distance(const Point& p0, const Point& p1, const Point& q0,
                                const Point& q1) noexcept
{
    // Closest points between segments, clamped parametrization.
    const Point d1 = p1 - p0;
    const Point d2 = q1 - q0;
    const Point r = p0 - q0;
    const double a = dot(d1, d1);
    const double e = dot(d2, d2);
    const double f = dot(d2, r);
    double s = 0.0;
    double t = 0.0;
    if (a <= 0.0 && e <= 0.0) return norm(r);
    if (a <= 0.0) {
        t = std::clamp(f / e, 0.0, 1.0);
    } else {
        const double c = dot(d1, r);
        if (e <= 0.0) {
            s = std::clamp(-c / a, 0.0, 1.0);
        } else {
            const double b = dot(d1, d2);
            const double denom = a * e - b * b;
            s = denom > 0.0 ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
            t = (b * s + f) / e;
            if (t < 0.0) {
                t = 0.0;
                s = std::clamp(-c / a, 0.0, 1.0);
            } else if (t > 1.0) {
                t = 1.0;
                s = std::clamp((b - c) / a, 0.0, 1.0);
            }
        }
    }
    return distance(p0 + d1 * s, q0 + d2 * t);
}

namespace {

Point closest_on_triangle(const Point& p, const Point& a, const Point& b, const Point& c) noexcept
{
    const Point ab = b - a;
    const Point ac = c - a;
    const Point ap = p - a;
    const double d1 = dot(ab, ap);
    const double d2 = dot(ac, ap);
    if (d1 <= 0.0 && d2 <= 0.0) return a;
    const Point bp = p - b;
    const double d3 = dot(ab, bp);
    const double d4 = dot(ac, bp);
    if (d3 >= 0.0 && d4 <= d3) return b;
    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + ab * (d1 / (d1 - d3));
    const Point cp = p - c;
    const double d5 = dot(ab, cp);
    const double d6 = dot(ac, cp);
    if (d6 >= 0.0 && d5 <= d6) return c;
    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + ac * (d2 / (d2 - d6));
    const double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0)
        return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
    const double denom = 1.0 / (va + vb + vc);
    return a + ab * (vb * denom) + ac * (vc * denom);
}

}  // namespace

double point_simplex_distance(const Point& x, const Simplex& s) noexcept
{
    const auto lam = barycentric(s, x);
    bool inside = true;
    for (int i = 0; i <= s.dim; ++i) inside = inside && lam[static_cast<std::size_t>(i)] >= 0.0;
    if (inside) return 0.0;
    double best = std::numeric_limits<double>::infinity();
    if (s.dim == 2) {
        for (int i = 0; i < 3; ++i)
            best = std::min(best, point_segment_distance(x, s.v[static_cast<std::size_t>(i)],
                                                         s.v[static_cast<std::size_t>((i + 1) % 3)]));
        return best;
    }
    static constexpr int faces[4][3] = {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}};
    for (const auto& f : faces) {
        const Point q = closest_on_triangle(x, s.v[static_cast<std::size_t>(f[0])],
                                            s.v[static_cast<std::size_t>(f[1])],
                                            s.v[static_cast<std::size_t>(f[2])]);
        best = std::min(best, distance(x, q));
    }
    return best;
}

std::optional<std::pair<double, double>> clip_segment(const Simplex& s, const Point& a,
                                                      const Point& b, double tol) noexcept
{
    // Each barycentric coordinate is affine along the segment: lam_i(t) = p_i + t q_i.
    const auto la = barycentric(s, a);
    const auto lb = barycentric(s, b);
    double t0 = 0.0;
    double t1 = 1.0;
    for (int i = 0; i <= s.dim; ++i) {
        const double p = la[static_cast<std::size_t>(i)] + tol;
        const double q = lb[static_cast<std::size_t>(i)] - la[static_cast<std::size_t>(i)];
        if (q == 0.0) {
            if (p < 0.0) return std::nullopt;
            continue;
        }
        const double t = -p / q;
        if (q > 0.0)
            t0 = std::max(t0, t);
        else
            t1 = std::min(t1, t);
        if (t0 > t1) return std::nullopt;
    }
    return std::make_pair(t0, t1);
}

double segment_simplex_distance(const Point& a, const Point& b, const Simplex& s) noexcept
{
    if (clip_segment(s, a, b)) return 0.0;
    double best = std::min(point_simplex_distance(a, s), point_simplex_distance(b, s));
    for (int i = 0; i <= s.dim; ++i)
        for (int j = i + 1; j <= s.dim; ++j)
            best = std::min(best, segment_segment_distance(a, b, s.v[static_cast<std::size_t>(i)],
                                                           s.v[static_cast<std::size_t>(j)]));
    return best;
}

double simplex_source_distance(const Simplex& s, const SingularSource& src) noexcept
{
    if (const auto* p = std::get_if<PointDelta>(&src)) return point_simplex_distance(p->location, s);
    const auto& seg = std::get<SegmentMeasure>(src);
    return segment_simplex_distance(seg.a, seg.b, s);
}

}  // namespace gradfem
