#include "gradfem/quadrature.hpp"

#include "gradfem/error.hpp"

#include <cmath>
#include <numbers>

namespace gradfem {

const QuadratureRule& degree3_rule(int dim)
{
    static const QuadratureRule tri = [] {
        QuadratureRule r;
        r.dim = 2;
        r.degree = 3;
        r.nodes = {{1.0 / 3, 1.0 / 3, 1.0 / 3, 0.0}, {0.6, 0.2, 0.2, 0.0}, {0.2, 0.6, 0.2, 0.0},
                   {0.2, 0.2, 0.6, 0.0}};
        r.weights = {-27.0 / 48, 25.0 / 48, 25.0 / 48, 25.0 / 48};
        return r;
    }();
    static const QuadratureRule tet = [] {
        QuadratureRule r;
        r.dim = 3;
        r.degree = 3;
        r.nodes = {{0.25, 0.25, 0.25, 0.25}, {0.5, 1.0 / 6, 1.0 / 6, 1.0 / 6}, {1.0 / 6, 0.5, 1.0 / 6, 1.0 / 6},
                   {1.0 / 6, 1.0 / 6, 0.5, 1.0 / 6}, {1.0 / 6, 1.0 / 6, 1.0 / 6, 0.5}};
        r.weights = {-0.8, 0.45, 0.45, 0.45, 0.45};
        return r;
    }();
    GRADFEM_CHECK(dim == 2 || dim == 3, InvalidArgument, "quadrature dimension must be 2 or 3");
    return dim == 2 ? tri : tet;
}

LineRule gauss_legendre(int degree)
{
    GRADFEM_CHECK(degree >= 0, InvalidArgument, "quadrature degree must be nonnegative");
    const int n = std::max(1, (degree + 2) / 2);
    LineRule r;
    r.nodes.resize(static_cast<std::size_t>(n));
    r.weights.resize(static_cast<std::size_t>(n));
    // Newton iteration on P_n from the Chebyshev initial guess.
    for (int i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 1.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        r.nodes[static_cast<std::size_t>(i)] = 0.5 * (1.0 - x);
        r.weights[static_cast<std::size_t>(i)] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
}

double integrate(const Simplex& s, const QuadratureRule& rule,
                 const std::function<double(const Point&, const std::array<double, 4>&)>& f)
{
    const double vol = std::abs(signed_volume(s));
    double sum = 0.0;
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
        const auto& lam = rule.nodes[q];
        Point x = Point::zero(s.dim);
        for (int i = 0; i <= s.dim; ++i) x += s.v[static_cast<std::size_t>(i)] * lam[static_cast<std::size_t>(i)];
        sum += rule.weights[q] * f(x, lam);
    }
    return vol * sum;
}

std::vector<Simplex> red_refine(const Simplex& s)
{
    auto mid = [&](int i, int j) {
        return (s.v[static_cast<std::size_t>(i)] + s.v[static_cast<std::size_t>(j)]) * 0.5;
    };
    auto make = [&](std::initializer_list<Point> pts) {
        Simplex c;
        c.dim = s.dim;
        std::size_t k = 0;
        for (const auto& p : pts) c.v[k++] = p;
        return c;
    };
    if (s.dim == 2) {
        const Point m01 = mid(0, 1), m12 = mid(1, 2), m02 = mid(0, 2);
        return {make({s.v[0], m01, m02}), make({m01, s.v[1], m12}), make({m02, m12, s.v[2]}),
                make({m01, m12, m02})};
    }
    const Point m01 = mid(0, 1), m02 = mid(0, 2), m03 = mid(0, 3);
    const Point m12 = mid(1, 2), m13 = mid(1, 3), m23 = mid(2, 3);
    // Corner tets, then the inner octahedron cut along its m02-m13 diagonal; all
    // children keep the parent orientation.
    return {make({s.v[0], m01, m02, m03}), make({m01, s.v[1], m12, m13}),
            make({m02, m12, s.v[2], m23}), make({m03, m13, m23, s.v[3]}),
            make({m01, m02, m03, m13}),    make({m02, m01, m12, m13}),
            make({m02, m03, m13, m23}),    make({m12, m02, m13, m23})};
}

}  // namespace gradfem
