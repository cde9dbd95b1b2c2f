#include "gradfem/analysis.hpp"

#include "gradfem/error.hpp"
#include "gradfem/parallel.hpp"
#include "gradfem/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace gradfem {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

double radius_or_fail(const Point& x, int dim)
{
    GRADFEM_CHECK(x.dim() == dim, InvalidArgument, "exact solution evaluated in the wrong dimension");
    const double r = norm(x);
    GRADFEM_CHECK(r > 0.0, SingularEvaluation, "exact solution evaluated at the point source");
    return r;
}

}  // namespace

double exact_point_2d(const Point& x)
{
    return -std::log(radius_or_fail(x, 2)) / (2.0 * std::numbers::pi);
}

Point exact_point_2d_gradient(const Point& x)
{
    const double r = radius_or_fail(x, 2);
    return x * (-1.0 / (2.0 * std::numbers::pi * r * r));
}

double exact_point_3d(const Point& x)
{
    return (1.0 / radius_or_fail(x, 3) - 1.0) / kFourPi;
}

Point exact_point_3d_gradient(const Point& x)
{
    const double r = radius_or_fail(x, 3);
    return x * (-1.0 / (kFourPi * r * r * r));
}

namespace {

struct AxisCoords {
    double rho;
    double z;
};

AxisCoords segment_coords(const Point& x)
{
    GRADFEM_CHECK(x.dim() == 3, InvalidArgument, "segment solution is three-dimensional");
    const AxisCoords c{std::hypot(x[0], x[1]), x[2]};
    GRADFEM_CHECK(c.rho > 0.0 || std::abs(c.z) > 1.0, SingularEvaluation,
                  "exact solution evaluated on the segment");
    return c;
}

}  // namespace

double exact_segment_3d(const Point& x)
{
    const auto [rho, z] = segment_coords(x);
    // log((R1 + 1 - z) / (R2 - 1 - z)) written without cancellation.
    const double l = rho > 0.0 ? std::asinh((1.0 - z) / rho) + std::asinh((1.0 + z) / rho)
                               : std::log((std::abs(z) + 1.0) / (std::abs(z) - 1.0));
    return (l - std::log(3.0)) / kFourPi;
}

Point exact_segment_3d_gradient(const Point& x)
{
    const auto [rho, z] = segment_coords(x);
    const double a = 1.0 - z;
    const double b = 1.0 + z;
    const double r1 = std::hypot(rho, a);
    const double r2 = std::hypot(rho, b);
    const double dz = (1.0 / r2 - 1.0 / r1) / kFourPi;
    if (rho == 0.0) return {0.0, 0.0, dz};
    // (a/R1 + b/R2) / rho^2; beyond the endpoints the two terms nearly cancel.
    double f;
    if (a * b >= 0.0) {
        f = (a / r1 + b / r2) / (rho * rho);
    } else {
        const double ga = 1.0 / (r1 * (r1 + std::abs(a)));
        const double gb = 1.0 / (r2 * (r2 + std::abs(b)));
        f = a < 0.0 ? ga - gb : gb - ga;
    }
    return {-x[0] * f / kFourPi, -x[1] * f / kFourPi, dz};
}

ExactSolution point_2d_solution() { return {exact_point_2d, exact_point_2d_gradient}; }

ExactSolution point_3d_solution() { return {exact_point_3d, exact_point_3d_gradient}; }

ExactSolution segment_3d_solution(double density)
{
    return {[density](const Point& x) { return density * exact_segment_3d(x); },
            [density](const Point& x) { return exact_segment_3d_gradient(x) * density; }};
}

void WeightedNormSpec::validate(int dim) const
{
    const double codim = dim - singular_set_dim(source);
    GRADFEM_CHECK(source_dim(source) == dim, InvalidArgument, "norm source and mesh dimensions differ");
    GRADFEM_CHECK(std::isfinite(exponent) && exponent > -codim / 2.0, InvalidArgument,
                  "weight exponent outside the integrable range");
    GRADFEM_CHECK(base_order == 3, InvalidArgument, "only the degree-3 base rule is available");
    GRADFEM_CHECK(depth >= 0 && depth <= 8, InvalidArgument, "subdivision depth must lie in [0, 8]");
}

namespace {

bool touches(const Simplex& s, const SingularSource& src)
{
    return simplex_source_distance(s, src) <= 1e-14 * diameter(s);
}

struct ElementField {
    Simplex parent;
    std::array<double, 4> values{};
    Point gradient;
};

double integrate_piece(const Simplex& s, const ElementField& el, const ExactSolution& exact,
                       const WeightedNormSpec& spec, const QuadratureRule& rule, int depth)
{
    if (depth > 0 && touches(s, spec.source)) {
        double sum = 0.0;
        for (const auto& child : red_refine(s))
            sum += integrate_piece(child, el, exact, spec, rule, depth - 1);
        return sum;
    }
    return integrate(s, rule, [&](const Point& x, const std::array<double, 4>&) {
        const double r = dist_to_source(x, spec.source);
        const double w = spec.exponent == 0.0 ? 1.0 : std::pow(r, 2.0 * spec.exponent);
        double e2;
        if (spec.kind == NormKind::L2Weighted) {
            const auto lam = barycentric(el.parent, x);
            double uh = 0.0;
            for (int i = 0; i <= s.dim; ++i)
                uh += lam[static_cast<std::size_t>(i)] * el.values[static_cast<std::size_t>(i)];
            const double e = exact.value(x) - uh;
            e2 = e * e;
        } else {
            const Point e = exact.gradient(x) - el.gradient;
            e2 = dot(e, e);
        }
        if (!std::isfinite(e2) || !std::isfinite(w))
            fail(ErrorKind::SingularEvaluation, "non-finite integrand at a quadrature node");
        return w * e2;
    });
}

}  // namespace

double weighted_error(const Mesh& mesh, const Vector& uh, const ExactSolution& exact,
                      const WeightedNormSpec& spec)
{
    spec.validate(mesh.dim());
    GRADFEM_CHECK(uh.size() == static_cast<Eigen::Index>(mesh.num_vertices()), InvalidArgument,
                  "coefficient vector does not match the mesh");
    const QuadratureRule& rule = degree3_rule(mesh.dim());
    std::vector<double> local(mesh.num_elements(), 0.0);
    std::vector<std::uint8_t> failed(mesh.num_elements(), 0);
    parallel_for(mesh.num_elements(), [&](std::size_t e) {
        ElementField el;
        el.parent = mesh.simplex(e);
        const auto g = barycentric_gradients(el.parent);
        el.gradient = Point::zero(mesh.dim());
        const auto& ids = mesh.element(e);
        for (int i = 0; i <= mesh.dim(); ++i) {
            const double v = uh[ids[static_cast<std::size_t>(i)]];
            el.values[static_cast<std::size_t>(i)] = v;
            el.gradient += g[static_cast<std::size_t>(i)] * v;
        }
        for (int extra = 0; extra <= 1; ++extra) {
            try {
                local[e] = integrate_piece(el.parent, el, exact, spec, rule, spec.depth + extra);
                return;
            } catch (const Error& err) {
                if (err.kind() != ErrorKind::SingularEvaluation) throw;
            }
        }
        failed[e] = 1;
    });
    double sum = 0.0;
    for (std::size_t e = 0; e < local.size(); ++e) {
        if (failed[e])
            fail(ErrorKind::QuadratureFailure,
                 "singular integrand on element " + std::to_string(e) + " after extra subdivision");
        sum += local[e];
    }
    return std::sqrt(sum);
}

Vector truncated_interpolant(const Mesh& mesh, const ExactSolution& exact, const SingularSource& src)
{
    const auto meta = mesh.metadata(src);
    std::vector<std::uint8_t> patch_touch(mesh.num_vertices(), 0);
    for (std::size_t e = 0; e < mesh.num_elements(); ++e)
        if ((*meta)[e].r <= 1e-14 * (*meta)[e].diameter)
            for (Index v : mesh.element_span(e)) patch_touch[static_cast<std::size_t>(v)] = 1;
    std::vector<std::uint8_t> zero(mesh.num_vertices(), 0);
    for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
        bool near = false;
        for (Index v : mesh.element_span(e)) near = near || patch_touch[static_cast<std::size_t>(v)];
        if (near)
            for (Index v : mesh.element_span(e)) zero[static_cast<std::size_t>(v)] = 1;
    }
    Vector a = Vector::Zero(static_cast<Eigen::Index>(mesh.num_vertices()));
    for (std::size_t i = 0; i < mesh.num_vertices(); ++i)
        if (!zero[i]) a[static_cast<Eigen::Index>(i)] = exact.value(mesh.vertex(static_cast<Index>(i)));
    return a;
}

EocFit fit_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    GRADFEM_CHECK(x.size() == y.size() && x.size() >= 2, InvalidArgument,
                  "slope fit needs two or more paired samples");
    const double n = static_cast<double>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    GRADFEM_CHECK(sxx > 0.0, InvalidRecord, "slope fit needs distinct abscissae");
    EocFit fit;
    fit.order = sxy / sxx;
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = y[i] - (my + fit.order * (x[i] - mx));
        ss += d * d;
    }
    fit.residual = std::sqrt(ss / n);
    return fit;
}

EocReport estimate_eoc(const std::vector<StudyRecord>& records, int dim)
{
    EocReport rep;
    if (records.size() < 2) return rep;
    for (std::size_t i = 1; i < records.size(); ++i)
        GRADFEM_CHECK(records[i].h < records[i - 1].h, InvalidRecord,
                      "study levels must have strictly decreasing h");
    for (const auto& [name, first] : records.front().errors) {
        (void)first;
        std::vector<double> lh, ln, le;
        for (const auto& rec : records) {
            const auto it = rec.errors.find(name);
            GRADFEM_CHECK(it != rec.errors.end(), InvalidRecord, "norm '" + name + "' missing from a level");
            GRADFEM_CHECK(std::isfinite(it->second) && it->second > 0.0, InvalidRecord,
                          "norm '" + name + "' has a zero or non-finite error");
            GRADFEM_CHECK(rec.h > 0.0 && rec.vertices > 0, InvalidRecord, "level has no size data");
            lh.push_back(-std::log(rec.h));
            ln.push_back(std::log(static_cast<double>(rec.vertices)));
            le.push_back(-std::log(it->second));
        }
        rep.by_h[name] = fit_slope(lh, le);
        EocFit fn = fit_slope(ln, le);
        fn.order *= dim;
        rep.by_n[name] = fn;
    }
    rep.defined = true;
    return rep;
}

}  // namespace gradfem
