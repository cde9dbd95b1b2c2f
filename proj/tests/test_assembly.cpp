#include "doctest.h"
#include "mesh_helpers.hpp"

#include "gradfem/assembly.hpp"
#include "gradfem/error.hpp"
#include "gradfem/generators.hpp"
#include "gradfem/parallel.hpp"
#include "gradfem/solver.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
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

double max_row_sum(const SparseMatrix& a)
{
    double worst = 0.0;
    for (Eigen::Index i = 0; i < a.outerSize(); ++i) {
        double s = 0.0;
        for (SparseMatrix::InnerIterator it(a, i); it; ++it) s += it.value();
        worst = std::max(worst, std::abs(s));
    }
    return worst;
}

double asymmetry(const SparseMatrix& a)
{
    const SparseMatrix t = a.transpose();
    return (a - t).norm() / a.norm();
}

Mesh mesh_2d() { return grade_by_rescaling(uniform_mesh(UnitDisk{}, 0.125), 0.4, Point(0, 0)); }
Mesh mesh_3d() { return graded_ball_by_construction(0.25, 0.5); }

}  // namespace

TEST_CASE("local stiffness of the unit right triangle")
{
    Simplex s;
    s.dim = 2;
    s.v[0] = Point(0, 0);
    s.v[1] = Point(1, 0);
    s.v[2] = Point(0, 1);
    const auto k = local_stiffness(s);
    const double want[3][3] = {{1.0, -0.5, -0.5}, {-0.5, 0.5, 0.0}, {-0.5, 0.0, 0.5}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(k[i][j] == doctest::Approx(want[i][j]).epsilon(1e-15));

    s.v[2] = Point(2, 0);
    CHECK(kind_of([&] { (void)local_stiffness(s); }) == ErrorKind::AssemblyFailure);
}

TEST_CASE("stiffness matrix: symmetry, constant kernel and 2D scale invariance")
{
    for (const Mesh& m : {mesh_2d(), mesh_3d()}) {
        const SparseMatrix a = assemble_stiffness(m);
        CHECK(max_row_sum(a) <= 1e-12);
        CHECK(asymmetry(a) <= 1e-12);
    }
    const Mesh m = mesh_2d();
    std::vector<Point> scaled;
    for (const auto& p : m.vertices()) scaled.push_back(p * 3.5);
    const Mesh big(2, scaled, m.elements(), m.boundary());
    const SparseMatrix d = assemble_stiffness(m) - assemble_stiffness(big);
    CHECK(d.norm() <= 1e-12 * assemble_stiffness(m).norm());
}

TEST_CASE("property: stiffness assembly is permutation-equivariant")
{
    const Mesh m = mesh_3d();
    const auto n = m.num_vertices();
    std::vector<Index> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::mt19937_64 rng(17);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<Point> verts(n);
    std::vector<std::uint8_t> bnd(n);
    for (std::size_t i = 0; i < n; ++i) {
        verts[static_cast<std::size_t>(perm[i])] = m.vertices()[i];
        bnd[static_cast<std::size_t>(perm[i])] = m.boundary()[i];
    }
    std::vector<Element> els = m.elements();
    for (auto& el : els)
        for (int i = 0; i < 4; ++i) el[static_cast<std::size_t>(i)] = perm[static_cast<std::size_t>(el[static_cast<std::size_t>(i)])];
    const Mesh p(3, verts, els, bnd);
    const SparseMatrix a = assemble_stiffness(m);
    const SparseMatrix b = assemble_stiffness(p);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < a.outerSize(); ++i)
        for (SparseMatrix::InnerIterator it(a, i); it; ++it)
            worst = std::max(worst, std::abs(it.value() - b.coeff(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(it.col())])));
    CHECK(worst <= 1e-13);
    CHECK(a.nonZeros() == b.nonZeros());
}

TEST_CASE("assembly does not depend on the thread count")
{
    const Mesh m = mesh_3d();
    const SegmentMeasure seg = SegmentMeasure::constant(Point(-0.3, 0.1, -0.5), Point(0.2, -0.1, 0.6), 0.7);
    const unsigned saved = thread_count();
    set_thread_count(1);
    const SparseMatrix a1 = assemble_stiffness(m);
    const Vector b1 = assemble_rhs_segment(m, seg);
    set_thread_count(4);
    const SparseMatrix a4 = assemble_stiffness(m);
    const Vector b4 = assemble_rhs_segment(m, seg);
    set_thread_count(saved);
    CHECK(a1.nonZeros() == a4.nonZeros());
    CHECK(std::equal(a1.valuePtr(), a1.valuePtr() + a1.nonZeros(), a4.valuePtr()));
    CHECK(std::equal(a1.innerIndexPtr(), a1.innerIndexPtr() + a1.nonZeros(), a4.innerIndexPtr()));
    CHECK(b1 == b4);
}

TEST_CASE("point load vector")
{
    const Mesh m = mesh_2d();
    const Index v = 10;
    const Vector at_vertex = assemble_rhs_point(m, m.vertex(v));
    CHECK(at_vertex[v] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(at_vertex.sum() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK((at_vertex.array() != 0.0).count() == 1);

    const Simplex s = m.simplex(5);
    const Vector bc = assemble_rhs_point(m, s.barycenter());
    for (int i = 0; i < 3; ++i) CHECK(bc[m.element(5)[static_cast<std::size_t>(i)]] == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
    CHECK((bc.array() != 0.0).count() == 3);

    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(-0.7, 0.7);
    for (int i = 0; i < 100; ++i) {
        const Vector b = assemble_rhs_point(m, Point(u(rng), u(rng)));
        CHECK(std::abs(b.sum() - 1.0) <= 1e-14);
        CHECK((b.array() != 0.0).count() <= 3);
    }
    const Mesh b3 = mesh_3d();
    CHECK(std::abs(assemble_rhs_point(b3, Point(0.1, 0.2, -0.3)).sum() - 1.0) <= 1e-14);
    CHECK(kind_of([&] { (void)assemble_rhs_point(m, Point(1.5, 0.0)); }) == ErrorKind::PointLocationFailure);
}

TEST_CASE("property: point loads are linear in the location within one element")
{
    const Mesh m = mesh_3d();
    const Simplex s = m.simplex(100);
    const Point c = s.barycenter();
    const Point p0 = c + (s.v[0] - c) * 0.5;
    const Point p2 = c + (s.v[1] - c) * 0.5;
    const Point p1 = (p0 + p2) * 0.5;
    const Vector b0 = assemble_rhs_point(m, p0);
    const Vector b1 = assemble_rhs_point(m, p1);
    const Vector b2 = assemble_rhs_point(m, p2);
    CHECK((b1 - 0.5 * (b0 + b2)).lpNorm<Eigen::Infinity>() <= 1e-14);
}

TEST_CASE("segment load vector")
{
    const SegmentMeasure half = axis_segment(3, 1.0, 0.5);
    const Mesh aniso = anisotropic_segment_mesh(Ellipsoid{}, half, 0.4, 0.4, 0.8);
    CHECK(std::abs(assemble_rhs_segment(aniso, half).sum() - 1.0) <= 1e-12);

    const SegmentMeasure zero = axis_segment(3, 1.0, 0.0);
    CHECK(assemble_rhs_segment(aniso, zero).lpNorm<Eigen::Infinity>() == 0.0);

    // Oblique segment across an unstructured mesh: total mass c |Gamma|.
    const Mesh ball = mesh_3d();
    const SegmentMeasure obl = SegmentMeasure::constant(Point(-0.3, 0.1, -0.5), Point(0.2, -0.1, 0.6), 0.7);
    CHECK(std::abs(assemble_rhs_segment(ball, obl).sum() - 0.7 * obl.length()) <= 1e-12);

    const SegmentMeasure out = SegmentMeasure::constant(Point(0, 0, 0), Point(0, 0, 1.5), 1.0);
    CHECK(kind_of([&] { (void)assemble_rhs_segment(ball, out); }) == ErrorKind::ClippingFailure);

    const Mesh m2 = mesh_2d();
    const SegmentMeasure s2 = SegmentMeasure::constant(Point(-0.4, 0.1), Point(0.5, -0.2), 0.5);
    CHECK(std::abs(assemble_rhs(m2, s2).sum() - 0.5 * s2.length()) <= 1e-12);
}

TEST_CASE("segment along a shared edge is counted once")
{
    // The diagonal of the unit square is shared by both triangles.
    const Mesh sq = testing::unit_square();
    const SegmentMeasure diag = SegmentMeasure::constant(Point(0, 0), Point(1, 1), 1.0);
    const Vector b = assemble_rhs_segment(sq, diag);
    // Oracle: composite midpoint rule of the hat functions along the edge.
    const int n = 200000;
    const double len = std::sqrt(2.0);
    double hat = 0.0;
    for (int i = 0; i < n; ++i) hat += (1.0 - (i + 0.5) / n) * len / n;
    CHECK(b[0] == doctest::Approx(hat).epsilon(1e-10));
    CHECK(b[2] == doctest::Approx(hat).epsilon(1e-10));
    CHECK(b[0] == doctest::Approx(len / 2).epsilon(1e-14));
    CHECK(b[1] == 0.0);
    CHECK(b[3] == 0.0);
}

TEST_CASE("variable line density is integrated to the rule's order")
{
    // Density t^2 on a segment lying along a single edge of the square: the
    // integrand is cubic on one sub-interval, so order 3 is exact.
    const Mesh sq = testing::unit_square();
    const SegmentMeasure s = SegmentMeasure::variable(Point(0, 0), Point(1, 0), [](double t) { return t * t; });
    const Vector b = assemble_rhs_segment(sq, s, 3);
    CHECK(b[0] == doctest::Approx(1.0 / 12.0).epsilon(1e-14));  // integral (1-t) t^2
    CHECK(b[1] == doctest::Approx(0.25).epsilon(1e-14));        // integral t^3
}

TEST_CASE("Dirichlet elimination")
{
    const Mesh m = mesh_2d();
    const SparseMatrix a = assemble_stiffness(m);
    const Vector b = assemble_rhs_point(m, Point(0.0, 0.0));
    const SparseSystem sys = apply_dirichlet(a, b, m);
    std::size_t interior = 0;
    for (std::size_t i = 0; i < m.num_vertices(); ++i) interior += m.is_boundary(static_cast<Index>(i)) ? 0 : 1;
    CHECK(sys.size() == interior);
    CHECK(asymmetry(sys.matrix) <= 1e-12);
    const SolveResult r = solve_spd(sys);
    const Vector u = sys.expand(r.u);
    Index center = -1;
    for (std::size_t i = 0; i < m.num_vertices(); ++i)
        if (norm(m.vertices()[i]) == 0.0) center = static_cast<Index>(i);
    REQUIRE(center >= 0);
    CHECK(u[center] > 0.0);
    CHECK(u[center] == doctest::Approx(u.maxCoeff()));
    for (std::size_t i = 0; i < m.num_vertices(); ++i)
        if (m.is_boundary(static_cast<Index>(i))) CHECK(u[static_cast<Eigen::Index>(i)] == 0.0);

    const Mesh single(2, {Point(0, 0), Point(1, 0), Point(0, 1)}, {Element{0, 1, 2, -1}}, {1, 1, 1});
    CHECK(kind_of([&] {
              (void)apply_dirichlet(assemble_stiffness(single), Vector::Zero(3), single);
          }) == ErrorKind::EmptySystem);
}

TEST_CASE("Matrix Market export")
{
    const Mesh m = mesh_2d();
    const SparseSystem sys = apply_dirichlet(assemble_stiffness(m), assemble_rhs_point(m, Point(0.1, 0.1)), m);
    const auto dir = std::filesystem::temp_directory_path() / "gradfem_mm_test";
    std::filesystem::create_directories(dir);
    const std::string path = (dir / "a.mtx").string();
    write_matrix_market(path, sys);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "%%MatrixMarket matrix coordinate real general");
    std::size_t rows = 0, cols = 0, nnz = 0;
    in >> rows >> cols >> nnz;
    CHECK(rows == sys.size());
    CHECK(cols == sys.size());
    CHECK(nnz == static_cast<std::size_t>(sys.matrix.nonZeros()));
    CHECK(std::filesystem::exists(path + ".rhs"));
    std::filesystem::remove_all(dir);
}
