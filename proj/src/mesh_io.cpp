#include "gradfem/error.hpp"
#include "gradfem/mesh.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace gradfem {

namespace {

std::string fmt17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void write_mesh(std::ostream& out, const Mesh& mesh)
{
    const int dim = mesh.dim();
    out << dim << ' ' << mesh.num_vertices() << ' ' << mesh.num_elements() << '\n';
    for (std::size_t i = 0; i < mesh.num_vertices(); ++i) {
        const Point& p = mesh.vertex(static_cast<Index>(i));
        for (int d = 0; d < dim; ++d) out << fmt17(p[d]) << ' ';
        out << (mesh.is_boundary(static_cast<Index>(i)) ? 1 : 0) << '\n';
    }
    for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
        const auto el = mesh.element_span(e);
        for (std::size_t i = 0; i < el.size(); ++i) out << (i ? " " : "") << el[i];
        out << '\n';
    }
}

Mesh read_mesh(std::istream& in)
{
    int dim = 0;
    long nv = -1;
    long ne = -1;
    GRADFEM_CHECK(static_cast<bool>(in >> dim >> nv >> ne), InvalidRecord, "malformed mesh header");
    GRADFEM_CHECK((dim == 2 || dim == 3) && nv >= 0 && ne >= 0, InvalidRecord, "invalid mesh header");
    std::vector<Point> verts(static_cast<std::size_t>(nv));
    std::vector<std::uint8_t> flags(static_cast<std::size_t>(nv));
    for (long i = 0; i < nv; ++i) {
        double c[3] = {0.0, 0.0, 0.0};
        int flag = 0;
        for (int d = 0; d < dim; ++d)
            GRADFEM_CHECK(static_cast<bool>(in >> c[d]), InvalidRecord,
                          "malformed vertex record " + std::to_string(i));
        GRADFEM_CHECK(static_cast<bool>(in >> flag) && (flag == 0 || flag == 1), InvalidRecord,
                      "malformed boundary flag on vertex " + std::to_string(i));
        verts[static_cast<std::size_t>(i)] = dim == 2 ? Point(c[0], c[1]) : Point(c[0], c[1], c[2]);
        flags[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(flag);
    }
    std::vector<Element> elems(static_cast<std::size_t>(ne), Element{-1, -1, -1, -1});
    for (long e = 0; e < ne; ++e)
        for (int k = 0; k <= dim; ++k) {
            long v = -1;
            GRADFEM_CHECK(static_cast<bool>(in >> v), InvalidRecord,
                          "malformed element record " + std::to_string(e));
            GRADFEM_CHECK(v >= 0 && v < nv, InvalidRecord,
                          "element " + std::to_string(e) + " references missing vertex");
            elems[static_cast<std::size_t>(e)][static_cast<std::size_t>(k)] = static_cast<Index>(v);
        }
    return Mesh(dim, std::move(verts), std::move(elems), std::move(flags));
}

void write_mesh_file(const std::string& path, const Mesh& mesh)
{
    std::ofstream out(path);
    GRADFEM_CHECK(out.good(), Io, "cannot open '" + path + "' for writing");
    write_mesh(out, mesh);
    GRADFEM_CHECK(out.good(), Io, "write to '" + path + "' failed");
}

Mesh read_mesh_file(const std::string& path)
{
    std::ifstream in(path);
    GRADFEM_CHECK(in.good(), Io, "cannot open '" + path + "'");
    return read_mesh(in);
}

void write_vtk(std::ostream& out, const Mesh& mesh, std::span<const PointField> fields)
{
    const int dim = mesh.dim();
    const std::size_t nv = mesh.num_vertices();
    const std::size_t ne = mesh.num_elements();
    out << "# vtk DataFile Version 3.0\ngradfem mesh\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << nv << " double\n";
    for (std::size_t i = 0; i < nv; ++i) {
        const Point& p = mesh.vertex(static_cast<Index>(i));
        out << fmt17(p[0]) << ' ' << fmt17(p[1]) << ' ' << fmt17(dim == 3 ? p[2] : 0.0) << '\n';
    }
    out << "CELLS " << ne << ' ' << ne * static_cast<std::size_t>(dim + 2) << '\n';
    for (std::size_t e = 0; e < ne; ++e) {
        out << dim + 1;
        for (Index v : mesh.element_span(e)) out << ' ' << v;
        out << '\n';
    }
    out << "CELL_TYPES " << ne << '\n';
    for (std::size_t e = 0; e < ne; ++e) out << (dim == 2 ? 5 : 10) << '\n';
    if (fields.empty()) return;
    out << "POINT_DATA " << nv << '\n';
    for (const auto& f : fields) {
        GRADFEM_CHECK(f.values.size() == nv, InvalidArgument, "field '" + f.name + "' has wrong length");
        out << "SCALARS " << f.name << " double 1\nLOOKUP_TABLE default\n";
        for (double v : f.values) out << fmt17(v) << '\n';
    }
}

void write_vtk_file(const std::string& path, const Mesh& mesh, std::span<const PointField> fields)
{
    std::ofstream out(path);
    GRADFEM_CHECK(out.good(), Io, "cannot open '" + path + "' for writing");
    write_vtk(out, mesh, fields);
    GRADFEM_CHECK(out.good(), Io, "write to '" + path + "' failed");
}

}  // namespace gradfem
