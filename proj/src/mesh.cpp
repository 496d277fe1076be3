#include "echoloc/mesh.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "echoloc/errors.hpp"

namespace echoloc {

namespace {

constexpr double kMinTriangleArea = 1e-12;  // m^2; below this a triangle is degenerate

int resolve_obj_index(long idx, std::size_t vertex_count, const std::string& name, int line) {
    long resolved = idx;
    if (idx < 0) resolved = static_cast<long>(vertex_count) + idx;  // relative form: -1 is the last vertex
    else resolved = idx - 1;                                        // OBJ is 1-based
    if (resolved < 0 || resolved >= static_cast<long>(vertex_count)) {
        throw ParseError(name + ":" + std::to_string(line) + ": vertex index " +
                         std::to_string(idx) + " out of range (have " +
                         std::to_string(vertex_count) + " vertices)");
    }
    return static_cast<int>(resolved);
}

// "f" entries may be v, v/vt, v//vn or v/vt/vn; only the vertex id matters here.
long parse_face_vertex(const std::string& token, const std::string& name, int line) {
    std::size_t pos = 0;
    long idx = 0;
    try {
        idx = std::stol(token, &pos);
    } catch (const std::exception&) {
        throw ParseError(name + ":" + std::to_string(line) + ": bad face vertex '" + token + "'");
    }
    if (pos != token.size() && token[pos] != '/') {
        throw ParseError(name + ":" + std::to_string(line) + ": bad face vertex '" + token + "'");
    }
    return idx;
}

}  // namespace

Aabb TriangleMesh::bounds() const {
    Aabb box;
    if (vertices.empty()) return box;
    box.lo = box.hi = vertices[0];
    for (const Vec3& v : vertices) box.expand(v);
    return box;
}

std::map<EdgeKey, std::vector<int>> TriangleMesh::edge_adjacency() const {
    std::map<EdgeKey, std::vector<int>> adj;
    for (int t = 0; t < static_cast<int>(triangles.size()); ++t) {
        const auto& tri = triangles[t];
        for (int k = 0; k < 3; ++k) {
            adj[EdgeKey(tri.v[k], tri.v[(k + 1) % 3])].push_back(t);
        }
    }
    return adj;
}

void finalize_mesh(TriangleMesh& mesh) {
    const int nv = static_cast<int>(mesh.vertices.size());
    std::vector<int> degenerate;
    mesh.normals.clear();
    mesh.normals.reserve(mesh.triangles.size());

    for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
        const auto& tri = mesh.triangles[t];
        for (int k = 0; k < 3; ++k) {
            if (tri.v[k] < 0 || tri.v[k] >= nv) {
                throw ValidationError("triangle " + std::to_string(t) + " references vertex " +
                                      std::to_string(tri.v[k]) + " of " + std::to_string(nv));
            }
        }
        Vec3 a = mesh.vertices[tri.v[0]];
        Vec3 n = (mesh.vertices[tri.v[1]] - a).cross(mesh.vertices[tri.v[2]] - a);
        double doubled_area = n.norm();
        if (0.5 * doubled_area < kMinTriangleArea) {
            degenerate.push_back(t);
            mesh.normals.push_back(Vec3{0, 0, 0});
        } else {
            mesh.normals.push_back(n / doubled_area);
        }
    }

    if (!degenerate.empty()) {
        std::string ids;
        for (std::size_t i = 0; i < degenerate.size(); ++i) {
            if (i) ids += ", ";
            ids += std::to_string(degenerate[i]);
        }
        throw ValidationError("zero-area triangle(s): " + ids);
    }
}

TriangleMesh parse_obj(const std::string& text, const std::string& name) {
    TriangleMesh mesh;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;

    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string rec;
        if (!(ls >> rec) || rec[0] == '#') continue;

        if (rec == "v") {
            Vec3 v;
            if (!(ls >> v.x >> v.y >> v.z)) {
                throw ParseError(name + ":" + std::to_string(lineno) + ": malformed vertex record");
            }
            mesh.vertices.push_back(v);
        } else if (rec == "f") {
            std::vector<int> poly;
            std::string token;
            while (ls >> token) {
                long raw = parse_face_vertex(token, name, lineno);
                poly.push_back(resolve_obj_index(raw, mesh.vertices.size(), name, lineno));
            }
            if (poly.size() < 3) {
                throw ParseError(name + ":" + std::to_string(lineno) +
                                 ": face needs at least 3 vertices, got " + std::to_string(poly.size()));
            }
            // Fan triangulation keeps quads (and larger polygons) consistent
            // with their winding.
            for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
                mesh.triangles.push_back({{poly[0], poly[k], poly[k + 1]}});
            }
        }
        // v/vt/vn/o/g/s/usemtl/mtllib records carry no geometry we need
    }

    finalize_mesh(mesh);
    return mesh;
}

TriangleMesh load_obj(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("file not found: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_obj(buf.str(), path);
}

void save_obj(const TriangleMesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    char line[128];
    for (const Vec3& v : mesh.vertices) {
        std::snprintf(line, sizeof(line), "v %.17g %.17g %.17g\n", v.x, v.y, v.z);
        out << line;
    }
    for (const Triangle& t : mesh.triangles) {
        out << "f " << t.v[0] + 1 << ' ' << t.v[1] + 1 << ' ' << t.v[2] + 1 << '\n';
    }
}

}  // namespace echoloc
