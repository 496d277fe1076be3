#include "doctest.h"

#include "echoloc/errors.hpp"
#include "echoloc/scene_builders.hpp"
#include "echoloc/wedge.hpp"

#include <cmath>
#include <random>

using namespace echoloc;

namespace {

Vec3 random_unit(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Vec3 v{g(rng), g(rng), g(rng)};
    while (v.norm() < 1e-6) v = {g(rng), g(rng), g(rng)};
    return v.normalized();
}

// dense scan over both parameters; crude but independent of the closed form
double scanned_gap(const Vec3& origin, const Vec3& dir, const Vec3& a, const Vec3& b,
                   double t_max) {
    double best = 1e300;
    const int n = 1000;
    for (int i = 0; i <= n; ++i) {
        Vec3 p = origin + dir * (t_max * i / n);
        for (int j = 0; j <= n; ++j) {
            Vec3 q = a + (b - a) * (static_cast<double>(j) / n);
            best = std::min(best, distance(p, q));
        }
    }
    return best;
}

}  // namespace

TEST_CASE("cube wedges: twelve right angles with orthonormal frames") {
    TriangleMesh cube = make_box_mesh({0, 0, 0}, {1, 1, 1}, /*outward=*/true);
    std::vector<Wedge> wedges = extract_wedges(cube);
    REQUIRE(wedges.size() == 12);
    Vec3 center{0.5, 0.5, 0.5};
    for (const Wedge& w : wedges) {
        CHECK(w.theta_w == doctest::Approx(kPi / 2).epsilon(1e-12));
        CHECK(w.length == doctest::Approx(1.0));
        CHECK(std::fabs(w.ex.norm() - 1.0) < 1e-12);
        CHECK(std::fabs(w.ey.norm() - 1.0) < 1e-12);
        CHECK(std::fabs(w.ez.norm() - 1.0) < 1e-12);
        CHECK(std::fabs(dot(w.ex, w.ez)) < 1e-12);
        CHECK(std::fabs(dot(w.ey, w.ez)) < 1e-12);
        CHECK(distance(w.ez.cross(w.ex), w.ey) < 1e-12);
        CHECK(distance(w.ez, (w.b - w.a) / w.length) < 1e-12);
        // the bisector points into the material
        Vec3 mid = (w.a + w.b) * 0.5;
        CHECK(dot(w.ex, center - mid) > 0.0);
        // faces sit at azimuth +/- theta_w/2: those in-plane directions are
        // perpendicular to the face normals and point along the faces
        Vec3 face_a = w.ex * std::cos(w.theta_w / 2) + w.ey * std::sin(w.theta_w / 2);
        Vec3 face_b = w.ex * std::cos(w.theta_w / 2) - w.ey * std::sin(w.theta_w / 2);
        CHECK(std::fabs(dot(face_a, cube.normals[w.tri_a])) < 1e-12);
        CHECK(std::fabs(dot(face_b, cube.normals[w.tri_b])) < 1e-12);
    }
}

TEST_CASE("room shell corners are concave and do not diffract") {
    TriangleMesh shell = make_shoebox_mesh({4, 4, 3});
    CHECK(extract_wedges(shell).empty());
}

TEST_CASE("near-flat edges fall outside the angle limit") {
    // a quad face split into two coplanar triangles has a 180 degree edge
    TriangleMesh cube = make_box_mesh({0, 0, 0}, {1, 1, 1}, /*outward=*/true);
    CHECK(extract_wedges(cube, deg_to_rad(179.9)).size() == 12);
    // widen the limit past pi and the diagonals still stay out: a flat edge
    // never counts as a wedge
    CHECK(extract_wedges(cube, deg_to_rad(180.0)).size() == 12);
}

TEST_CASE("three triangles sharing an edge is a validation error") {
    TriangleMesh mesh;
    mesh.vertices = {{0, 0, 0}, {1, 0, 0}, {0.5, 1, 0}, {0.5, 0, 1}, {0.5, -1, 0}};
    mesh.triangles = {{{0, 1, 2}}, {{0, 1, 3}}, {{0, 1, 4}}};
    finalize_mesh(mesh);
    CHECK_THROWS_AS(extract_wedges(mesh), ValidationError);
}

TEST_CASE("partition mesh exposes the free-end and top edges only") {
    TriangleMesh room = make_room_with_box();
    std::vector<Wedge> wedges = extract_wedges(room);
    CHECK(!wedges.empty());
    Aabb box = room_box_obstacle_bounds();
    for (const Wedge& w : wedges) {
        // every wedge lies on the obstacle; the shell contributes none
        for (const Vec3& p : {w.a, w.b}) {
            CHECK(p.x >= box.lo.x - 1e-9);
            CHECK(p.x <= box.hi.x + 1e-9);
            CHECK(p.y >= box.lo.y - 1e-9);
            CHECK(p.y <= box.hi.y + 1e-9);
            CHECK(p.z <= box.hi.z + 1e-9);
        }
        CHECK(w.theta_w == doctest::Approx(kPi / 2).epsilon(1e-9));
    }
}

TEST_CASE("closest approach matches a dense parameter scan") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int it = 0; it < 30; ++it) {
        Vec3 a{u(rng), u(rng), u(rng)};
        Vec3 b = a + random_unit(rng) * (0.5 + std::fabs(u(rng)));
        Vec3 origin{u(rng), u(rng), u(rng)};
        Vec3 dir = random_unit(rng);
        ClosestApproach ca = closest_approach(origin, dir, a, b);
        if (ca.degenerate) continue;
        double t_max = std::max(1.0, ca.ray_t * 2.0 + 1.0);
        double ref = scanned_gap(origin, dir, a, b, t_max);
        CHECK(ca.gap <= ref + 1e-9);    // the scan can only overshoot the true gap
        CHECK(ca.gap >= ref - 3e-2);    // by at most one grid cell
        CHECK(ca.ray_t >= 0.0);
        CHECK(ca.edge_t >= -1e-12);
        CHECK(ca.edge_t <= distance(a, b) + 1e-12);
        CHECK(distance(ca.on_ray, origin + dir * ca.ray_t) < 1e-9);
        CHECK(distance(ca.on_edge, a + (b - a).normalized() * ca.edge_t) < 1e-9);
        CHECK(distance(ca.on_ray, ca.on_edge) == doctest::Approx(ca.gap).epsilon(1e-9));
    }
}

TEST_CASE("closest approach clamps to segment ends and ray start") {
    Vec3 a{0, 0, 0}, b{1, 0, 0};
    // ray pointing away: nearest pair is the ray origin
    ClosestApproach back = closest_approach({0.5, 1, 0}, {0, 1, 0}, a, b);
    CHECK(back.ray_t == doctest::Approx(0.0));
    CHECK(back.gap == doctest::Approx(1.0));
    // passing beyond the far endpoint clamps the edge parameter
    ClosestApproach past = closest_approach({3, -1, 0}, {0, 1, 0}, a, b);
    CHECK(past.edge_t == doctest::Approx(1.0));
    CHECK(distance(past.on_edge, b) < 1e-12);
    CHECK(past.gap == doctest::Approx(2.0));
}

TEST_CASE("a ray parallel to the edge is flagged degenerate") {
    ClosestApproach ca = closest_approach({0, 1, 0}, {1, 0, 0}, {0, 0, 0}, {5, 0, 0});
    CHECK(ca.degenerate);
    CHECK(ca.gap == doctest::Approx(1.0));
}

TEST_CASE("wedge csv lists one row per wedge with a header") {
    TriangleMesh cube = make_box_mesh({0, 0, 0}, {1, 1, 1}, /*outward=*/true);
    std::string csv = wedges_to_csv(extract_wedges(cube));
    std::size_t rows = 0;
    for (char c : csv)
        if (c == '\n') ++rows;
    CHECK(rows == 13);
    CHECK(csv.find("theta_w_deg") != std::string::npos);
}
