#include <doctest.h>

#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "pwdg/anisotropy.hpp"
#include "pwdg/mesh.hpp"

using namespace pwdg;

namespace
{
    int count_boundary(const TetMesh& m)
    {
        int c = 0;
        for (const Face& f : m.faces)
            c += f.boundary() ? 1 : 0;
        return c;
    }

    double total_volume(const TetMesh& m)
    {
        double v = 0.0;
        for (std::size_t k = 0; k < m.num_elements(); ++k)
            v += m.volume(k);
        return v;
    }

    // Independent face census: every sorted vertex triple of every tet.
    std::map<std::array<int, 3>, int> face_census(const TetMesh& m)
    {
        std::map<std::array<int, 3>, int> count;
        for (const auto& t : m.tets)
            for (int skip = 0; skip < 4; ++skip)
            {
                std::array<int, 3> tri;
                int c = 0;
                for (int i = 0; i < 4; ++i)
                    if (i != skip)
                        tri[c++] = t[i];
                std::sort(tri.begin(), tri.end());
                ++count[tri];
            }
        return count;
    }

    void check_mesh_invariants(const TetMesh& m)
    {
        double hmax = 0.0;
        for (std::size_t k = 0; k < m.num_elements(); ++k)
        {
            CHECK(m.volume(k) > 0.0);
            hmax = std::max(hmax, m.element_diameter[k]);
        }
        CHECK(m.h == doctest::Approx(hmax).epsilon(1e-15));

        const auto census = face_census(m);
        CHECK(census.size() == m.faces.size());
        for (const Face& f : m.faces)
        {
            std::array<int, 3> key = f.v;
            std::sort(key.begin(), key.end());
            const auto it = census.find(key);
            REQUIRE(it != census.end());
            CHECK(it->second == (f.boundary() ? 1 : 2));

            const auto v = m.face_vertices(f);
            CHECK(std::abs(f.normal.norm() - 1.0) < 1e-13);
            CHECK(std::abs(f.normal.dot(v[1] - v[0])) < 1e-13 * (1.0 + (v[1] - v[0]).norm()));
            CHECK(std::abs(f.normal.dot(v[2] - v[0])) < 1e-13 * (1.0 + (v[2] - v[0]).norm()));
            CHECK(f.area > 0.0);
            CHECK(f.area == doctest::Approx(0.5 * (v[1] - v[0]).cross(v[2] - v[0]).norm()));

            const Vec3 c = (v[0] + v[1] + v[2]) / 3.0;
            CHECK(f.normal.dot(c - m.centroid(f.left)) > 0.0);
            if (!f.boundary())
            {
                CHECK(f.left < f.right);
                CHECK(f.normal.dot(c - m.centroid(f.right)) < 0.0);
            }
        }
    }
}

TEST_CASE("unit cube Kuhn meshes")
{
    const TetMesh m1 = generate_unit_cube_tets(1);
    CHECK(m1.num_elements() == 6);
    CHECK(m1.vertices.size() == 8);
    CHECK(m1.h == doctest::Approx(std::sqrt(3.0)));
    CHECK(count_boundary(m1) == 12);
    CHECK(m1.faces.size() - count_boundary(m1) == 6);
    check_mesh_invariants(m1);

    const TetMesh m2 = generate_unit_cube_tets(2);
    CHECK(count_boundary(m2) == 48);
    check_mesh_invariants(m2);

    const TetMesh m4 = generate_unit_cube_tets(4);
    CHECK(m4.num_elements() == 384);
    CHECK(m4.h == doctest::Approx(std::sqrt(3.0) / 4.0));
    CHECK(total_volume(m4) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("skeleton of a single tetrahedron and a non-manifold set")
{
    TetMesh t;
    t.vertices = {Vec3(0, 0, 0), Vec3(0, 1, 0), Vec3(1, 0, 0), Vec3(0, 0, 1)};
    t.tets = {{0, 1, 2, 3}};
    t.finalize();
    CHECK(t.faces.size() == 4);
    CHECK(count_boundary(t) == 4);
    CHECK(t.volume(0) > 0.0);  // orientation flipped by finalize
    check_mesh_invariants(t);

    TetMesh bad;
    bad.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1), Vec3(0, 0, -1), Vec3(1, 1, 1)};
    bad.tets = {{0, 1, 2, 3}, {0, 1, 2, 4}, {0, 1, 2, 5}};
    try
    {
        bad.finalize();
        FAIL("non-manifold mesh accepted");
    }
    catch (const Error& e)
    {
        CHECK(e.code() == ErrorCode::NonManifold);
    }
}

TEST_CASE("BCC lattice")
{
    const TetMesh m = generate_bcc_box(Vec3(0, 0, 0), Vec3(3, 2, 2), 3, 2, 2);
    check_mesh_invariants(m);
    // a unit lattice tet: edges of length 1 and sqrt(3)/2
    CHECK(m.h == doctest::Approx(1.0));
    double v = total_volume(m);
    // every tet has volume 1/12
    CHECK(v == doctest::Approx(m.num_elements() / 12.0));
    // covered region: the hull of the cell centres plus pyramids on interior cell faces
    CHECK(m.num_elements() == 4 * ((3 - 1) * 2 * 2 + 3 * (2 - 1) * 2 + 3 * 2 * (2 - 1)));
}

TEST_CASE("transformed mesh of a parallelepiped")
{
    const SpectralFactorization f = factorize(parse_tensor("paper41(4)"));
    const HelmholtzTransform t = helmholtz_transform(f);
    const TetMesh m = mesh_parallelepiped(t.S, 0.3);
    check_mesh_invariants(m);
    CHECK(total_volume(m) == doctest::Approx(std::abs(t.S.determinant())).epsilon(1e-10));
    // every vertex lies inside the image of the unit cube
    for (const Vec3& x : m.vertices)
    {
        const Vec3 y = t.S_inv * x;
        CHECK(y.minCoeff() > -1e-12);
        CHECK(y.maxCoeff() < 1.0 + 1e-12);
    }
}

TEST_CASE("mesh pairs")
{
    SUBCASE("identity transform")
    {
        const MeshPair p = build_mesh_pair(Mat3::Identity(), MeshMode::Physical, 0.5);
        CHECK(p.hat.vertices == p.phys.vertices);
        const GeometryReport r = geometry_diagnostics(p, 1.0);
        CHECK(r.max_area_ratio == doctest::Approx(1.0));
        CHECK(r.min_area_ratio == doctest::Approx(1.0));
        CHECK(r.scaled_ratio == doctest::Approx(1.0));
        CHECK(r.area_bound_holds);
    }

    SUBCASE("Helmholtz transform, both modes")
    {
        const SpectralFactorization f = factorize(parse_tensor("paper41(4)"));
        const HelmholtzTransform t = helmholtz_transform(f);
        const double bound = std::sqrt(f.lambda_mid() * f.lambda_max());
        for (MeshMode mode : {MeshMode::Transformed, MeshMode::Physical})
        {
            const MeshPair p = build_mesh_pair(t.S, mode, 0.4);
            REQUIRE(p.hat.num_elements() == p.phys.num_elements());
            CHECK(p.hat.tets == p.phys.tets);
            CHECK(p.hat.faces.size() == p.phys.faces.size());
            for (std::size_t i = 0; i < p.hat.vertices.size(); ++i)
                CHECK((t.S * p.phys.vertices[i] - p.hat.vertices[i]).cwiseAbs().maxCoeff() < 1e-13);
            CHECK(total_volume(p.phys)
                  == doctest::Approx(std::abs(t.S_inv.determinant()) * total_volume(p.hat)).epsilon(1e-10));
            CHECK(total_volume(p.phys) == doctest::Approx(1.0).epsilon(1e-10));
            check_mesh_invariants(p.phys);
            check_mesh_invariants(p.hat);

            const GeometryReport r = geometry_diagnostics(p, bound);
            CHECK(r.area_bound_holds);
            CHECK(r.max_area_ratio <= bound + 1e-12);
            CHECK(r.scaled_ratio > 0.0);
            CHECK(r.min_shape >= 1.0);
        }
    }

    SUBCASE("Maxwell transform")
    {
        const SpectralFactorization f = factorize(parse_tensor("paper42(4)"));
        const MaxwellTransform t = maxwell_transform(f);
        const MeshPair p = build_mesh_pair(t.S, MeshMode::Transformed, 0.8);
        // phys = S^{-1} hat, whose two largest singular values are 1/m_min, 1/m_mid
        const GeometryReport r = geometry_diagnostics(p, 1.0 / (t.m[1] * t.m[2]));
        CHECK(r.area_bound_holds);
    }
}

TEST_CASE("diagonal stretch in transformed mode")
{
    // S = diag(2,1,1): the hat domain is [0,2]x[0,1]^2
    const Mat3 s = Vec3(2.0, 1.0, 1.0).asDiagonal();
    const MeshPair p = build_mesh_pair(s, MeshMode::Transformed, 0.5);
    CHECK(total_volume(p.hat) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(total_volume(p.phys) == doctest::Approx(1.0).epsilon(1e-12));
    // Lambda = S^{-2} = diag(1/4, 1, 1): bound sqrt(lambda_mid lambda_max) = 1
    CHECK(geometry_diagnostics(p, 1.0).area_bound_holds);
}

TEST_CASE("mesh file round trip")
{
    const TetMesh m = generate_unit_cube_tets(2);
    std::stringstream io;
    write_mesh(io, m);
    const TetMesh back = read_mesh(io);
    CHECK(back.tets == m.tets);
    REQUIRE(back.vertices.size() == m.vertices.size());
    for (std::size_t i = 0; i < m.vertices.size(); ++i)
        CHECK((back.vertices[i] - m.vertices[i]).norm() < 1e-15);
    CHECK(back.faces.size() == m.faces.size());

    std::istringstream bad("PWDG-MESH 2\n0\n0\n");
    try
    {
        read_mesh(bad);
        FAIL("bad header accepted");
    }
    catch (const Error& e)
    {
        CHECK(e.code() == ErrorCode::MeshFormat);
    }

    CHECK(parse_mesh_mode("new") == MeshMode::Transformed);
    CHECK(parse_mesh_mode("old") == MeshMode::Physical);
    CHECK_THROWS_AS(parse_mesh_mode("sideways"), Error);
}
