#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "pwdg/assembly.hpp"
#include "pwdg/manufactured.hpp"
#include "pwdg/norms.hpp"
#include "pwdg/solver.hpp"
#include "support.hpp"

using namespace pwdg;
using namespace pwdg::testing;

namespace
{
    // Imaginary part of A_h(w, w) with the sign that makes it the skeleton norm:
    // the Helmholtz matrix is assembled with +Im, the Maxwell one with -Im.
    double coercive_part(const Setup& s, const GlobalSystem& sys, const Eigen::VectorXcd& c)
    {
        const cplx q = c.dot(sys.matrix * c);
        return s.space.equation == Equation::Helmholtz ? q.imag() : -q.imag();
    }

    GlobalSystem assemble_plain(const Setup& s, const BoundaryData& g = {})
    {
        return assemble(s.pair.phys, s.space, FluxParams{}, g);
    }
}

TEST_CASE("single tetrahedron, one plane wave, hand computation")
{
    // u = exp(i w x), A = I: on each face A grad u.n = i w n_x u, |u| = 1, so
    // A_h(u, u) = i w sum_F |F| (delta n_x^2 + 1 - delta) after sum_F |F| n_x = 0.
    TetMesh mesh;
    mesh.vertices = {Vec3(0.1, 0, 0), Vec3(1, 0.2, 0), Vec3(0, 1, 0.1), Vec3(0.2, 0.3, 0.9)};
    mesh.tets = {{0, 1, 2, 3}};
    mesh.finalize();

    DirectionSet dirs;
    dirs.m = 0;
    dirs.directions = {Vec3(1, 0, 0)};
    const double omega = 3.0;
    const HelmholtzBasis b = make_helmholtz_basis(omega, HelmholtzTransform{Mat3::Identity(), Mat3::Identity()},
                                                  Mat3::Identity(), dirs);
    const TrefftzSpace space = helmholtz_space(b, mesh);

    for (double delta : {0.5, 0.25})
    {
        FluxParams fp;
        fp.delta = delta;
        const GlobalSystem sys = assemble(mesh, space, fp, {});
        REQUIRE(sys.matrix.rows() == 1);

        double sum = 0.0;
        for (const Face& f : mesh.faces)
            sum += f.area * (delta * f.normal[0] * f.normal[0] + 1.0 - delta);
        const cplx expected = I_UNIT * omega * sum;
        CHECK(std::abs(sys.matrix.coeff(0, 0) - expected) < 1e-13 * std::abs(expected));
    }
}

TEST_CASE("coercivity identity")
{
    std::mt19937 gen(21);
    for (const Setup& s : {helmholtz_setup(4.0, 2, 2), maxwell_setup(4.0, 2, 2)})
    {
        const GlobalSystem sys = assemble_plain(s);
        for (int trial = 0; trial < 20; ++trial)
        {
            const Eigen::VectorXcd c = random_coefficients(sys.matrix.rows(), gen);
            const double norm2 = skeleton_norms(s.pair.phys, s.space, FluxParams{}, c).skeleton;
            CHECK(norm2 > 0.0);
            CHECK(std::abs(coercive_part(s, sys, c) - norm2) <= 1e-9 * norm2);
        }
    }
}

TEST_CASE("Maxwell continuity bound")
{
    std::mt19937 gen(4);
    const Setup s = maxwell_setup(4.0, 2, 2);
    const GlobalSystem sys = assemble_plain(s);
    for (int trial = 0; trial < 50; ++trial)
    {
        const Eigen::VectorXcd w = random_coefficients(sys.matrix.rows(), gen);
        const Eigen::VectorXcd xi = random_coefficients(sys.matrix.rows(), gen);
        const cplx a = xi.dot(sys.matrix * w);  // A_h(w, xi)
        const double bound = 2.0 * augmented_norm(s.pair.phys, s.space, FluxParams{}, w)
            * skeleton_norm(s.pair.phys, s.space, FluxParams{}, xi);
        CHECK(std::abs(a) <= bound);
    }
}

TEST_CASE("Trefftz exactness for in-space plane waves")
{
    for (const Setup& s : {helmholtz_setup(4.0, 2, 2), maxwell_setup(4.0, 2, 2)})
    {
        for (std::size_t index : {std::size_t{0}, std::size_t{5}})
        {
            const TraceFunction exact = plane_wave_solution(s.space, index);
            const GlobalSystem sys =
                assemble_plain(s, boundary_data(s.space.equation, s.omega, 1.0, exact));
            const Solution sol = solve(sys);
            CHECK(sol.residual_norm < 1e-8);
            CHECK(l2_relative_error(s.pair, s.space, sol.coefficients, exact, s.wave_number) <= 1e-8);
        }
    }
}

TEST_CASE("zero boundary data gives a zero load")
{
    for (const Setup& s : {helmholtz_setup(4.0, 2, 2), maxwell_setup(4.0, 2, 2)})
    {
        const BoundaryData zero = [](const Vec3&, const Vec3&) { return CVec3::Zero().eval(); };
        const GlobalSystem sys = assemble_plain(s, zero);
        CHECK(sys.rhs.norm() == 0.0);
        CHECK(assemble_plain(s).rhs.norm() == 0.0);
    }
}

TEST_CASE("block sparsity follows face adjacency")
{
    const Setup s = helmholtz_setup(4.0, 2, 1);
    const GlobalSystem sys = assemble_plain(s);
    const auto nb = static_cast<int>(s.space.per_element());

    std::set<std::pair<int, int>> adjacent;
    for (const Face& f : s.pair.phys.faces)
        if (!f.boundary())
        {
            adjacent.insert({f.left, f.right});
            adjacent.insert({f.right, f.left});
        }
    std::set<std::pair<int, int>> blocks;
    for (int col = 0; col < sys.matrix.outerSize(); ++col)
        for (Eigen::SparseMatrix<cplx>::InnerIterator it(sys.matrix, col); it; ++it)
            if (it.value() != cplx(0.0))
                blocks.insert({static_cast<int>(it.row()) / nb, col / nb});

    std::set<std::pair<int, int>> expected = adjacent;
    for (std::size_t k = 0; k < s.pair.phys.num_elements(); ++k)
        expected.insert({static_cast<int>(k), static_cast<int>(k)});
    CHECK(blocks == expected);
}

TEST_CASE("element relabelling leaves the form unchanged")
{
    for (const Setup& s : {helmholtz_setup(4.0, 2, 1), maxwell_setup(4.0, 2, 1)})
    {
        const GlobalSystem sys = assemble_plain(s);

        // reverse the element order, which swaps left and right on every interior face
        TetMesh reversed = s.pair.phys;
        std::reverse(reversed.tets.begin(), reversed.tets.end());
        reversed.finalize();
        const GlobalSystem rev = assemble(reversed, s.space, FluxParams{}, {});

        const auto ne = static_cast<Eigen::Index>(s.pair.phys.num_elements());
        const auto nb = static_cast<Eigen::Index>(s.space.per_element());
        Eigen::VectorXi perm(ne * nb);
        for (Eigen::Index k = 0; k < ne; ++k)
            for (Eigen::Index a = 0; a < nb; ++a)
                perm[k * nb + a] = static_cast<int>((ne - 1 - k) * nb + a);
        const Eigen::PermutationMatrix<Eigen::Dynamic> p(perm);
        const Eigen::SparseMatrix<cplx> back = p.transpose() * rev.matrix * p;

        const Eigen::MatrixXcd d = Eigen::MatrixXcd(back) - Eigen::MatrixXcd(sys.matrix);
        CHECK(d.norm() <= 1e-12 * Eigen::MatrixXcd(sys.matrix).norm());
    }
}

TEST_CASE("sesquilinearity and determinism")
{
    std::mt19937 gen(8);
    const Setup s = helmholtz_setup(4.0, 2, 2);
    const GlobalSystem sys = assemble_plain(s);
    const Eigen::VectorXcd u = random_coefficients(sys.matrix.rows(), gen);
    const Eigen::VectorXcd v = random_coefficients(sys.matrix.rows(), gen);
    const cplx a = v.dot(sys.matrix * u);
    const cplx z(0.3, -1.7);
    CHECK(std::abs(v.dot(sys.matrix * (2.0 * u)) - 2.0 * a) <= 1e-12 * std::abs(a));
    CHECK(std::abs((z * v).dot(sys.matrix * u) - std::conj(z) * a) <= 1e-12 * std::abs(a));

    const GlobalSystem again = assemble_plain(s);
    CHECK(Eigen::MatrixXcd(again.matrix - sys.matrix).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("flux parameter validation")
{
    FluxParams fp;
    CHECK_NOTHROW(fp.validate());
    fp.delta = 0.6;
    CHECK_THROWS_AS(fp.validate(), Error);
    fp = FluxParams{};
    fp.alpha = 0.0;
    CHECK_THROWS_AS(fp.validate(), Error);
    fp = FluxParams{};
    fp.theta = 0.0;
    CHECK_THROWS_AS(fp.validate(), Error);
}

TEST_CASE("centroid anchoring spans the same space")
{
    const Setup s = helmholtz_setup(4.0, 2, 2);
    const HelmholtzBasis b = make_helmholtz_basis(s.omega, helmholtz_transform(s.f), s.tensor.entries(),
                                                  generate_directions(2));
    const TrefftzSpace anchored = helmholtz_space(b, s.pair.phys, Anchor::Centroid);
    const TraceFunction exact = plane_wave_solution(s.space, 3);
    const BoundaryData g = boundary_data(Equation::Helmholtz, s.omega, 1.0, exact);
    const Solution sol = solve(assemble(s.pair.phys, anchored, FluxParams{}, g));
    CHECK(l2_relative_error(s.pair, anchored, sol.coefficients, exact, s.omega) <= 1e-8);
}

TEST_CASE("triplet export")
{
    Eigen::SparseMatrix<cplx> m(2, 2);
    m.insert(1, 0) = cplx(1.5, -2.0);
    std::ostringstream out;
    export_triplets(out, m);
    std::istringstream in(out.str());
    int r = -1, c = -1;
    double re = 0.0, im = 0.0;
    in >> r >> c >> re >> im;
    CHECK(r == 1);
    CHECK(c == 0);
    CHECK(re == 1.5);
    CHECK(im == -2.0);
}
