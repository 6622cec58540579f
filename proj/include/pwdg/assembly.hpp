#ifndef PWDG_ASSEMBLY_HPP
#define PWDG_ASSEMBLY_HPP

#include <functional>
#include <iosfwd>
#include <vector>

#include <Eigen/Sparse>

#include "pwdg/mesh.hpp"
#include "pwdg/planewave.hpp"
#include "pwdg/quadrature.hpp"
#include "pwdg/types.hpp"

namespace pwdg
{
    struct FluxParams
    {
        double alpha = 0.5;
        double beta = 0.5;
        double delta = 0.5;
        double theta = 1.0;  // impedance, Maxwell only

        void validate() const;
    };

    // One local basis function: value(x) = value * exp(i k.x) and
    // flux(x) = flux * exp(i k.x), where flux is A grad u (Helmholtz) or
    // mu^{-1} curl E (Maxwell). Scalar values sit in component 0.
    struct LocalWave
    {
        Vec3 k;
        CVec3 value;
        CVec3 flux;
        int group = 0;  // functions sharing a wave vector share a group
    };

    // Per-element basis of a Trefftz space on a given mesh. All elements use
    // the same waves, up to a constant anchoring phase per element.
    struct TrefftzSpace
    {
        Equation equation = Equation::Helmholtz;
        double omega = 0.0;
        std::vector<LocalWave> waves;
        int num_groups = 0;
        Anchor anchor = Anchor::Global;
        std::vector<Vec3> anchors;  // element centroids when anchored

        std::size_t per_element() const { return waves.size(); }
        cplx element_phase(std::size_t elem, std::size_t a) const;
    };

    TrefftzSpace helmholtz_space(const HelmholtzBasis& basis, const TetMesh& mesh, Anchor anchor = Anchor::Global);
    TrefftzSpace maxwell_space(const MaxwellBasis& basis, const TetMesh& mesh, Anchor anchor = Anchor::Global);

    // Same coefficients seen on the hat mesh: S = G = A = I.
    TrefftzSpace helmholtz_hat_space(const HelmholtzBasis& basis, const TetMesh& hat, Anchor anchor = Anchor::Global);
    TrefftzSpace maxwell_hat_space(const MaxwellBasis& basis, const TetMesh& hat, Anchor anchor = Anchor::Global);

    // Value and flux of a field at a point (scalar value in component 0).
    struct Trace
    {
        CVec3 value = CVec3::Zero();
        CVec3 flux = CVec3::Zero();
    };

    using TraceFunction = std::function<Trace(const Vec3&)>;

    // Boundary data: g(x, n) scalar (Helmholtz, in component 0) or tangential vector.
    using BoundaryData = std::function<CVec3(const Vec3& x, const Vec3& n)>;

    struct GlobalSystem
    {
        Equation equation = Equation::Helmholtz;
        std::size_t per_element = 0;
        Eigen::SparseMatrix<cplx> matrix;  // row = test function, column = trial
        Eigen::VectorXcd rhs;

        std::size_t dimension() const { return static_cast<std::size_t>(rhs.size()); }
    };

    // Number of collapsed-Gauss points per direction for a face where the
    // integrand phase varies by about `phase_range` radians.
    int face_points_for(double phase_range);

    // Skeleton assembly of the sesquilinear form (matrix) and the boundary
    // load (rhs). `g` may be empty, giving a zero rhs.
    GlobalSystem assemble(const TetMesh& mesh, const TrefftzSpace& space, const FluxParams& flux,
                          const BoundaryData& g);

    GlobalSystem assemble_helmholtz(const MeshPair& pair, const HelmholtzBasis& basis, const FluxParams& flux,
                                    const BoundaryData& g, Anchor anchor = Anchor::Global);
    GlobalSystem assemble_maxwell(const MeshPair& pair, const MaxwellBasis& basis, const FluxParams& flux,
                                  const BoundaryData& g, Anchor anchor = Anchor::Global);

    // rhs only
    Eigen::VectorXcd assemble_load(const TetMesh& mesh, const TrefftzSpace& space, const FluxParams& flux,
                                   const BoundaryData& g);

    // Sparse triplets "row col re im", one per line.
    void export_triplets(std::ostream& out, const Eigen::SparseMatrix<cplx>& m);

    // Evaluate a discrete function on element `elem` at x.
    Trace evaluate(const TrefftzSpace& space, const Eigen::VectorXcd& coeffs, std::size_t elem, const Vec3& x);
}

#endif
