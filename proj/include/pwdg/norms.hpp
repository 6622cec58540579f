#ifndef PWDG_NORMS_HPP
#define PWDG_NORMS_HPP

#include <functional>

#include "pwdg/anisotropy.hpp"
#include "pwdg/assembly.hpp"
#include "pwdg/mesh.hpp"

namespace pwdg
{
    struct NormSquares
    {
        double skeleton = 0.0;   // |||w|||^2
        double augmented = 0.0;  // |||w|||_+^2 (includes the skeleton part)
    };

    // Mesh-skeleton norms of a discrete function, by exact face integrals.
    // Passing the hat mesh with a hat space gives the transformed-domain norms.
    NormSquares skeleton_norms(const TetMesh& mesh, const TrefftzSpace& space, const FluxParams& flux,
                               const Eigen::VectorXcd& coeffs);

    inline double skeleton_norm(const TetMesh& mesh, const TrefftzSpace& space, const FluxParams& flux,
                                const Eigen::VectorXcd& coeffs)
    {
        return std::sqrt(skeleton_norms(mesh, space, flux, coeffs).skeleton);
    }

    inline double augmented_norm(const TetMesh& mesh, const TrefftzSpace& space, const FluxParams& flux,
                                 const Eigen::VectorXcd& coeffs)
    {
        return std::sqrt(skeleton_norms(mesh, space, flux, coeffs).augmented);
    }

    // Same norms for a general piecewise field given by per-element traces,
    // computed with face quadrature (`phase_range` per unit length sets the
    // number of points).
    using ElementTrace = std::function<Trace(std::size_t elem, const Vec3& x)>;
    NormSquares skeleton_norms_quadrature(const TetMesh& mesh, Equation eq, double omega, const FluxParams& flux,
                                          const ElementTrace& field, double wave_number);

    struct SkeletonError
    {
        double error = 0.0;      // |||u - u_h|||
        double reference = 0.0;  // |||u|||
        double relative() const { return reference > 0.0 ? error / reference : error; }
    };

    SkeletonError skeleton_error(const TetMesh& mesh, const TrefftzSpace& space, const FluxParams& flux,
                                 const Eigen::VectorXcd& coeffs, const TraceFunction& exact);

    // ||u - u_h|| / ||u|| over the physical mesh. Tets whose hat diameter times
    // `wave_number` exceeds 4 are refined uniformly before integration.
    double l2_relative_error(const MeshPair& pair, const TrefftzSpace& space, const Eigen::VectorXcd& coeffs,
                             const TraceFunction& exact, double wave_number, int quad_order = 11);

    struct StabilityReport
    {
        double forward_ratio = 0.0;      // |||w||| / |||w_hat|||
        double forward_aug_ratio = 0.0;
        double reverse_ratio = 0.0;      // |||w_hat||| / |||w|||
        double reverse_aug_ratio = 0.0;
        double forward_bound = 0.0;
        double reverse_bound = 0.0;

        bool holds(double slack = 1e-10) const
        {
            return forward_ratio <= forward_bound * (1.0 + slack) && forward_aug_ratio <= forward_bound * (1.0 + slack)
                && reverse_ratio <= reverse_bound * (1.0 + slack) && reverse_aug_ratio <= reverse_bound * (1.0 + slack);
        }
    };

    // Closed-form transformation-stability constants.
    double helmholtz_forward_bound(const SpectralFactorization& f);
    double helmholtz_reverse_bound(const SpectralFactorization& f);
    double maxwell_forward_bound(const SpectralFactorization& f);
    double maxwell_reverse_bound(const SpectralFactorization& f);

    StabilityReport stability_report(const MeshPair& pair, const TrefftzSpace& phys_space,
                                     const TrefftzSpace& hat_space, const FluxParams& flux,
                                     const SpectralFactorization& f, const Eigen::VectorXcd& coeffs);
}

#endif
