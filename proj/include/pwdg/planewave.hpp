#ifndef PWDG_PLANEWAVE_HPP
#define PWDG_PLANEWAVE_HPP

#include <string>
#include <vector>

#include "pwdg/anisotropy.hpp"
#include "pwdg/types.hpp"

namespace pwdg
{
    struct DirectionSet
    {
        int m = 0;
        std::vector<Vec3> directions;

        std::size_t size() const { return directions.size(); }
    };

    enum class DirectionScheme
    {
        Fibonacci,
        FromFile
    };

    // p = (m + 1)^2 directions. For FromFile the file must hold exactly p
    // "x y z" lines of unit vectors (1e-8 tolerance, renormalized).
    DirectionSet generate_directions(int m, DirectionScheme scheme = DirectionScheme::Fibonacci,
                                     const std::string& path = {});

    DirectionSet fibonacci_directions(int m);
    DirectionSet read_directions(int m, const std::string& path);

    // Unit F with F.d = 0 built from the coordinate axis least aligned with d.
    Vec3 polarization(const Vec3& d);

    enum class Anchor
    {
        Global,   // exp(i k.x)
        Centroid  // exp(i k.(x - c_K)) on element K
    };

    // u_l(x) = exp(i omega d_l . S x)
    struct HelmholtzBasis
    {
        double omega = 0.0;
        Mat3 S = Mat3::Identity();
        Mat3 A = Mat3::Identity();  // coefficient, for A grad u
        DirectionSet dirs;

        std::size_t per_element() const { return dirs.size(); }

        Vec3 wave_vector(std::size_t l) const { return omega * (S.transpose() * dirs.directions[l]); }
        cplx eval(std::size_t l, const Vec3& x) const;
        CVec3 grad(std::size_t l, const Vec3& x) const;
    };

    HelmholtzBasis make_helmholtz_basis(double omega, const HelmholtzTransform& t, const Mat3& A,
                                        const DirectionSet& dirs);

    // E_l = G F_l exp(i kappa d_l . S x), E_{l+p} = G G_l exp(...)
    struct MaxwellBasis
    {
        double omega = 0.0;
        double kappa = 0.0;
        double eps_r = 1.0;
        double mu_r = 1.0;
        Mat3 S = Mat3::Identity();
        Mat3 G = Mat3::Identity();
        Mat3 A = Mat3::Identity();
        DirectionSet dirs;
        std::vector<Vec3> F;
        std::vector<Vec3> Gpol;

        std::size_t per_element() const { return 2 * dirs.size(); }

        Vec3 wave_vector(std::size_t l) const
        {
            return kappa * (S.transpose() * dirs.directions[l % dirs.size()]);
        }
        // constant vector multiplying the exponential
        Vec3 amplitude(std::size_t l) const;
        cplx phase(std::size_t l, const Vec3& x) const { return std::exp(I_UNIT * wave_vector(l).dot(x)); }
        CVec3 eval(std::size_t l, const Vec3& x) const;
        CVec3 curl(std::size_t l, const Vec3& x) const;
        // mu^{-1} curl E as a constant vector times the exponential
        CVec3 flux_amplitude(std::size_t l) const;
    };

    MaxwellBasis make_maxwell_basis(double omega, double eps_r, double mu_r, const MaxwellTransform& t,
                                    const Mat3& A, const DirectionSet& dirs);
}

#endif
