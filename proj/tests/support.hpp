#ifndef PWDG_TESTS_SUPPORT_HPP
#define PWDG_TESTS_SUPPORT_HPP

#include <cmath>
#include <random>

#include "pwdg/anisotropy.hpp"
#include "pwdg/assembly.hpp"
#include "pwdg/mesh.hpp"
#include "pwdg/planewave.hpp"

namespace pwdg::testing
{
    // Everything needed to assemble on one mesh pair.
    struct Setup
    {
        AnisotropicTensor tensor{Mat3::Identity()};
        SpectralFactorization f;
        MeshPair pair;
        TrefftzSpace space;
        TrefftzSpace hat_space;
        double omega = 0.0;
        double wave_number = 0.0;
    };

    // Unit cube split into n^3 Kuhn cubes (old mode), or the image domain at
    // grid spacing 1/n (new mode).
    inline Setup helmholtz_setup(double rho, int n, int m, double omega = 4.0 * M_PI,
                                 MeshMode mode = MeshMode::Physical)
    {
        Setup s;
        s.tensor = AnisotropicTensor::rotated_helmholtz(rho);
        s.f = factorize(s.tensor);
        const HelmholtzTransform t = helmholtz_transform(s.f);
        s.pair = build_mesh_pair(t.S, mode, 1.0 / n);
        const HelmholtzBasis b = make_helmholtz_basis(omega, t, s.tensor.entries(), generate_directions(m));
        s.space = helmholtz_space(b, s.pair.phys);
        s.hat_space = helmholtz_hat_space(b, s.pair.hat);
        s.omega = omega;
        s.wave_number = omega;
        return s;
    }

    inline Setup maxwell_setup(double rho, int n, int m, double omega = 2.0 * M_PI,
                               MeshMode mode = MeshMode::Physical)
    {
        Setup s;
        s.tensor = AnisotropicTensor::rotated_maxwell(rho);
        s.f = factorize(s.tensor);
        const MaxwellTransform t = maxwell_transform(s.f);
        s.pair = build_mesh_pair(t.S, mode, 1.0 / n);
        const MaxwellBasis b = make_maxwell_basis(omega, 1.0, 1.0, t, s.tensor.entries(), generate_directions(m));
        s.space = maxwell_space(b, s.pair.phys);
        s.hat_space = maxwell_hat_space(b, s.pair.hat);
        s.omega = omega;
        s.wave_number = b.kappa;
        return s;
    }

    inline Eigen::VectorXcd random_coefficients(Eigen::Index size, std::mt19937& gen)
    {
        std::normal_distribution<double> n(0.0, 1.0);
        Eigen::VectorXcd c(size);
        for (Eigen::Index i = 0; i < size; ++i)
            c[i] = cplx(n(gen), n(gen));
        return c;
    }

    inline double relative_difference(cplx a, cplx b)
    {
        return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
    }
}

#endif
