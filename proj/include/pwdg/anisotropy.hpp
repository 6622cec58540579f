#ifndef PWDG_ANISOTROPY_HPP
#define PWDG_ANISOTROPY_HPP

#include <array>
#include <string>

#include "pwdg/types.hpp"

namespace pwdg
{
    // Constant symmetric positive definite material tensor. The stored matrix is
    // exactly symmetric; construction rejects inputs whose asymmetry exceeds
    // 1e-12 relative to the largest entry.
    class AnisotropicTensor
    {
    public:
        explicit AnisotropicTensor(const Mat3& entries);

        // a11 a12 a13 a22 a23 a33
        static AnisotropicTensor from_upper(const std::array<double, 6>& upper);

        // A = P^T diag(1, 1/rho, 1/rho) P with the rotation used for the
        // Helmholtz experiments (a = b = 1/sqrt 2).
        static AnisotropicTensor rotated_helmholtz(double rho);

        // A = P^T diag(1, rho, rho) P, same rotation, for the Maxwell experiments.
        static AnisotropicTensor rotated_maxwell(double rho);

        const Mat3& entries() const { return a_; }

    private:
        Mat3 a_;
    };

    // Accepts "a11 a12 a13 a22 a23 a33" or the presets "paper41(rho)" and
    // "paper42(rho)". Throws Error(ConfigError) on anything else.
    AnisotropicTensor parse_tensor(const std::string& text);

    // A = P^T diag(lambda) P with rows of P the eigenvectors, lambda ascending and
    // det(P) = +1.
    struct SpectralFactorization
    {
        Mat3 P;
        Vec3 lambda;  // (min, mid, max)

        double lambda_min() const { return lambda[0]; }
        double lambda_mid() const { return lambda[1]; }
        double lambda_max() const { return lambda[2]; }

        // condition number lambda_max / lambda_min
        double rho() const { return lambda[2] / lambda[0]; }

        Mat3 reconstruct() const;
    };

    SpectralFactorization factorize(const AnisotropicTensor& a);

    // x_hat = Lambda^{-1/2} P x
    struct HelmholtzTransform
    {
        Mat3 S;
        Mat3 S_inv;

        Vec3 apply(const Vec3& x) const { return S * x; }
        Vec3 apply_inverse(const Vec3& xh) const { return S_inv * xh; }
    };

    HelmholtzTransform helmholtz_transform(const SpectralFactorization& f);

    // x_hat = M P x with M = diag(m_max, m_mid, m_min) the pairwise geometric
    // means of the eigenvalues; fields are scaled by G = P^T Lambda^{-1/2}.
    struct MaxwellTransform
    {
        Vec3 m;  // (m_max, m_mid, m_min)
        Mat3 M;
        Mat3 S;
        Mat3 S_inv;
        Mat3 G;
        Mat3 G_inv;

        Vec3 apply(const Vec3& x) const { return S * x; }
        Vec3 apply_inverse(const Vec3& xh) const { return S_inv * xh; }
    };

    MaxwellTransform maxwell_transform(const SpectralFactorization& f);

    // 2-norm condition number of a general 3x3 matrix (via its singular values).
    double cond2(const Mat3& m);

    // Spectral norm of a general 3x3 matrix.
    double norm2(const Mat3& m);
}

#endif
