#include "pwdg/anisotropy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <regex>
#include <sstream>

namespace pwdg
{
    namespace
    {
        Mat3 rotation_about_z()
        {
            const double a = 1.0 / std::sqrt(2.0);
            const double b = std::sqrt(1.0 - a * a);
            Mat3 p;
            p << a, -b, 0.0,
                 b,  a, 0.0,
                 0.0, 0.0, 1.0;
            return p;
        }

        // Cyclic Jacobi on a symmetric 3x3 matrix. On return a is (numerically)
        // diagonal and v holds the eigenvectors as columns.
        void jacobi_eigen(Mat3& a, Mat3& v)
        {
            v.setIdentity();
            const double scale = a.cwiseAbs().maxCoeff();
            const double tol = 1e-14 * scale;

            for (int sweep = 0; sweep < 20; ++sweep)
            {
                const double off = std::abs(a(0, 1)) + std::abs(a(0, 2)) + std::abs(a(1, 2));
                if (off <= tol)
                    break;

                for (int p = 0; p < 2; ++p)
                {
                    for (int q = p + 1; q < 3; ++q)
                    {
                        if (std::abs(a(p, q)) <= 1e-300)
                            continue;

                        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                        const double c = 1.0 / std::sqrt(t * t + 1.0);
                        const double s = t * c;

                        Mat3 r = Mat3::Identity();
                        r(p, p) = c;
                        r(q, q) = c;
                        r(p, q) = s;
                        r(q, p) = -s;

                        a = r.transpose() * a * r;
                        a(p, q) = 0.0;
                        a(q, p) = 0.0;
                        v = v * r;
                    }
                }
            }
        }
    }

    AnisotropicTensor::AnisotropicTensor(const Mat3& entries)
    {
        const double scale = std::max(entries.cwiseAbs().maxCoeff(), 1e-300);
        const double asym = (entries - entries.transpose()).cwiseAbs().maxCoeff();
        if (asym > 1e-12 * scale)
        {
            std::ostringstream msg;
            msg << "tensor asymmetry " << asym << " exceeds 1e-12 relative";
            throw Error(ErrorCode::NotSymmetric, msg.str());
        }
        a_ = 0.5 * (entries + entries.transpose());
    }

    AnisotropicTensor AnisotropicTensor::from_upper(const std::array<double, 6>& u)
    {
        Mat3 m;
        m << u[0], u[1], u[2],
             u[1], u[3], u[4],
             u[2], u[4], u[5];
        return AnisotropicTensor(m);
    }

    AnisotropicTensor AnisotropicTensor::rotated_helmholtz(double rho)
    {
        if (!(rho >= 1.0))
            throw Error(ErrorCode::ConfigError, "preset requires rho >= 1");
        const Mat3 p = rotation_about_z();
        const Vec3 lambda(1.0, 1.0 / rho, 1.0 / rho);
        return AnisotropicTensor(p.transpose() * lambda.asDiagonal() * p);
    }

    AnisotropicTensor AnisotropicTensor::rotated_maxwell(double rho)
    {
        if (!(rho >= 1.0))
            throw Error(ErrorCode::ConfigError, "preset requires rho >= 1");
        const Mat3 p = rotation_about_z();
        const Vec3 lambda(1.0, rho, rho);
        return AnisotropicTensor(p.transpose() * lambda.asDiagonal() * p);
    }

    AnisotropicTensor parse_tensor(const std::string& text)
    {
        static const std::regex preset(R"(\s*paper4([12])\(\s*([0-9eE.+\-]+)\s*\)\s*)");
        std::smatch match;
        if (std::regex_match(text, match, preset))
        {
            double rho = 0.0;
            try
            {
                rho = std::stod(match[2].str());
            }
            catch (const std::exception&)
            {
                throw Error(ErrorCode::ConfigError, "bad rho in preset '" + text + "'");
            }
            return match[1].str() == "1" ? AnisotropicTensor::rotated_helmholtz(rho)
                                         : AnisotropicTensor::rotated_maxwell(rho);
        }

        std::istringstream in(text);
        std::array<double, 6> u{};
        for (double& x : u)
        {
            if (!(in >> x))
                throw Error(ErrorCode::ConfigError, "expected 6 numbers or a preset, got '" + text + "'");
        }
        std::string rest;
        if (in >> rest)
            throw Error(ErrorCode::ConfigError, "trailing input in tensor '" + text + "'");
        return AnisotropicTensor::from_upper(u);
    }

    Mat3 SpectralFactorization::reconstruct() const
    {
        return P.transpose() * lambda.asDiagonal() * P;
    }

    SpectralFactorization factorize(const AnisotropicTensor& tensor)
    {
        Mat3 d = tensor.entries();
        Mat3 v;
        jacobi_eigen(d, v);

        std::array<int, 3> order{0, 1, 2};
        std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return d(i, i) < d(j, j); });

        SpectralFactorization f;
        for (int r = 0; r < 3; ++r)
        {
            Vec3 q = v.col(order[r]);
            q.normalize();

            // sign convention: largest-magnitude component positive (first on ties)
            int imax = 0;
            for (int c = 1; c < 3; ++c)
                if (std::abs(q[c]) > std::abs(q[imax]) + 1e-12)
                    imax = c;
            if (q[imax] < 0.0)
                q = -q;

            f.P.row(r) = q.transpose();
            f.lambda[r] = d(order[r], order[r]);
        }

        if (f.lambda[0] <= 1e-14 * std::abs(f.lambda[2]) || f.lambda[2] <= 0.0)
        {
            std::ostringstream msg;
            msg << "eigenvalues (" << f.lambda.transpose() << ") not all positive";
            throw Error(ErrorCode::NotPositiveDefinite, msg.str());
        }

        if (f.P.determinant() < 0.0)
            f.P.row(2) *= -1.0;

        return f;
    }

    HelmholtzTransform helmholtz_transform(const SpectralFactorization& f)
    {
        HelmholtzTransform t;
        const Vec3 inv_sqrt = f.lambda.cwiseSqrt().cwiseInverse();
        t.S = inv_sqrt.asDiagonal() * f.P;
        t.S_inv = f.P.transpose() * f.lambda.cwiseSqrt().asDiagonal();
        return t;
    }

    MaxwellTransform maxwell_transform(const SpectralFactorization& f)
    {
        MaxwellTransform t;
        const double lmin = f.lambda_min();
        const double lmid = f.lambda_mid();
        const double lmax = f.lambda_max();

        t.m = Vec3(std::sqrt(lmid * lmax), std::sqrt(lmax * lmin), std::sqrt(lmin * lmid));
        t.M = t.m.asDiagonal();
        t.S = t.M * f.P;
        t.S_inv = f.P.transpose() * t.m.cwiseInverse().asDiagonal();
        t.G = f.P.transpose() * f.lambda.cwiseSqrt().cwiseInverse().asDiagonal();
        t.G_inv = f.lambda.cwiseSqrt().asDiagonal() * f.P;
        return t;
    }

    double norm2(const Mat3& m)
    {
        Eigen::JacobiSVD<Mat3> svd(m);
        return svd.singularValues()[0];
    }

    double cond2(const Mat3& m)
    {
        Eigen::JacobiSVD<Mat3> svd(m);
        const Vec3 s = svd.singularValues();
        return s[0] / s[2];
    }
}
