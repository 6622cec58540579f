#ifndef PWDG_TESTS_ORACLES_HPP
#define PWDG_TESTS_ORACLES_HPP

#include <array>
#include <cmath>
#include <vector>

#include "pwdg/quadrature.hpp"

namespace pwdg::testing
{
    // Gauss-Legendre on [0, 1] by Newton iteration on P_n; kept separate from
    // the library's rule so the oracle is independent.
    inline void oracle_gauss(int n, std::vector<double>& x, std::vector<double>& w)
    {
        x.assign(n, 0.0);
        w.assign(n, 0.0);
        for (int i = 0; i < n; ++i)
        {
            double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it)
            {
                double p0 = 1.0;
                double p1 = t;
                for (int k = 2; k <= n; ++k)
                {
                    const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (t * p1 - p0) / (t * t - 1.0);
                const double dt = p1 / dp;
                t -= dt;
                if (std::abs(dt) < 1e-16)
                    break;
            }
            x[i] = 0.5 * (1.0 - t);
            w[i] = 1.0 / ((1.0 - t * t) * dp * dp);
        }
    }

    // Collapsed 20x20 Gauss product on each of 16 sub-triangles.
    inline cplx oracle_exp_triangle(const Vec3& k, const Triangle& t)
    {
        static std::vector<double> x, w;
        if (x.empty())
            oracle_gauss(20, x, w);

        std::vector<std::array<Vec3, 3>> tris{{t.v1, t.v2, t.v3}};
        for (int level = 0; level < 2; ++level)
        {
            std::vector<std::array<Vec3, 3>> next;
            for (const auto& s : tris)
            {
                const Vec3 m01 = 0.5 * (s[0] + s[1]);
                const Vec3 m12 = 0.5 * (s[1] + s[2]);
                const Vec3 m02 = 0.5 * (s[0] + s[2]);
                next.push_back({s[0], m01, m02});
                next.push_back({m01, s[1], m12});
                next.push_back({m02, m12, s[2]});
                next.push_back({m01, m12, m02});
            }
            tris = next;
        }

        cplx sum = 0.0;
        for (const auto& s : tris)
        {
            const double jac = (s[1] - s[0]).cross(s[2] - s[0]).norm();
            for (std::size_t i = 0; i < x.size(); ++i)
                for (std::size_t j = 0; j < x.size(); ++j)
                {
                    const double u = x[i];
                    const double v = x[j] * (1.0 - u);
                    const Vec3 p = s[0] + u * (s[1] - s[0]) + v * (s[2] - s[0]);
                    sum += w[i] * w[j] * (1.0 - u) * jac * std::exp(I_UNIT * k.dot(p));
                }
        }
        return sum;
    }
}

#endif
