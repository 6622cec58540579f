#include "pwdg/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include <Eigen/Eigenvalues>

namespace pwdg
{
    namespace
    {
        // Below this spread of {0, a, b} the divided-difference formula loses
        // digits; a Taylor expansion about the midpoint takes over.
        constexpr double series_threshold = 1e-2;
        constexpr int series_terms = 12;

        // (exp(i t) - 1) / t without cancellation for small t
        cplx expm1_over(double t)
        {
            if (t == 0.0)
                return I_UNIT;
            const double s = std::sin(0.5 * t);
            return cplx(-2.0 * s * s / t, std::sin(t) / t);
        }

        // first divided difference of g(t) = -exp(i t)
        cplx first_difference(double x, double y)
        {
            return -std::exp(I_UNIT * x) * expm1_over(y - x);
        }

        cplx series(double y0, double y1, double y2)
        {
            const double c = (y0 + y1 + y2) / 3.0;
            const double z[3] = {y0 - c, y1 - c, y2 - c};

            // complete homogeneous symmetric polynomials h_0..h_{N-1}
            double h[series_terms];
            h[0] = 1.0;
            for (int m = 1; m < series_terms; ++m)
                h[m] = h[m - 1] * z[0];
            for (int v = 1; v < 3; ++v)
                for (int m = 1; m < series_terms; ++m)
                    h[m] += z[v] * h[m - 1];

            cplx sum = 0.0;
            cplx ipow = 1.0;
            double fact = 2.0;  // (m + 2)!
            for (int m = 0; m < series_terms; ++m)
            {
                sum += ipow * h[m] / fact;
                ipow *= I_UNIT;
                fact *= static_cast<double>(m + 3);
            }
            return std::exp(I_UNIT * c) * sum;
        }
    }

    double Triangle::diameter() const
    {
        return std::max({(v2 - v1).norm(), (v3 - v1).norm(), (v3 - v2).norm()});
    }

    cplx exp_simplex_2d(double a, double b)
    {
        double y[3] = {0.0, a, b};
        std::sort(y, y + 3);

        if (y[2] - y[0] < series_threshold)
            return series(y[0], y[1], y[2]);

        return (first_difference(y[1], y[2]) - first_difference(y[0], y[1])) / (y[2] - y[0]);
    }

    cplx integrate_exp_triangle(const Vec3& k, const Triangle& t)
    {
        const Vec3 e1 = t.v2 - t.v1;
        const Vec3 e2 = t.v3 - t.v1;
        const double jac = e1.cross(e2).norm();
        return jac * std::exp(I_UNIT * k.dot(t.v1)) * exp_simplex_2d(k.dot(e1), k.dot(e2));
    }

    void gauss_jacobi_01(int n, int alpha, std::vector<double>& x, std::vector<double>& w)
    {
        // Golub-Welsch on the Jacobi matrix for P^(alpha, 0) on [-1, 1].
        const double a = alpha;
        const double b = 0.0;
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < n; ++i)
        {
            const double s = 2.0 * i + a + b;
            if (i == 0)
                J(i, i) = (b - a) / (a + b + 2.0);
            else
                J(i, i) = (b * b - a * a) / (s * (s + 2.0));

            if (i + 1 < n)
            {
                const double k = i + 1.0;
                const double t = 2.0 * k + a + b;
                const double num = 4.0 * k * (k + a) * (k + b) * (k + a + b);
                const double den = (t - 1.0) * t * t * (t + 1.0);
                J(i, i + 1) = J(i + 1, i) = std::sqrt(num / den);
            }
        }

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
        x.resize(n);
        w.resize(n);
        double total = 0.0;
        for (int i = 0; i < n; ++i)
        {
            x[i] = 0.5 * (es.eigenvalues()[i] + 1.0);
            const double v0 = es.eigenvectors()(0, i);
            w[i] = v0 * v0;
            total += w[i];
        }
        // int_0^1 (1 - x)^alpha dx = 1 / (alpha + 1)
        for (double& wi : w)
            wi *= 1.0 / ((a + 1.0) * total);
    }

    void gauss_legendre_01(int n, std::vector<double>& x, std::vector<double>& w)
    {
        gauss_jacobi_01(n, 0, x, w);
    }

    FaceRule triangle_rule(const Triangle& t, int n)
    {
        std::vector<double> xu, wu, xv, wv;
        gauss_jacobi_01(n, 1, xu, wu);
        gauss_legendre_01(n, xv, wv);

        const Vec3 e1 = t.v2 - t.v1;
        const Vec3 e2 = t.v3 - t.v1;
        const double jac = e1.cross(e2).norm();

        FaceRule rule;
        rule.points.reserve(n * n);
        rule.weights.reserve(n * n);
        for (int i = 0; i < n; ++i)
        {
            for (int j = 0; j < n; ++j)
            {
                const double u = xu[i];
                const double v = xv[j] * (1.0 - u);
                rule.points.push_back(t.v1 + u * e1 + v * e2);
                rule.weights.push_back(jac * wu[i] * wv[j]);
            }
        }
        return rule;
    }

    namespace
    {
        TetQuadRule make_tet_rule(int order, int n)
        {
            std::vector<double> x1, w1, x2, w2, x3, w3;
            gauss_jacobi_01(n, 2, x1, w1);
            gauss_jacobi_01(n, 1, x2, w2);
            gauss_legendre_01(n, x3, w3);

            TetQuadRule rule;
            rule.order = order;
            for (int i = 0; i < n; ++i)
            {
                for (int j = 0; j < n; ++j)
                {
                    for (int k = 0; k < n; ++k)
                    {
                        const double a = x1[i];
                        const double b = x2[j] * (1.0 - a);
                        const double c = x3[k] * (1.0 - a) * (1.0 - x2[j]);
                        rule.points.push_back({1.0 - a - b - c, a, b, c});
                        rule.weights.push_back(6.0 * w1[i] * w2[j] * w3[k]);
                    }
                }
            }
            return rule;
        }
    }

    const TetQuadRule& tet_rule(int order)
    {
        static const std::map<int, int> points_per_direction = {{2, 2}, {5, 3}, {8, 5}, {11, 6}, {14, 8}};
        static std::map<int, TetQuadRule> cache;
        static std::mutex mutex;

        const auto it = points_per_direction.find(order);
        if (it == points_per_direction.end())
            throw Error(ErrorCode::UnsupportedOrder, "tet rule of order " + std::to_string(order));

        std::lock_guard<std::mutex> lock(mutex);
        auto found = cache.find(order);
        if (found == cache.end())
            found = cache.emplace(order, make_tet_rule(order, it->second)).first;
        return found->second;
    }

    double tet_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d)
    {
        return (b - a).dot((c - a).cross(d - a)) / 6.0;
    }

    cplx integrate_tet(const std::function<cplx(const Vec3&)>& f,
                       const std::array<Vec3, 4>& tet,
                       const TetQuadRule& rule)
    {
        const double vol = std::abs(tet_volume(tet[0], tet[1], tet[2], tet[3]));
        cplx sum = 0.0;
        for (std::size_t q = 0; q < rule.points.size(); ++q)
        {
            const auto& l = rule.points[q];
            const Vec3 x = l[0] * tet[0] + l[1] * tet[1] + l[2] * tet[2] + l[3] * tet[3];
            sum += rule.weights[q] * f(x);
        }
        return vol * sum;
    }

    std::array<std::array<Vec3, 4>, 8> refine_tet(const std::array<Vec3, 4>& t)
    {
        auto mid = [&](int i, int j) { return Vec3(0.5 * (t[i] + t[j])); };
        const Vec3 m01 = mid(0, 1), m02 = mid(0, 2), m03 = mid(0, 3);
        const Vec3 m12 = mid(1, 2), m13 = mid(1, 3), m23 = mid(2, 3);
        return {{
            {t[0], m01, m02, m03},
            {m01, t[1], m12, m13},
            {m02, m12, t[2], m23},
            {m03, m13, m23, t[3]},
            {m01, m02, m03, m13},
            {m01, m02, m12, m13},
            {m02, m03, m13, m23},
            {m02, m12, m13, m23},
        }};
    }
}
