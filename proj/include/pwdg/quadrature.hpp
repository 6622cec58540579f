#ifndef PWDG_QUADRATURE_HPP
#define PWDG_QUADRATURE_HPP

#include <array>
#include <functional>
#include <vector>

#include "pwdg/types.hpp"

namespace pwdg
{
    struct Triangle
    {
        Vec3 v1;
        Vec3 v2;
        Vec3 v3;

        Triangle(const Vec3& a, const Vec3& b, const Vec3& c) : v1(a), v2(b), v3(c) {}

        double area() const { return 0.5 * (v2 - v1).cross(v3 - v1).norm(); }
        Vec3 normal() const { return (v2 - v1).cross(v3 - v1).normalized(); }
        double diameter() const;
    };

    // Phi(a, b) = int_0^1 int_0^{1-u} exp(i(a u + b v)) dv du. Phi(0, 0) = 1/2.
    cplx exp_simplex_2d(double a, double b);

    // Exact int_T exp(i k.x) dS.
    cplx integrate_exp_triangle(const Vec3& k, const Triangle& t);

    // int_T exp(i k1.x) conj(exp(i k2.x)) dS
    inline cplx integrate_pw_product_face(const Vec3& k1, const Vec3& k2, const Triangle& t)
    {
        return integrate_exp_triangle(k1 - k2, t);
    }

    // Gauss-Legendre nodes/weights on [0, 1].
    void gauss_legendre_01(int n, std::vector<double>& x, std::vector<double>& w);

    // Gauss-Jacobi nodes/weights on [0, 1] for the weight (1 - x)^alpha.
    void gauss_jacobi_01(int n, int alpha, std::vector<double>& x, std::vector<double>& w);

    // Point/weight rule on a physical triangle (collapsed Gauss product); the
    // weights sum to the triangle area.
    struct FaceRule
    {
        std::vector<Vec3> points;
        std::vector<double> weights;
    };

    FaceRule triangle_rule(const Triangle& t, int n_per_direction);

    struct TetQuadRule
    {
        int order = 0;
        std::vector<std::array<double, 4>> points;  // barycentric
        std::vector<double> weights;                // sum to 1
    };

    // Supported orders: 2, 5, 8, 11, 14.
    const TetQuadRule& tet_rule(int order);

    double tet_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d);

    cplx integrate_tet(const std::function<cplx(const Vec3&)>& f,
                       const std::array<Vec3, 4>& tet,
                       const TetQuadRule& rule);

    // Uniform red refinement of a tetrahedron into 8 children.
    std::array<std::array<Vec3, 4>, 8> refine_tet(const std::array<Vec3, 4>& tet);
}

#endif
