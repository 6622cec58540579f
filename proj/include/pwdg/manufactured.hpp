#ifndef PWDG_MANUFACTURED_HPP
#define PWDG_MANUFACTURED_HPP

#include "pwdg/assembly.hpp"
#include "pwdg/types.hpp"

namespace pwdg
{
    // Distance from x to the parallelepiped S([0,1]^3).
    double distance_to_image_cube(const Mat3& S, const Vec3& x);

    // u(x) = exp(i omega r) / (4 pi r), r = |S x - x0|
    class PointSourceSolution
    {
    public:
        // Throws SourceTooClose if x0 lies within `margin` of S([0,1]^3).
        PointSourceSolution(const Vec3& x0, double omega, const Mat3& S, const Mat3& A, double margin = 0.05);

        cplx eval_u(const Vec3& x) const;
        CVec3 eval_grad_u(const Vec3& x) const;
        // isotropic source in hat coordinates
        cplx eval_hat(const Vec3& xh) const;

        Trace trace(const Vec3& x) const;
        cplx robin_trace(const Vec3& x, const Vec3& n) const;

        const Vec3& x0() const { return x0_; }
        double omega() const { return omega_; }

    private:
        double radius(const Vec3& x) const;

        Vec3 x0_;
        double omega_;
        Mat3 S_;
        Mat3 A_;
    };

    struct DipoleParams
    {
        Vec3 x0 = Vec3::Constant(-0.6);
        Vec3 a = Vec3::UnitZ();
        double current = 1.0;
        double omega = 1.0;
        double eps_r = 1.0;
        double mu_r = 1.0;
    };

    // Electric dipole in hat coordinates, mapped by E = G E_hat(S x).
    class DipoleSolution
    {
    public:
        DipoleSolution(const DipoleParams& params, const Mat3& S, const Mat3& G, double margin = 0.05);

        CVec3 eval_E_hat(const Vec3& xh) const;
        CVec3 eval_H_hat(const Vec3& xh) const;
        CVec3 eval_E(const Vec3& x) const;
        CVec3 eval_H(const Vec3& x) const;

        // value E, flux mu^{-1} curl E = i omega H
        Trace trace(const Vec3& x) const;
        CVec3 impedance_trace(const Vec3& x, const Vec3& n, double theta) const;

        const DipoleParams& params() const { return p_; }

    private:
        DipoleParams p_;
        double kappa_;
        Mat3 S_;
        Mat3 G_;
    };

    // Boundary data from the trace of an exact solution:
    // Helmholtz g = n.A grad u + i omega u; Maxwell g = i omega (H x n - theta (n x E) x n).
    BoundaryData boundary_data(Equation eq, double omega, double theta, const TraceFunction& exact);

    // Single basis function of a space, as an exact solution on all of R^3.
    TraceFunction plane_wave_solution(const TrefftzSpace& space, std::size_t index);
}

#endif
