#include "pwdg/manufactured.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace pwdg
{
    double distance_to_image_cube(const Mat3& S, const Vec3& x)
    {
        // coordinate descent on |S y - x|^2 over the unit box (convex)
        Vec3 y = Vec3::Constant(0.5);
        for (int sweep = 0; sweep < 500; ++sweep)
        {
            const Vec3 before = y;
            for (int i = 0; i < 3; ++i)
            {
                const Vec3 col = S.col(i);
                const Vec3 r = S * y - x;
                y[i] = std::clamp(y[i] - col.dot(r) / col.squaredNorm(), 0.0, 1.0);
            }
            if ((y - before).norm() < 1e-15)
                break;
        }
        return (S * y - x).norm();
    }

    namespace
    {
        void check_margin(const Mat3& S, const Vec3& x0, double margin)
        {
            const double d = distance_to_image_cube(S, x0);
            if (d < margin)
            {
                std::ostringstream msg;
                msg << "source at distance " << d << " from the transformed domain (margin " << margin << ")";
                throw Error(ErrorCode::SourceTooClose, msg.str());
            }
        }
    }

    PointSourceSolution::PointSourceSolution(const Vec3& x0, double omega, const Mat3& S, const Mat3& A,
                                             double margin)
        : x0_(x0), omega_(omega), S_(S), A_(A)
    {
        check_margin(S, x0, margin);
    }

    double PointSourceSolution::radius(const Vec3& x) const
    {
        const double r = (S_ * x - x0_).norm();
        if (r <= 1e-10)
            throw Error(ErrorCode::SourceTooClose, "evaluation at the source point");
        return r;
    }

    cplx PointSourceSolution::eval_hat(const Vec3& xh) const
    {
        const double r = (xh - x0_).norm();
        if (r <= 1e-10)
            throw Error(ErrorCode::SourceTooClose, "evaluation at the source point");
        return std::exp(I_UNIT * omega_ * r) / (4.0 * std::numbers::pi * r);
    }

    cplx PointSourceSolution::eval_u(const Vec3& x) const
    {
        const double r = radius(x);
        return std::exp(I_UNIT * omega_ * r) / (4.0 * std::numbers::pi * r);
    }

    CVec3 PointSourceSolution::eval_grad_u(const Vec3& x) const
    {
        const Vec3 R = S_ * x - x0_;
        const double r = radius(x);
        const cplx u = eval_u(x);
        const Vec3 gh = R / r;
        const cplx c = u * (I_UNIT * omega_ - 1.0 / r);
        return c * (S_.transpose() * gh).cast<cplx>();
    }

    Trace PointSourceSolution::trace(const Vec3& x) const
    {
        Trace t;
        t.value = CVec3(eval_u(x), 0.0, 0.0);
        t.flux = A_.cast<cplx>() * eval_grad_u(x);
        return t;
    }

    cplx PointSourceSolution::robin_trace(const Vec3& x, const Vec3& n) const
    {
        const Trace t = trace(x);
        return t.flux.cwiseProduct(n.cast<cplx>()).sum() + I_UNIT * omega_ * t.value[0];
    }

    DipoleSolution::DipoleSolution(const DipoleParams& params, const Mat3& S, const Mat3& G, double margin)
        : p_(params), kappa_(params.omega * std::sqrt(params.eps_r * params.mu_r)), S_(S), G_(G)
    {
        check_margin(S, p_.x0, margin);
    }

    CVec3 DipoleSolution::eval_E_hat(const Vec3& xh) const
    {
        const Vec3 R = xh - p_.x0;
        const double r = R.norm();
        if (r <= 1e-10)
            throw Error(ErrorCode::SourceTooClose, "evaluation at the dipole");

        const double k = kappa_;
        const cplx phi = std::exp(I_UNIT * k * r) / (4.0 * std::numbers::pi * r);
        const cplx g = (I_UNIT * k - 1.0 / r) / r;
        const cplx dg = -I_UNIT * k / (r * r) + 2.0 / (r * r * r);

        // Hessian of phi applied to a
        const CVec3 Rc = R.cast<cplx>();
        const CVec3 ac = p_.a.cast<cplx>();
        const CVec3 Ha = phi * ((g * g + dg / r) * R.dot(p_.a) * Rc + g * ac);

        return (-I_UNIT * p_.omega * p_.mu_r * p_.current) * (phi * ac + Ha / (k * k));
    }

    CVec3 DipoleSolution::eval_H_hat(const Vec3& xh) const
    {
        const Vec3 R = xh - p_.x0;
        const double r = R.norm();
        if (r <= 1e-10)
            throw Error(ErrorCode::SourceTooClose, "evaluation at the dipole");

        const double k = kappa_;
        const cplx phi = std::exp(I_UNIT * k * r) / (4.0 * std::numbers::pi * r);
        const cplx g = (I_UNIT * k - 1.0 / r) / r;
        const CVec3 grad = phi * g * R.cast<cplx>();
        return -p_.current * cross(grad, p_.a.cast<cplx>());
    }

    CVec3 DipoleSolution::eval_E(const Vec3& x) const
    {
        return G_.cast<cplx>() * eval_E_hat(S_ * x);
    }

    CVec3 DipoleSolution::eval_H(const Vec3& x) const
    {
        return G_.cast<cplx>() * eval_H_hat(S_ * x);
    }

    Trace DipoleSolution::trace(const Vec3& x) const
    {
        Trace t;
        t.value = eval_E(x);
        t.flux = I_UNIT * p_.omega * eval_H(x);
        return t;
    }

    CVec3 DipoleSolution::impedance_trace(const Vec3& x, const Vec3& n, double theta) const
    {
        const CVec3 nc = n.cast<cplx>();
        const CVec3 E = eval_E(x);
        const CVec3 H = eval_H(x);
        return I_UNIT * p_.omega * (cross(H, nc) - theta * cross(cross(nc, E), nc));
    }

    BoundaryData boundary_data(Equation eq, double omega, double theta, const TraceFunction& exact)
    {
        if (eq == Equation::Helmholtz)
        {
            return [=](const Vec3& x, const Vec3& n) {
                const Trace t = exact(x);
                const cplx g = t.flux.cwiseProduct(n.cast<cplx>()).sum() + I_UNIT * omega * t.value[0];
                return CVec3(g, 0.0, 0.0);
            };
        }
        return [=](const Vec3& x, const Vec3& n) {
            const Trace t = exact(x);
            const CVec3 nc = n.cast<cplx>();
            // flux = mu^{-1} curl E = i omega H
            return CVec3(cross(t.flux, nc) - I_UNIT * omega * theta * cross(cross(nc, t.value), nc));
        };
    }

    TraceFunction plane_wave_solution(const TrefftzSpace& space, std::size_t index)
    {
        const LocalWave w = space.waves.at(index);
        return [w](const Vec3& x) {
            const cplx e = std::exp(I_UNIT * w.k.dot(x));
            Trace t;
            t.value = e * w.value;
            t.flux = e * w.flux;
            return t;
        };
    }
}
