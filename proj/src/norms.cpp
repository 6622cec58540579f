#include "pwdg/norms.hpp"

#include <algorithm>
#include <cmath>

#include "pwdg/quadrature.hpp"

namespace pwdg
{
    namespace
    {
        enum class Term
        {
            FluxJump,       // interior
            ValueJump,      // interior
            ValueAverage,   // interior, augmented
            FluxAverage,    // interior, augmented
            BoundaryFlux,
            BoundaryValue,
            BoundaryValueAug  // augmented
        };

        struct WeightedTerm
        {
            Term term;
            double weight;
            bool augmented;
        };

        std::vector<WeightedTerm> interior_terms(Equation, double w, const FluxParams& p)
        {
            return {{Term::FluxJump, p.beta / w, false},
                    {Term::ValueJump, w * p.alpha, false},
                    {Term::ValueAverage, w / p.beta, true},
                    {Term::FluxAverage, 1.0 / (w * p.alpha), true}};
        }

        std::vector<WeightedTerm> boundary_terms(Equation eq, double w, const FluxParams& p)
        {
            if (eq == Equation::Helmholtz)
                return {{Term::BoundaryFlux, p.delta / w, false},
                        {Term::BoundaryValue, w * (1.0 - p.delta), false},
                        {Term::BoundaryValueAug, w / p.delta, true}};
            return {{Term::BoundaryFlux, p.delta / (w * p.theta), false},
                    {Term::BoundaryValue, w * (1.0 - p.delta) * p.theta, false},
                    {Term::BoundaryValueAug, w * p.theta / p.delta, true}};
        }

        // Contribution of one side (outward normal n, sign +1 for the left
        // element and -1 for the right) to the quantity measured by `term`.
        CVec3 side_term(Equation eq, Term term, double sign, const Vec3& n, const CVec3& value, const CVec3& flux)
        {
            const CVec3 nc = n.cast<cplx>();
            if (eq == Equation::Helmholtz)
            {
                switch (term)
                {
                case Term::FluxJump:
                case Term::BoundaryFlux:
                    return CVec3(flux.cwiseProduct(nc).sum(), 0.0, 0.0);
                case Term::ValueJump:
                    return CVec3(sign * value[0], 0.0, 0.0);
                case Term::ValueAverage:
                    return CVec3(0.5 * value[0], 0.0, 0.0);
                case Term::FluxAverage:
                    return 0.5 * flux;
                case Term::BoundaryValue:
                case Term::BoundaryValueAug:
                    return CVec3(value[0], 0.0, 0.0);
                }
            }
            switch (term)
            {
            case Term::FluxJump:
            case Term::BoundaryFlux:
                return cross(nc, flux);
            case Term::ValueJump:
            case Term::BoundaryValue:
            case Term::BoundaryValueAug:
                return cross(nc, value);
            case Term::ValueAverage:
                return 0.5 * value;
            case Term::FluxAverage:
                return 0.5 * flux;
            }
            return CVec3::Zero();
        }

        Eigen::MatrixXcd face_gram(const std::vector<Vec3>& k, const Triangle& tri)
        {
            const Eigen::Index ng = static_cast<Eigen::Index>(k.size());
            Eigen::MatrixXcd gram(ng, ng);
            for (Eigen::Index g = 0; g < ng; ++g)
            {
                gram(g, g) = tri.area();
                for (Eigen::Index h = g + 1; h < ng; ++h)
                {
                    gram(g, h) = integrate_exp_triangle(k[g] - k[h], tri);
                    gram(h, g) = std::conj(gram(g, h));
                }
            }
            return gram;
        }

        double quadratic_form(const std::vector<CVec3>& z, const Eigen::MatrixXcd& gram)
        {
            cplx sum = 0.0;
            const std::size_t n = z.size();
            for (std::size_t g = 0; g < n; ++g)
                for (std::size_t h = 0; h < n; ++h)
                    sum += z[h].dot(z[g]) * gram(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(h));
            return std::real(sum);
        }

        double max_wave_number(const TrefftzSpace& space)
        {
            double kmax = 0.0;
            for (const auto& w : space.waves)
                kmax = std::max(kmax, w.k.norm());
            return kmax;
        }
    }

    NormSquares skeleton_norms(const TetMesh& mesh, const TrefftzSpace& space, const FluxParams& flux,
                               const Eigen::VectorXcd& coeffs)
    {
        const std::size_t nb = space.per_element();
        if (static_cast<std::size_t>(coeffs.size()) != nb * mesh.num_elements())
            throw Error(ErrorCode::BasisMeshMismatch, "coefficient vector does not match mesh and basis");

        std::vector<Vec3> k(space.num_groups);
        for (const auto& w : space.waves)
            k[w.group] = w.k;

        const auto interior = interior_terms(space.equation, space.omega, flux);
        const auto boundary = boundary_terms(space.equation, space.omega, flux);

        NormSquares out;
        std::vector<CVec3> z(space.num_groups);
        for (const Face& f : mesh.faces)
        {
            const auto fv = mesh.face_vertices(f);
            const Triangle tri(fv[0], fv[1], fv[2]);
            const Eigen::MatrixXcd gram = face_gram(k, tri);

            const int nsides = f.boundary() ? 1 : 2;
            const auto& terms = f.boundary() ? boundary : interior;
            for (const auto& t : terms)
            {
                std::fill(z.begin(), z.end(), CVec3::Zero());
                for (int s = 0; s < nsides; ++s)
                {
                    const std::size_t elem = static_cast<std::size_t>(s == 0 ? f.left : f.right);
                    const double sign = s == 0 ? 1.0 : -1.0;
                    const Vec3 n = sign * f.normal;
                    for (std::size_t a = 0; a < nb; ++a)
                    {
                        const cplx c = coeffs[static_cast<Eigen::Index>(elem * nb + a)] * space.element_phase(elem, a);
                        const auto& w = space.waves[a];
                        z[w.group] += side_term(space.equation, t.term, sign, n, c * w.value, c * w.flux);
                    }
                }
                const double q = t.weight * quadratic_form(z, gram);
                out.augmented += q;
                if (!t.augmented)
                    out.skeleton += q;
            }
        }
        return out;
    }

    NormSquares skeleton_norms_quadrature(const TetMesh& mesh, Equation eq, double omega, const FluxParams& flux,
                                          const ElementTrace& field, double wave_number)
    {
        const auto interior = interior_terms(eq, omega, flux);
        const auto boundary = boundary_terms(eq, omega, flux);

        NormSquares out;
        for (const Face& f : mesh.faces)
        {
            const auto fv = mesh.face_vertices(f);
            const Triangle tri(fv[0], fv[1], fv[2]);
            const FaceRule rule = triangle_rule(tri, face_points_for(2.0 * wave_number * tri.diameter()));

            const int nsides = f.boundary() ? 1 : 2;
            const auto& terms = f.boundary() ? boundary : interior;
            for (std::size_t q = 0; q < rule.points.size(); ++q)
            {
                const Vec3& x = rule.points[q];
                Trace tr[2];
                for (int s = 0; s < nsides; ++s)
                    tr[s] = field(static_cast<std::size_t>(s == 0 ? f.left : f.right), x);

                for (const auto& t : terms)
                {
                    CVec3 z = CVec3::Zero();
                    for (int s = 0; s < nsides; ++s)
                    {
                        const double sign = s == 0 ? 1.0 : -1.0;
                        z += side_term(eq, t.term, sign, sign * f.normal, tr[s].value, tr[s].flux);
                    }
                    const double v = rule.weights[q] * t.weight * z.squaredNorm();
                    out.augmented += v;
                    if (!t.augmented)
                        out.skeleton += v;
                }
            }
        }
        return out;
    }

    SkeletonError skeleton_error(const TetMesh& mesh, const TrefftzSpace& space, const FluxParams& flux,
                                 const Eigen::VectorXcd& coeffs, const TraceFunction& exact)
    {
        const double kw = max_wave_number(space);
        const auto diff = [&](std::size_t elem, const Vec3& x) {
            const Trace e = exact(x);
            const Trace h = evaluate(space, coeffs, elem, x);
            Trace d;
            d.value = e.value - h.value;
            d.flux = e.flux - h.flux;
            return d;
        };
        const auto ref = [&](std::size_t, const Vec3& x) { return exact(x); };

        SkeletonError out;
        out.error = std::sqrt(skeleton_norms_quadrature(mesh, space.equation, space.omega, flux, diff, kw).skeleton);
        out.reference = std::sqrt(skeleton_norms_quadrature(mesh, space.equation, space.omega, flux, ref, kw).skeleton);
        return out;
    }

    double l2_relative_error(const MeshPair& pair, const TrefftzSpace& space, const Eigen::VectorXcd& coeffs,
                             const TraceFunction& exact, double wave_number, int quad_order)
    {
        const TetQuadRule& rule = tet_rule(quad_order);
        const TetMesh& mesh = pair.phys;

        double err = 0.0;
        double ref = 0.0;
        for (std::size_t k = 0; k < mesh.num_elements(); ++k)
        {
            int levels = 0;
            double d = pair.hat.element_diameter[k];
            while (wave_number * d > 4.0 && levels < 3)
            {
                d *= 0.5;
                ++levels;
            }

            std::vector<std::array<Vec3, 4>> pieces{mesh.tet_vertices(k)};
            for (int l = 0; l < levels; ++l)
            {
                std::vector<std::array<Vec3, 4>> next;
                next.reserve(8 * pieces.size());
                for (const auto& t : pieces)
                    for (const auto& c : refine_tet(t))
                        next.push_back(c);
                pieces.swap(next);
            }

            for (const auto& t : pieces)
            {
                const double vol = std::abs(tet_volume(t[0], t[1], t[2], t[3]));
                for (std::size_t q = 0; q < rule.points.size(); ++q)
                {
                    const auto& l = rule.points[q];
                    const Vec3 x = l[0] * t[0] + l[1] * t[1] + l[2] * t[2] + l[3] * t[3];
                    const CVec3 ue = exact(x).value;
                    const CVec3 uh = evaluate(space, coeffs, k, x).value;
                    const double w = vol * rule.weights[q];
                    err += w * (ue - uh).squaredNorm();
                    ref += w * ue.squaredNorm();
                }
            }
        }
        return ref > 0.0 ? std::sqrt(err / ref) : std::sqrt(err);
    }

    double helmholtz_forward_bound(const SpectralFactorization& f)
    {
        return std::sqrt(f.rho()) * std::pow(f.lambda_mid(), 0.25) * std::pow(f.lambda_max(), 0.25)
               * (1.0 + std::sqrt(f.lambda_min()));
    }

    double helmholtz_reverse_bound(const SpectralFactorization& f)
    {
        return std::sqrt(f.rho()) * std::pow(f.lambda_min(), -0.25) * std::pow(f.lambda_mid(), -0.25)
               * (1.0 + 1.0 / std::sqrt(f.lambda_max()));
    }

    double maxwell_forward_bound(const SpectralFactorization& f)
    {
        const MaxwellTransform t = maxwell_transform(f);
        return std::sqrt(f.rho()) / std::sqrt(t.m[1] * t.m[2]) * (1.0 + 1.0 / std::sqrt(f.lambda_max()));
    }

    double maxwell_reverse_bound(const SpectralFactorization& f)
    {
        const MaxwellTransform t = maxwell_transform(f);
        // ||Lambda^{-1/2}||^{-1} = lambda_min^{1/2}
        return std::sqrt(f.rho()) * std::sqrt(t.m[0] * t.m[1]) * (1.0 + std::sqrt(f.lambda_min()));
    }

    StabilityReport stability_report(const MeshPair& pair, const TrefftzSpace& phys_space,
                                     const TrefftzSpace& hat_space, const FluxParams& flux,
                                     const SpectralFactorization& f, const Eigen::VectorXcd& coeffs)
    {
        const NormSquares phys = skeleton_norms(pair.phys, phys_space, flux, coeffs);
        const NormSquares hat = skeleton_norms(pair.hat, hat_space, flux, coeffs);

        StabilityReport r;
        r.forward_ratio = std::sqrt(phys.skeleton / hat.skeleton);
        r.forward_aug_ratio = std::sqrt(phys.augmented / hat.augmented);
        r.reverse_ratio = 1.0 / r.forward_ratio;
        r.reverse_aug_ratio = 1.0 / r.forward_aug_ratio;
        if (phys_space.equation == Equation::Helmholtz)
        {
            r.forward_bound = helmholtz_forward_bound(f);
            r.reverse_bound = helmholtz_reverse_bound(f);
        }
        else
        {
            r.forward_bound = maxwell_forward_bound(f);
            r.reverse_bound = maxwell_reverse_bound(f);
        }
        return r;
    }
}
