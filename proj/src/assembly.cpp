#include "pwdg/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace pwdg
{
    namespace
    {
        // sum_i x_i conj(y_i)
        inline cplx hdot(const CVec3& x, const CVec3& y)
        {
            return y.dot(x);
        }

        inline CVec3 ncross(const Vec3& n, const CVec3& v)
        {
            return cross(n.cast<cplx>(), v);
        }

        // Traces of every local basis function on one side of a face.
        struct SideTraces
        {
            std::size_t elem = 0;
            Vec3 n;
            std::vector<CVec3> e;   // value
            std::vector<CVec3> f;   // flux
            std::vector<cplx> fn;   // Helmholtz: flux . n
            std::vector<CVec3> te;  // Maxwell: n x value
            std::vector<CVec3> tf;  // Maxwell: n x flux
        };

        SideTraces side_traces(const TrefftzSpace& space, std::size_t elem, const Vec3& n)
        {
            const std::size_t nb = space.per_element();
            SideTraces s;
            s.elem = elem;
            s.n = n;
            s.e.resize(nb);
            s.f.resize(nb);
            if (space.equation == Equation::Helmholtz)
                s.fn.resize(nb);
            else
            {
                s.te.resize(nb);
                s.tf.resize(nb);
            }
            const CVec3 nc = n.cast<cplx>();
            for (std::size_t a = 0; a < nb; ++a)
            {
                const cplx ph = space.element_phase(elem, a);
                s.e[a] = ph * space.waves[a].value;
                s.f[a] = ph * space.waves[a].flux;
                if (space.equation == Equation::Helmholtz)
                    s.fn[a] = s.f[a].cwiseProduct(nc).sum();
                else
                {
                    s.te[a] = ncross(n, s.e[a]);
                    s.tf[a] = ncross(n, s.f[a]);
                }
            }
            return s;
        }

        // gram(g, h) = int_T exp(i (k_g - k_h).x)
        Eigen::MatrixXcd face_gram(const TrefftzSpace& space, const Triangle& tri)
        {
            std::vector<Vec3> k(space.num_groups);
            for (const auto& w : space.waves)
                k[w.group] = w.k;

            const int ng = space.num_groups;
            Eigen::MatrixXcd gram(ng, ng);
            for (int g = 0; g < ng; ++g)
            {
                gram(g, g) = tri.area();
                for (int h = g + 1; h < ng; ++h)
                {
                    gram(g, h) = integrate_exp_triangle(k[g] - k[h], tri);
                    gram(h, g) = std::conj(gram(g, h));
                }
            }
            return gram;
        }

        // block(b, a) += A_h(phi_a on side u, phi_b on side v) on this face
        void interior_block(const TrefftzSpace& space, const FluxParams& fp, const SideTraces& u,
                            const SideTraces& v, const Eigen::MatrixXcd& gram, Eigen::MatrixXcd& block)
        {
            const std::size_t nb = space.per_element();
            const double w = space.omega;
            const double sigma = u.n.dot(v.n) > 0.0 ? 1.0 : -1.0;

            for (std::size_t a = 0; a < nb; ++a)
            {
                const int ga = space.waves[a].group;
                for (std::size_t b = 0; b < nb; ++b)
                {
                    const int gb = space.waves[b].group;
                    cplx c;
                    if (space.equation == Equation::Helmholtz)
                    {
                        const cplx va = u.e[a][0], vb = v.e[b][0];
                        const cplx fa = u.fn[a], fb = v.fn[b];
                        c = 0.5 * va * std::conj(fb)
                            + I_UNIT * (fp.beta / w) * fa * std::conj(fb)
                            - 0.5 * sigma * fa * std::conj(vb)
                            + I_UNIT * (w * fp.alpha * sigma) * va * std::conj(vb);
                    }
                    else
                    {
                        c = -0.5 * hdot(u.e[a], v.tf[b])
                            - I_UNIT * (fp.beta / w) * hdot(u.tf[a], v.tf[b])
                            - 0.5 * hdot(u.f[a], v.te[b])
                            - I_UNIT * (w * fp.alpha) * hdot(u.te[a], v.te[b]);
                    }
                    block(b, a) += c * gram(ga, gb);
                }
            }
        }

        void boundary_block(const TrefftzSpace& space, const FluxParams& fp, const SideTraces& s,
                            const Eigen::MatrixXcd& gram, Eigen::MatrixXcd& block)
        {
            const std::size_t nb = space.per_element();
            const double w = space.omega;
            const double d = fp.delta;

            for (std::size_t a = 0; a < nb; ++a)
            {
                const int ga = space.waves[a].group;
                for (std::size_t b = 0; b < nb; ++b)
                {
                    const int gb = space.waves[b].group;
                    cplx c;
                    if (space.equation == Equation::Helmholtz)
                    {
                        const cplx va = s.e[a][0], vb = s.e[b][0];
                        const cplx fa = s.fn[a], fb = s.fn[b];
                        c = (1.0 - d) * va * std::conj(fb)
                            + I_UNIT * (d / w) * fa * std::conj(fb)
                            - d * fa * std::conj(vb)
                            + I_UNIT * (w * (1.0 - d)) * va * std::conj(vb);
                    }
                    else
                    {
                        c = (1.0 - d) * hdot(s.te[a], s.f[b])
                            - d * hdot(s.f[a], s.te[b])
                            - I_UNIT * (d / (w * fp.theta)) * hdot(s.tf[a], s.tf[b])
                            - I_UNIT * (w * (1.0 - d) * fp.theta) * hdot(s.te[a], s.te[b]);
                    }
                    block(b, a) += c * gram(ga, gb);
                }
            }
        }

        double max_wave_number(const TrefftzSpace& space)
        {
            double kmax = 0.0;
            for (const auto& w : space.waves)
                kmax = std::max(kmax, w.k.norm());
            return kmax;
        }

        void check_flux(const FluxParams& fp, const TrefftzSpace& space)
        {
            fp.validate();
            if (!(space.omega > 0.0))
                throw Error(ErrorCode::ConfigError, "omega must be positive");
        }
    }

    void FluxParams::validate() const
    {
        if (!(alpha > 0.0) || !(beta > 0.0))
            throw Error(ErrorCode::ConfigError, "flux parameters alpha and beta must be positive");
        if (!(delta > 0.0) || delta > 0.5)
            throw Error(ErrorCode::ConfigError, "flux parameter delta must lie in (0, 1/2]");
        if (theta == 0.0 || !std::isfinite(theta))
            throw Error(ErrorCode::ConfigError, "impedance theta must be nonzero");
    }

    cplx TrefftzSpace::element_phase(std::size_t elem, std::size_t a) const
    {
        if (anchor == Anchor::Global)
            return 1.0;
        return std::exp(-I_UNIT * waves[a].k.dot(anchors[elem]));
    }

    namespace
    {
        void set_anchors(TrefftzSpace& s, const TetMesh& mesh, Anchor anchor)
        {
            s.anchor = anchor;
            if (anchor == Anchor::Centroid)
            {
                s.anchors.resize(mesh.num_elements());
                for (std::size_t k = 0; k < mesh.num_elements(); ++k)
                    s.anchors[k] = mesh.centroid(k);
            }
        }
    }

    TrefftzSpace helmholtz_space(const HelmholtzBasis& basis, const TetMesh& mesh, Anchor anchor)
    {
        TrefftzSpace s;
        s.equation = Equation::Helmholtz;
        s.omega = basis.omega;
        const std::size_t p = basis.per_element();
        for (std::size_t l = 0; l < p; ++l)
        {
            LocalWave w;
            w.k = basis.wave_vector(l);
            w.value = CVec3(1.0, 0.0, 0.0);
            w.flux = I_UNIT * (basis.A * w.k).cast<cplx>();
            w.group = static_cast<int>(l);
            s.waves.push_back(w);
        }
        s.num_groups = static_cast<int>(p);
        set_anchors(s, mesh, anchor);
        return s;
    }

    TrefftzSpace helmholtz_hat_space(const HelmholtzBasis& basis, const TetMesh& hat, Anchor anchor)
    {
        HelmholtzBasis iso = basis;
        iso.S = Mat3::Identity();
        iso.A = Mat3::Identity();
        return helmholtz_space(iso, hat, anchor);
    }

    TrefftzSpace maxwell_space(const MaxwellBasis& basis, const TetMesh& mesh, Anchor anchor)
    {
        TrefftzSpace s;
        s.equation = Equation::Maxwell;
        s.omega = basis.omega;
        const std::size_t p = basis.dirs.size();
        for (std::size_t l = 0; l < 2 * p; ++l)
        {
            LocalWave w;
            w.k = basis.wave_vector(l);
            w.value = basis.amplitude(l).cast<cplx>();
            w.flux = basis.flux_amplitude(l);
            w.group = static_cast<int>(l % p);
            s.waves.push_back(w);
        }
        s.num_groups = static_cast<int>(p);
        set_anchors(s, mesh, anchor);
        return s;
    }

    TrefftzSpace maxwell_hat_space(const MaxwellBasis& basis, const TetMesh& hat, Anchor anchor)
    {
        MaxwellBasis iso = basis;
        iso.S = Mat3::Identity();
        iso.G = Mat3::Identity();
        iso.A = Mat3::Identity();
        return maxwell_space(iso, hat, anchor);
    }

    int face_points_for(double phase_range)
    {
        return std::clamp(8 + static_cast<int>(std::ceil(0.6 * phase_range)), 8, 48);
    }

    Eigen::VectorXcd assemble_load(const TetMesh& mesh, const TrefftzSpace& space, const FluxParams& fp,
                                   const BoundaryData& g)
    {
        const std::size_t nb = space.per_element();
        Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(mesh.num_elements() * nb));
        if (!g)
            return rhs;

        check_flux(fp, space);
        const double w = space.omega;
        const double d = fp.delta;
        const double kmax = max_wave_number(space);

        for (const Face& f : mesh.faces)
        {
            if (!f.boundary())
                continue;

            const auto fv = mesh.face_vertices(f);
            const Triangle tri(fv[0], fv[1], fv[2]);
            const FaceRule rule = triangle_rule(tri, face_points_for(2.0 * kmax * tri.diameter()));
            const SideTraces s = side_traces(space, static_cast<std::size_t>(f.left), f.normal);
            const std::size_t base = static_cast<std::size_t>(f.left) * nb;

            for (std::size_t q = 0; q < rule.points.size(); ++q)
            {
                const Vec3& x = rule.points[q];
                const CVec3 gx = g(x, f.normal);
                const CVec3 ng = ncross(f.normal, gx);
                for (std::size_t b = 0; b < nb; ++b)
                {
                    const cplx e = std::conj(std::exp(I_UNIT * space.waves[b].k.dot(x)));
                    cplx c;
                    if (space.equation == Equation::Helmholtz)
                        c = gx[0] * (I_UNIT * (d / w) * std::conj(s.fn[b]) + (1.0 - d) * std::conj(s.e[b][0]));
                    else
                        c = -I_UNIT * (d / (w * fp.theta)) * hdot(ng, s.f[b]) + (1.0 - d) * hdot(ng, s.te[b]);
                    rhs[static_cast<Eigen::Index>(base + b)] += rule.weights[q] * c * e;
                }
            }
        }
        return rhs;
    }

    GlobalSystem assemble(const TetMesh& mesh, const TrefftzSpace& space, const FluxParams& fp,
                          const BoundaryData& g)
    {
        check_flux(fp, space);

        const std::size_t nb = space.per_element();
        const std::size_t ne = mesh.num_elements();
        const Eigen::Index nbi = static_cast<Eigen::Index>(nb);

        std::vector<Eigen::MatrixXcd> diag(ne, Eigen::MatrixXcd::Zero(nbi, nbi));

        // off-diagonal blocks: (row element, column element) -> block
        struct OffBlock
        {
            int row;
            int col;
            Eigen::MatrixXcd block;
        };
        std::vector<OffBlock> off;

        for (const Face& f : mesh.faces)
        {
            const auto fv = mesh.face_vertices(f);
            const Triangle tri(fv[0], fv[1], fv[2]);
            const Eigen::MatrixXcd gram = face_gram(space, tri);

            const SideTraces l = side_traces(space, static_cast<std::size_t>(f.left), f.normal);
            if (f.boundary())
            {
                boundary_block(space, fp, l, gram, diag[f.left]);
                continue;
            }

            const SideTraces r = side_traces(space, static_cast<std::size_t>(f.right), -f.normal);
            interior_block(space, fp, l, l, gram, diag[f.left]);
            interior_block(space, fp, r, r, gram, diag[f.right]);

            OffBlock rl{f.right, f.left, Eigen::MatrixXcd::Zero(nbi, nbi)};
            interior_block(space, fp, l, r, gram, rl.block);
            OffBlock lr{f.left, f.right, Eigen::MatrixXcd::Zero(nbi, nbi)};
            interior_block(space, fp, r, l, gram, lr.block);
            off.push_back(std::move(rl));
            off.push_back(std::move(lr));
        }

        // column element -> (row element, block) sorted by row
        std::vector<std::vector<std::pair<int, const Eigen::MatrixXcd*>>> columns(ne);
        for (std::size_t k = 0; k < ne; ++k)
            columns[k].emplace_back(static_cast<int>(k), &diag[k]);
        for (const auto& b : off)
            columns[b.col].emplace_back(b.row, &b.block);

        std::size_t nnz = 0;
        for (auto& c : columns)
        {
            std::sort(c.begin(), c.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
            nnz += c.size() * nb * nb;
        }

        GlobalSystem sys;
        sys.equation = space.equation;
        sys.per_element = nb;
        const Eigen::Index n = static_cast<Eigen::Index>(ne * nb);
        sys.matrix.resize(n, n);
        sys.matrix.makeCompressed();
        sys.matrix.resizeNonZeros(static_cast<Eigen::Index>(nnz));

        auto* outer = sys.matrix.outerIndexPtr();
        auto* inner = sys.matrix.innerIndexPtr();
        auto* values = sys.matrix.valuePtr();
        std::size_t pos = 0;
        for (std::size_t k = 0; k < ne; ++k)
        {
            for (std::size_t a = 0; a < nb; ++a)
            {
                outer[k * nb + a] = static_cast<int>(pos);
                for (const auto& [row, block] : columns[k])
                {
                    for (std::size_t b = 0; b < nb; ++b)
                    {
                        inner[pos] = static_cast<int>(static_cast<std::size_t>(row) * nb + b);
                        values[pos] = (*block)(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a));
                        ++pos;
                    }
                }
            }
        }
        outer[n] = static_cast<int>(pos);

        sys.rhs = assemble_load(mesh, space, fp, g);
        return sys;
    }

    namespace
    {
        void check_transform(const Mat3& basis_S, const Mat3& mesh_S)
        {
            const double scale = std::max(1.0, mesh_S.cwiseAbs().maxCoeff());
            if ((basis_S - mesh_S).cwiseAbs().maxCoeff() > 1e-12 * scale)
                throw Error(ErrorCode::BasisMeshMismatch, "basis and mesh pair were built from different transforms");
        }
    }

    GlobalSystem assemble_helmholtz(const MeshPair& pair, const HelmholtzBasis& basis, const FluxParams& flux,
                                    const BoundaryData& g, Anchor anchor)
    {
        check_transform(basis.S, pair.S);
        return assemble(pair.phys, helmholtz_space(basis, pair.phys, anchor), flux, g);
    }

    GlobalSystem assemble_maxwell(const MeshPair& pair, const MaxwellBasis& basis, const FluxParams& flux,
                                  const BoundaryData& g, Anchor anchor)
    {
        check_transform(basis.S, pair.S);
        return assemble(pair.phys, maxwell_space(basis, pair.phys, anchor), flux, g);
    }

    void export_triplets(std::ostream& out, const Eigen::SparseMatrix<cplx>& m)
    {
        out.precision(17);
        for (Eigen::Index c = 0; c < m.outerSize(); ++c)
            for (Eigen::SparseMatrix<cplx>::InnerIterator it(m, c); it; ++it)
                out << it.row() << " " << it.col() << " " << it.value().real() << " " << it.value().imag() << "\n";
    }

    Trace evaluate(const TrefftzSpace& space, const Eigen::VectorXcd& coeffs, std::size_t elem, const Vec3& x)
    {
        const std::size_t nb = space.per_element();
        Trace t;
        std::vector<cplx> phase(space.num_groups);
        for (const auto& w : space.waves)
            phase[w.group] = std::exp(I_UNIT * w.k.dot(x));
        for (std::size_t a = 0; a < nb; ++a)
        {
            const cplx c = coeffs[static_cast<Eigen::Index>(elem * nb + a)] * space.element_phase(elem, a)
                           * phase[space.waves[a].group];
            t.value += c * space.waves[a].value;
            t.flux += c * space.waves[a].flux;
        }
        return t;
    }
}
