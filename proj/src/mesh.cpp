#include "pwdg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "pwdg/quadrature.hpp"

namespace pwdg
{
    std::array<Vec3, 4> TetMesh::tet_vertices(std::size_t k) const
    {
        const auto& t = tets[k];
        return {vertices[t[0]], vertices[t[1]], vertices[t[2]], vertices[t[3]]};
    }

    Vec3 TetMesh::centroid(std::size_t k) const
    {
        const auto v = tet_vertices(k);
        return 0.25 * (v[0] + v[1] + v[2] + v[3]);
    }

    double TetMesh::volume(std::size_t k) const
    {
        const auto v = tet_vertices(k);
        return tet_volume(v[0], v[1], v[2], v[3]);
    }

    std::array<Vec3, 3> TetMesh::face_vertices(const Face& f) const
    {
        return {vertices[f.v[0]], vertices[f.v[1]], vertices[f.v[2]]};
    }

    void TetMesh::finalize()
    {
        for (std::size_t k = 0; k < tets.size(); ++k)
            if (volume(k) < 0.0)
                std::swap(tets[k][2], tets[k][3]);

        element_diameter.assign(tets.size(), 0.0);
        h = 0.0;
        for (std::size_t k = 0; k < tets.size(); ++k)
        {
            const auto v = tet_vertices(k);
            double d = 0.0;
            for (int i = 0; i < 4; ++i)
                for (int j = i + 1; j < 4; ++j)
                    d = std::max(d, (v[i] - v[j]).norm());
            element_diameter[k] = d;
            h = std::max(h, d);
        }

        const double tiny = 1e-14 * h * h * h;
        for (std::size_t k = 0; k < tets.size(); ++k)
        {
            if (volume(k) < tiny)
            {
                std::ostringstream msg;
                msg << "element " << k << " has volume " << volume(k) << " (h = " << h << ")";
                throw Error(ErrorCode::DegenerateElement, msg.str());
            }
        }

        faces = skeleton(*this);
    }

    std::vector<Face> skeleton(const TetMesh& mesh)
    {
        struct Entry
        {
            std::array<int, 3> key;
            int tet;
        };

        std::vector<Entry> entries;
        entries.reserve(4 * mesh.tets.size());
        for (std::size_t k = 0; k < mesh.tets.size(); ++k)
        {
            const auto& t = mesh.tets[k];
            for (int skip = 0; skip < 4; ++skip)
            {
                std::array<int, 3> key{};
                int c = 0;
                for (int i = 0; i < 4; ++i)
                    if (i != skip)
                        key[c++] = t[i];
                std::sort(key.begin(), key.end());
                entries.push_back({key, static_cast<int>(k)});
            }
        }

        std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
            return a.key != b.key ? a.key < b.key : a.tet < b.tet;
        });

        std::vector<Face> faces;
        faces.reserve(entries.size() / 2 + mesh.tets.size());
        for (std::size_t i = 0; i < entries.size();)
        {
            std::size_t j = i;
            while (j < entries.size() && entries[j].key == entries[i].key)
                ++j;

            if (j - i > 2)
                throw Error(ErrorCode::NonManifold, "triangle shared by more than two tets");

            Face f;
            f.v = entries[i].key;
            f.left = entries[i].tet;
            f.right = (j - i == 2) ? entries[i + 1].tet : -1;

            const Vec3& a = mesh.vertices[f.v[0]];
            const Vec3& b = mesh.vertices[f.v[1]];
            const Vec3& c = mesh.vertices[f.v[2]];
            const Vec3 cr = (b - a).cross(c - a);
            f.area = 0.5 * cr.norm();
            f.normal = cr.normalized();
            const Vec3 fc = (a + b + c) / 3.0;
            if (f.normal.dot(fc - mesh.centroid(f.left)) < 0.0)
                f.normal = -f.normal;

            faces.push_back(f);
            i = j;
        }
        return faces;
    }

    TetMesh generate_box_tets(const Vec3& lo, const Vec3& hi, int nx, int ny, int nz)
    {
        if (nx < 1 || ny < 1 || nz < 1)
            throw Error(ErrorCode::ConfigError, "grid subdivisions must be >= 1");

        TetMesh mesh;
        auto id = [&](int i, int j, int k) { return i + (nx + 1) * (j + (ny + 1) * k); };

        mesh.vertices.reserve((nx + 1) * (ny + 1) * (nz + 1));
        for (int k = 0; k <= nz; ++k)
            for (int j = 0; j <= ny; ++j)
                for (int i = 0; i <= nx; ++i)
                    mesh.vertices.emplace_back(lo[0] + (hi[0] - lo[0]) * i / nx,
                                               lo[1] + (hi[1] - lo[1]) * j / ny,
                                               lo[2] + (hi[2] - lo[2]) * k / nz);

        static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
        mesh.tets.reserve(6 * nx * ny * nz);
        for (int k = 0; k < nz; ++k)
        {
            for (int j = 0; j < ny; ++j)
            {
                for (int i = 0; i < nx; ++i)
                {
                    for (const auto& p : perms)
                    {
                        int c[3] = {i, j, k};
                        std::array<int, 4> t{};
                        t[0] = id(c[0], c[1], c[2]);
                        for (int s = 0; s < 3; ++s)
                        {
                            ++c[p[s]];
                            t[s + 1] = id(c[0], c[1], c[2]);
                        }
                        mesh.tets.push_back(t);
                    }
                }
            }
        }

        mesh.finalize();
        return mesh;
    }

    TetMesh generate_bcc_box(const Vec3& lo, const Vec3& hi, int nx, int ny, int nz)
    {
        if (nx < 1 || ny < 1 || nz < 1)
            throw Error(ErrorCode::ConfigError, "grid subdivisions must be >= 1");

        const int n[3] = {nx, ny, nz};
        const Vec3 h((hi[0] - lo[0]) / nx, (hi[1] - lo[1]) / ny, (hi[2] - lo[2]) / nz);

        TetMesh mesh;
        auto corner = [&](int i, int j, int k) { return i + (nx + 1) * (j + (ny + 1) * k); };
        const int num_corners = (nx + 1) * (ny + 1) * (nz + 1);
        auto center = [&](int i, int j, int k) { return num_corners + i + nx * (j + ny * k); };

        mesh.vertices.reserve(num_corners + nx * ny * nz);
        for (int k = 0; k <= nz; ++k)
            for (int j = 0; j <= ny; ++j)
                for (int i = 0; i <= nx; ++i)
                    mesh.vertices.emplace_back(lo[0] + h[0] * i, lo[1] + h[1] * j, lo[2] + h[2] * k);
        for (int k = 0; k < nz; ++k)
            for (int j = 0; j < ny; ++j)
                for (int i = 0; i < nx; ++i)
                    mesh.vertices.emplace_back(lo[0] + h[0] * (i + 0.5), lo[1] + h[1] * (j + 0.5),
                                               lo[2] + h[2] * (k + 0.5));

        // Every face shared by two cells gives an octahedron (the two centres
        // plus the face's corners), split into four tets around the
        // centre-centre axis.
        for (int d = 0; d < 3; ++d)
        {
            const int e1 = (d + 1) % 3;
            const int e2 = (d + 2) % 3;
            for (int k = 0; k < nz; ++k)
            {
                for (int j = 0; j < ny; ++j)
                {
                    for (int i = 0; i < nx; ++i)
                    {
                        int c[3] = {i, j, k};
                        if (c[d] + 1 >= n[d])
                            continue;
                        const int a = center(c[0], c[1], c[2]);
                        int cn[3] = {c[0], c[1], c[2]};
                        ++cn[d];
                        const int b = center(cn[0], cn[1], cn[2]);

                        std::array<int, 4> q{};
                        const int offs[4][2] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
                        for (int r = 0; r < 4; ++r)
                        {
                            int v[3] = {c[0], c[1], c[2]};
                            ++v[d];
                            v[e1] += offs[r][0];
                            v[e2] += offs[r][1];
                            q[r] = corner(v[0], v[1], v[2]);
                        }
                        for (int r = 0; r < 4; ++r)
                            mesh.tets.push_back({a, b, q[r], q[(r + 1) % 4]});
                    }
                }
            }
        }

        mesh.finalize();
        return mesh;
    }

    TetMesh generate_unit_cube_tets(int n)
    {
        return generate_box_tets(Vec3::Zero(), Vec3::Ones(), n, n, n);
    }

    MeshMode parse_mesh_mode(const std::string& s)
    {
        if (s == "new" || s == "transformed")
            return MeshMode::Transformed;
        if (s == "old" || s == "physical")
            return MeshMode::Physical;
        throw Error(ErrorCode::ConfigError, "unknown mesh mode '" + s + "'");
    }

    namespace
    {
        struct Plane
        {
            Vec3 n;    // unit normal pointing inside
            double c;  // phi(x) = n.x + c
        };

        void split_pyramid(const std::array<int, 4>& q, int apex, std::vector<std::array<int, 4>>& out)
        {
            const int lo = static_cast<int>(std::min_element(q.begin(), q.end()) - q.begin());
            if (lo % 2 == 0)
            {
                out.push_back({q[0], q[1], q[2], apex});
                out.push_back({q[0], q[2], q[3], apex});
            }
            else
            {
                out.push_back({q[1], q[2], q[3], apex});
                out.push_back({q[1], q[3], q[0], apex});
            }
        }

        // Prism with triangles a, b and vertical edges a[i]-b[i]. Quad faces
        // are split along the diagonal through their smallest vertex id, so
        // neighbouring pieces stay conforming.
        void split_prism(std::array<int, 3> a, std::array<int, 3> b, std::vector<std::array<int, 4>>& out)
        {
            int lo = 0;
            int best = a[0];
            for (int i = 0; i < 3; ++i)
            {
                if (a[i] < best) { best = a[i]; lo = i; }
                if (b[i] < best) { best = b[i]; lo = i + 3; }
            }
            if (lo >= 3)
            {
                std::swap(a, b);
                lo -= 3;
            }
            std::rotate(a.begin(), a.begin() + lo, a.end());
            std::rotate(b.begin(), b.begin() + lo, b.end());

            const int v0 = a[0], v1 = a[1], v2 = a[2], v3 = b[0], v4 = b[1], v5 = b[2];
            if (std::min(v1, v5) < std::min(v2, v4))
            {
                out.push_back({v0, v1, v2, v5});
                out.push_back({v0, v1, v5, v4});
                out.push_back({v0, v4, v5, v3});
            }
            else
            {
                out.push_back({v0, v1, v2, v4});
                out.push_back({v0, v4, v2, v5});
                out.push_back({v0, v4, v5, v3});
            }
        }
    }

    namespace
    {
        TetMesh mesh_parallelepiped_in_frame(const Mat3& S, double spacing);

        double face_area(const Mat3& S, int i, int j)
        {
            return Vec3(S.col(i)).cross(Vec3(S.col(j))).norm();
        }
    }

    TetMesh mesh_parallelepiped(const Mat3& S, double spacing)
    {
        if (!(spacing > 0.0))
            throw Error(ErrorCode::ConfigError, "mesh spacing must be positive");

        // Rotate into the QR frame of a column permutation of S so that the
        // face pair spanned by the first two columns lies on lattice planes
        // (and a second pair too when the third column is orthogonal to the
        // first). Pick the permutation with the most aligned face area.
        std::array<int, 3> perm{0, 1, 2};
        std::array<int, 3> best_perm = perm;
        double best_score = -1.0;
        do
        {
            Mat3 Sp;
            for (int c = 0; c < 3; ++c)
                Sp.col(c) = S.col(perm[c]);
            const Mat3 R = Eigen::HouseholderQR<Mat3>(Sp).matrixQR().triangularView<Eigen::Upper>();
            double score = face_area(Sp, 0, 1);
            if (std::abs(R(1, 2)) <= 1e-12 * S.norm())
                score += face_area(Sp, 0, 2);
            if (score > best_score * (1.0 + 1e-12))
            {
                best_score = score;
                best_perm = perm;
            }
        } while (std::next_permutation(perm.begin(), perm.end()));

        Mat3 Sp;
        for (int c = 0; c < 3; ++c)
            Sp.col(c) = S.col(best_perm[c]);
        const Mat3 Q = Eigen::HouseholderQR<Mat3>(Sp).householderQ();

        TetMesh mesh = mesh_parallelepiped_in_frame(Q.transpose() * S, spacing);
        for (Vec3& x : mesh.vertices)
            x = Q * x;
        mesh.finalize();
        return mesh;
    }

    namespace
    {
    TetMesh mesh_parallelepiped_in_frame(const Mat3& S, double spacing)
    {

        const Mat3 S_inv = S.inverse();

        std::array<Plane, 6> planes;
        for (int j = 0; j < 3; ++j)
        {
            const Vec3 r = S_inv.row(j).transpose();
            const double len = r.norm();
            planes[2 * j] = {r / len, 0.0};
            planes[2 * j + 1] = {-r / len, 1.0 / len};
        }

        Vec3 lo = Vec3::Constant(1e300);
        Vec3 hi = Vec3::Constant(-1e300);
        for (int c = 0; c < 8; ++c)
        {
            const Vec3 corner = S * Vec3(c & 1, (c >> 1) & 1, (c >> 2) & 1);
            lo = lo.cwiseMin(corner);
            hi = hi.cwiseMax(corner);
        }

        int n[3];
        for (int d = 0; d < 3; ++d)
            n[d] = std::max(1, static_cast<int>(std::ceil((hi[d] - lo[d]) / spacing - 1e-9)));

        const double s = std::min({(hi[0] - lo[0]) / n[0], (hi[1] - lo[1]) / n[1], (hi[2] - lo[2]) / n[2]});
        // one padding layer so that every cell meeting the bounding box is
        // surrounded by neighbours and fully covered by lattice tets
        const Vec3 cell((hi[0] - lo[0]) / n[0], (hi[1] - lo[1]) / n[1], (hi[2] - lo[2]) / n[2]);
        TetMesh grid = generate_bcc_box(lo - cell, hi + cell, n[0] + 2, n[1] + 2, n[2] + 2);
        const double zero_tol = 1e-10 * s;

        std::vector<Vec3> pos = grid.vertices;
        std::vector<std::array<double, 6>> phi(pos.size());
        auto eval_phi = [&](const Vec3& x, std::array<double, 6>& out) {
            for (int j = 0; j < 6; ++j)
            {
                out[j] = planes[j].n.dot(x) + planes[j].c;
                if (std::abs(out[j]) <= zero_tol)
                    out[j] = 0.0;
            }
        };
        for (std::size_t v = 0; v < pos.size(); ++v)
            eval_phi(pos[v], phi[v]);

        // Snap vertices lying close to the boundary planes onto them (onto
        // edges/corners when several planes are close), as long as no live
        // incident tet degenerates.
        std::vector<std::vector<int>> incident(pos.size());
        for (std::size_t k = 0; k < grid.tets.size(); ++k)
            for (int v : grid.tets[k])
                incident[v].push_back(static_cast<int>(k));

        const double snap_dist = 0.3 * s;
        const double cell_volume = s * s * s / 12.0;
        auto live = [&](const std::array<int, 4>& t) {
            for (int j = 0; j < 6; ++j)
            {
                bool outside = true;
                for (int v : t)
                    outside = outside && phi[v][j] <= 0.0;
                if (outside)
                    return false;
            }
            return true;
        };
        auto signed_volume = [&](const std::array<int, 4>& t) {
            return tet_volume(pos[t[0]], pos[t[1]], pos[t[2]], pos[t[3]]);
        };

        for (std::size_t v = 0; v < pos.size(); ++v)
        {
            std::vector<int> active;
            for (int pair = 0; pair < 3; ++pair)
            {
                const double d0 = std::abs(phi[v][2 * pair]);
                const double d1 = std::abs(phi[v][2 * pair + 1]);
                const int j = d0 <= d1 ? 2 * pair : 2 * pair + 1;
                if (std::min(d0, d1) < snap_dist)
                    active.push_back(j);
            }
            if (active.empty())
                continue;

            Eigen::MatrixXd N(active.size(), 3);
            Eigen::VectorXd r(active.size());
            for (std::size_t a = 0; a < active.size(); ++a)
            {
                N.row(a) = planes[active[a]].n.transpose();
                r[a] = -phi[v][active[a]];
            }
            const Vec3 delta = N.completeOrthogonalDecomposition().solve(r);
            if (delta.norm() > 0.5 * s || delta.norm() == 0.0)
                continue;

            const Vec3 old_pos = pos[v];
            const auto old_phi = phi[v];
            pos[v] = old_pos + delta;
            eval_phi(pos[v], phi[v]);
            for (int j : active)
                phi[v][j] = 0.0;

            bool ok = true;
            for (int k : incident[v])
            {
                const auto& t = grid.tets[k];
                if (live(t) && signed_volume(t) < 0.1 * cell_volume)
                {
                    ok = false;
                    break;
                }
            }
            if (!ok)
            {
                pos[v] = old_pos;
                phi[v] = old_phi;
            }
        }

        // Clip by each plane in turn, keeping phi >= 0.
        std::vector<std::array<int, 4>> tets;
        for (const auto& t : grid.tets)
            if (live(t))
                tets.push_back(t);

        for (int j = 0; j < 6; ++j)
        {
            std::map<std::pair<int, int>, int> cuts;
            auto cut = [&](int p, int q) {
                const auto key = std::minmax(p, q);
                auto it = cuts.find(key);
                if (it != cuts.end())
                    return it->second;
                const double fp = phi[p][j];
                const double fq = phi[q][j];
                const double t = fp / (fp - fq);
                const Vec3 x = pos[p] + t * (pos[q] - pos[p]);
                const int id = static_cast<int>(pos.size());
                pos.push_back(x);
                std::array<double, 6> f{};
                eval_phi(x, f);
                f[j] = 0.0;
                phi.push_back(f);
                cuts.emplace(key, id);
                return id;
            };

            std::vector<std::array<int, 4>> next;
            next.reserve(tets.size());
            for (const auto& t : tets)
            {
                std::vector<int> P, Z, Nv;
                for (int v : t)
                {
                    if (phi[v][j] > 0.0)
                        P.push_back(v);
                    else if (phi[v][j] < 0.0)
                        Nv.push_back(v);
                    else
                        Z.push_back(v);
                }

                if (Nv.empty())
                {
                    next.push_back(t);
                    continue;
                }
                if (P.empty())
                    continue;

                if (P.size() == 1)
                {
                    std::array<int, 4> piece{};
                    int c = 0;
                    piece[c++] = P[0];
                    for (int z : Z)
                        piece[c++] = z;
                    for (int m : Nv)
                        piece[c++] = cut(P[0], m);
                    next.push_back(piece);
                }
                else if (P.size() == 2 && Nv.size() == 1)
                {
                    split_pyramid({P[0], P[1], cut(P[1], Nv[0]), cut(P[0], Nv[0])}, Z[0], next);
                }
                else if (P.size() == 2)
                {
                    split_prism({P[0], cut(P[0], Nv[0]), cut(P[0], Nv[1])},
                                {P[1], cut(P[1], Nv[0]), cut(P[1], Nv[1])}, next);
                }
                else
                {
                    split_prism({P[0], P[1], P[2]},
                                {cut(P[0], Nv[0]), cut(P[1], Nv[0]), cut(P[2], Nv[0])}, next);
                }
            }
            tets.swap(next);
        }

        TetMesh mesh;
        std::vector<int> remap(pos.size(), -1);
        for (auto& t : tets)
        {
            for (int& v : t)
            {
                if (remap[v] < 0)
                {
                    remap[v] = static_cast<int>(mesh.vertices.size());
                    mesh.vertices.push_back(pos[v]);
                }
                v = remap[v];
            }
        }
        mesh.tets = std::move(tets);
        mesh.finalize();
        return mesh;
    }

    }

    MeshPair mesh_pair_from(const TetMesh& base, const Mat3& S, MeshMode mode)
    {
        MeshPair pair;
        pair.S = S;
        pair.S_inv = S.inverse();
        pair.mode = mode;

        const Mat3& map = (mode == MeshMode::Transformed) ? pair.S_inv : pair.S;
        TetMesh image;
        image.tets = base.tets;
        image.vertices.reserve(base.vertices.size());
        for (const Vec3& x : base.vertices)
            image.vertices.push_back(map * x);
        image.finalize();

        TetMesh source;
        source.vertices = base.vertices;
        source.tets = image.tets;  // orientation may have been flipped
        source.finalize();

        if (mode == MeshMode::Transformed)
        {
            pair.hat = std::move(source);
            pair.phys = std::move(image);
        }
        else
        {
            pair.phys = std::move(source);
            pair.hat = std::move(image);
        }
        return pair;
    }

    MeshPair build_mesh_pair(const Mat3& S, MeshMode mode, double resolution)
    {
        if (!(resolution > 0.0))
            throw Error(ErrorCode::ConfigError, "mesh resolution must be positive");

        if (mode == MeshMode::Transformed)
            return mesh_pair_from(mesh_parallelepiped(S, resolution), S, mode);

        const int n = std::max(1, static_cast<int>(std::lround(1.0 / resolution)));
        return mesh_pair_from(generate_unit_cube_tets(n), S, mode);
    }

    TetMesh read_mesh(std::istream& in)
    {
        std::string magic, version;
        if (!(in >> magic >> version) || magic != "PWDG-MESH" || version != "1")
            throw Error(ErrorCode::MeshFormat, "missing 'PWDG-MESH 1' header");

        TetMesh mesh;
        std::size_t nv = 0;
        if (!(in >> nv))
            throw Error(ErrorCode::MeshFormat, "missing vertex count");
        mesh.vertices.resize(nv);
        for (std::size_t i = 0; i < nv; ++i)
        {
            std::string tag;
            Vec3& x = mesh.vertices[i];
            if (!(in >> tag >> x[0] >> x[1] >> x[2]) || tag != "v")
                throw Error(ErrorCode::MeshFormat, "bad vertex line " + std::to_string(i));
        }

        std::size_t nt = 0;
        if (!(in >> nt))
            throw Error(ErrorCode::MeshFormat, "missing tet count");
        mesh.tets.resize(nt);
        for (std::size_t i = 0; i < nt; ++i)
        {
            std::string tag;
            auto& t = mesh.tets[i];
            if (!(in >> tag >> t[0] >> t[1] >> t[2] >> t[3]) || tag != "t")
                throw Error(ErrorCode::MeshFormat, "bad tet line " + std::to_string(i));
            for (int v : t)
                if (v < 0 || static_cast<std::size_t>(v) >= nv)
                    throw Error(ErrorCode::MeshFormat, "vertex index out of range in tet " + std::to_string(i));
        }

        mesh.finalize();
        return mesh;
    }

    TetMesh read_mesh_file(const std::string& path)
    {
        std::ifstream in(path);
        if (!in)
            throw Error(ErrorCode::IoError, "cannot open " + path);
        return read_mesh(in);
    }

    void write_mesh(std::ostream& out, const TetMesh& mesh)
    {
        out << "PWDG-MESH 1\n" << mesh.vertices.size() << "\n";
        out.precision(17);
        for (const Vec3& x : mesh.vertices)
            out << "v " << x[0] << " " << x[1] << " " << x[2] << "\n";
        out << mesh.tets.size() << "\n";
        for (const auto& t : mesh.tets)
            out << "t " << t[0] << " " << t[1] << " " << t[2] << " " << t[3] << "\n";
    }

    GeometryReport geometry_diagnostics(const MeshPair& pair, double area_bound)
    {
        GeometryReport r;
        r.area_bound = area_bound;
        r.min_area_ratio = 1e300;
        for (std::size_t f = 0; f < pair.phys.faces.size(); ++f)
        {
            const double ratio = pair.phys.faces[f].area / pair.hat.faces[f].area;
            r.max_area_ratio = std::max(r.max_area_ratio, ratio);
            r.min_area_ratio = std::min(r.min_area_ratio, ratio);
        }
        r.area_bound_holds = r.max_area_ratio <= area_bound * (1.0 + 1e-12);

        r.h = pair.phys.h;
        r.hat_h = pair.hat.h;
        Eigen::JacobiSVD<Mat3> svd(pair.S_inv);
        r.scaled_ratio = r.hat_h * svd.singularValues()[0] / r.h;

        r.min_shape = 1e300;
        r.min_hat_volume = 1e300;
        const TetMesh& m = pair.hat;
        for (std::size_t k = 0; k < m.tets.size(); ++k)
        {
            const auto v = m.tet_vertices(k);
            double surface = 0.0;
            for (int skip = 0; skip < 4; ++skip)
            {
                std::array<Vec3, 3> tri;
                int c = 0;
                for (int i = 0; i < 4; ++i)
                    if (i != skip)
                        tri[c++] = v[i];
                surface += 0.5 * (tri[1] - tri[0]).cross(tri[2] - tri[0]).norm();
            }
            const double vol = m.volume(k);
            const double shape = m.element_diameter[k] * surface / (6.0 * vol);
            r.min_shape = std::min(r.min_shape, shape);
            r.max_shape = std::max(r.max_shape, shape);
            r.min_hat_volume = std::min(r.min_hat_volume, vol);
        }
        return r;
    }
}
