#ifndef PWDG_MESH_HPP
#define PWDG_MESH_HPP

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "pwdg/types.hpp"

namespace pwdg
{
    struct Face
    {
        std::array<int, 3> v{};
        int left = -1;   // smaller element index
        int right = -1;  // -1 on the boundary
        Vec3 normal;     // unit, outward from `left`
        double area = 0.0;

        bool boundary() const { return right < 0; }
    };

    struct TetMesh
    {
        std::vector<Vec3> vertices;
        std::vector<std::array<int, 4>> tets;
        std::vector<Face> faces;
        std::vector<double> element_diameter;
        double h = 0.0;

        std::size_t num_elements() const { return tets.size(); }

        std::array<Vec3, 4> tet_vertices(std::size_t k) const;
        Vec3 centroid(std::size_t k) const;
        double volume(std::size_t k) const;
        std::array<Vec3, 3> face_vertices(const Face& f) const;

        // Flips tets with negative signed volume, builds faces and diameters.
        void finalize();
    };

    // Face list of a mesh from its tets; throws NonManifold if a triangle is
    // shared by more than two tets.
    std::vector<Face> skeleton(const TetMesh& mesh);

    // Kuhn subdivision of an nx x ny x nz grid on [0,1]^3 (6 tets per cube).
    TetMesh generate_unit_cube_tets(int n);
    TetMesh generate_box_tets(const Vec3& lo, const Vec3& hi, int nx, int ny, int nz);

    // Body-centred cubic lattice: cell corners plus cell centres, 12 tets per
    // interior cell. Only faces shared by two cells are filled, so the
    // outermost half-layer of cells is not covered.
    TetMesh generate_bcc_box(const Vec3& lo, const Vec3& hi, int nx, int ny, int nz);

    enum class MeshMode
    {
        Transformed,  // mesh the image domain, pull back ("new")
        Physical      // mesh the unit cube, push forward ("old")
    };

    MeshMode parse_mesh_mode(const std::string& s);

    struct MeshPair
    {
        TetMesh hat;
        TetMesh phys;
        Mat3 S = Mat3::Identity();
        Mat3 S_inv = Mat3::Identity();
        MeshMode mode = MeshMode::Transformed;

        std::size_t num_elements() const { return phys.num_elements(); }
    };

    // Mesh of the image domain S([0,1]^3) with target grid spacing `spacing`:
    // a BCC lattice over its bounding box, snapped towards and clipped by the
    // six bounding planes. Unclipped lattice tets have diameter `spacing`.
    TetMesh mesh_parallelepiped(const Mat3& S, double spacing);

    // Transformed mode: `resolution` is the hat-grid spacing.
    // Physical mode: the unit cube is split into n^3 cubes with n = round(1/resolution).
    MeshPair build_mesh_pair(const Mat3& S, MeshMode mode, double resolution);

    // Builds the pair from an existing hat mesh (Transformed) or physical mesh
    // (Physical), mapping vertices by S^{-1} or S respectively.
    MeshPair mesh_pair_from(const TetMesh& base, const Mat3& S, MeshMode mode);

    // "PWDG-MESH 1" ascii format
    TetMesh read_mesh(std::istream& in);
    TetMesh read_mesh_file(const std::string& path);
    void write_mesh(std::ostream& out, const TetMesh& mesh);

    struct GeometryReport
    {
        double max_area_ratio = 0.0;   // max |Gamma| / |Gamma_hat|
        double min_area_ratio = 0.0;
        double area_bound = 0.0;       // bound for the ratio above
        bool area_bound_holds = false;
        double h = 0.0;
        double hat_h = 0.0;
        double scaled_ratio = 0.0;     // hat_h * ||S^{-1}|| / h
        double min_shape = 0.0;        // min over hat tets of diam / (2 * inradius)
        double max_shape = 0.0;
        double min_hat_volume = 0.0;
    };

    // `area_bound` is the face-area ratio bound for the transform of the pair;
    // scaled_ratio uses ||S^{-1}||, i.e. ||Lambda^{1/2}|| or ||M^{-1}||.
    GeometryReport geometry_diagnostics(const MeshPair& pair, double area_bound);
}

#endif
