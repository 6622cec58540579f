#ifndef PWDG_STUDY_HPP
#define PWDG_STUDY_HPP

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pwdg/assembly.hpp"
#include "pwdg/mesh.hpp"
#include "pwdg/planewave.hpp"
#include "pwdg/solver.hpp"

namespace pwdg
{
    enum class StudyKind
    {
        Single,
        PSweep,
        RhoSweep,
        OmegaSweep
    };

    enum class SolutionKind
    {
        PointSource,
        Dipole,
        PlaneWave
    };

    struct StudyConfig
    {
        Equation equation = Equation::Helmholtz;
        StudyKind study = StudyKind::Single;

        std::string tensor;             // explicit entries or preset; empty -> preset from rho
        double rho = 4.0;
        std::vector<double> rho_list;

        double omega = 0.0;             // 0 -> 4 pi (Helmholtz) or 2 pi (Maxwell)
        std::vector<double> omega_list;

        int m = 4;
        std::vector<int> m_list;

        MeshMode mesh_mode = MeshMode::Transformed;
        double hat_spacing = 0.0;       // Transformed mode grid spacing
        int n = 0;                      // Physical mode subdivisions (also 1/n spacing if hat_spacing unset)
        double omega_h = 0.0;           // if > 0: omega * (lattice spacing) in new mode, omega * sqrt(3)/n in old mode
        long target_elements = 0;       // if > 0: choose the mesh resolution to approach this count
        std::string mesh_file;

        FluxParams flux;
        DirectionScheme directions = DirectionScheme::Fibonacci;
        std::string directions_file;
        Anchor anchor = Anchor::Global;
        int quad_order = 11;
        SolveMethod solver = SolveMethod::Auto;
        long direct_limit = 100000;     // Auto: largest system solved by direct LU
        long direct_nnz_limit = 16000000;  // Auto: and largest number of nonzeros
        int slabs = 0;                  // Gmres blocks; 0 -> at most 42000 unknowns and 5.5e6 nonzeros each
        int gmres_restart = 150;
        double gmres_tolerance = 1e-10;
        bool estimate_condition = true;
        bool record_timings = true;
        bool deterministic = true;
        unsigned long seed = 1;

        SolutionKind solution = SolutionKind::PointSource;
        Vec3 x0 = Vec3::Constant(-0.6);
        Vec3 polarization = Vec3::UnitZ();
        double current = 1.0;
        double eps_r = 1.0;
        double mu_r = 1.0;
        int plane_wave_index = 0;

        std::string out;
        std::string export_mesh;
        std::string export_matrix;

        void validate() const;
    };

    // key = value lines, '#' comments. Unknown keys are a ConfigError.
    StudyConfig parse_config(std::istream& in);
    StudyConfig parse_config_file(const std::string& path);
    void apply_setting(StudyConfig& c, const std::string& key, const std::string& value);

    // Numbers may be written as "4pi", "4*pi" or "pi".
    double parse_number(const std::string& s);

    struct StudyRow
    {
        double sweep = 0.0;
        int p = 0;
        long elements = 0;
        long dofs = 0;
        double l2_rel_err = 0.0;
        double skel_err = 0.0;
        std::optional<double> cond_est;
        double t_assemble_s = 0.0;
        double t_solve_s = 0.0;
        std::optional<ErrorCode> error;
        std::string message;
        std::vector<std::string> warnings;
    };

    struct StudyReport
    {
        std::vector<StudyRow> rows;
        bool all_ok() const;
    };

    // One full pipeline run (transform, mesh, basis, assemble, solve, errors)
    // for the parameters of `c` with the given overrides.
    StudyRow run_single(const StudyConfig& c, double rho, double omega, int m, double sweep_value);

    StudyReport run_study(const StudyConfig& c);

    void emit_csv(const StudyReport& report, std::ostream& out);
    void emit_csv(const StudyReport& report, const std::string& path);

    // Resolution helpers exposed for the acceptance tests.
    MeshPair make_mesh_pair(const StudyConfig& c, const Mat3& S, double omega);
}

#endif
