#include "pwdg/study.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "pwdg/anisotropy.hpp"
#include "pwdg/manufactured.hpp"
#include "pwdg/norms.hpp"

namespace pwdg
{
    namespace
    {
        std::string trim(const std::string& s)
        {
            const auto b = s.find_first_not_of(" \t\r\n");
            if (b == std::string::npos)
                return {};
            const auto e = s.find_last_not_of(" \t\r\n");
            return s.substr(b, e - b + 1);
        }

        std::vector<std::string> split_list(const std::string& s)
        {
            std::vector<std::string> out;
            std::string item;
            std::istringstream in(s);
            while (std::getline(in, item, ','))
            {
                item = trim(item);
                if (!item.empty())
                    out.push_back(item);
            }
            return out;
        }

        int parse_int(const std::string& s)
        {
            std::size_t used = 0;
            int v = 0;
            try
            {
                v = std::stoi(s, &used);
            }
            catch (const std::exception&)
            {
                throw Error(ErrorCode::ConfigError, "expected an integer, got '" + s + "'");
            }
            if (trim(s.substr(used)) != "")
                throw Error(ErrorCode::ConfigError, "expected an integer, got '" + s + "'");
            return v;
        }

        bool parse_bool(const std::string& s)
        {
            if (s == "true" || s == "1" || s == "yes" || s == "on")
                return true;
            if (s == "false" || s == "0" || s == "no" || s == "off")
                return false;
            throw Error(ErrorCode::ConfigError, "expected a boolean, got '" + s + "'");
        }

        Vec3 parse_vec3(const std::string& s)
        {
            const auto parts = split_list(s);
            if (parts.size() != 3)
                throw Error(ErrorCode::ConfigError, "expected three comma-separated numbers, got '" + s + "'");
            return Vec3(parse_number(parts[0]), parse_number(parts[1]), parse_number(parts[2]));
        }

        double seconds_since(std::chrono::steady_clock::time_point t0)
        {
            return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        }
    }

    double parse_number(const std::string& raw)
    {
        std::string s = trim(raw);
        double factor = 1.0;
        if (s.size() >= 2 && s.compare(s.size() - 2, 2, "pi") == 0)
        {
            factor = std::numbers::pi;
            s = trim(s.substr(0, s.size() - 2));
            if (!s.empty() && s.back() == '*')
                s = trim(s.substr(0, s.size() - 1));
            if (s.empty())
                return factor;
        }
        std::size_t used = 0;
        double v = 0.0;
        try
        {
            v = std::stod(s, &used);
        }
        catch (const std::exception&)
        {
            throw Error(ErrorCode::ConfigError, "expected a number, got '" + raw + "'");
        }
        if (trim(s.substr(used)) != "")
            throw Error(ErrorCode::ConfigError, "expected a number, got '" + raw + "'");
        return v * factor;
    }

    void apply_setting(StudyConfig& c, const std::string& key, const std::string& value)
    {
        const std::string v = trim(value);
        if (key == "equation")
        {
            if (v == "helmholtz")
                c.equation = Equation::Helmholtz;
            else if (v == "maxwell")
                c.equation = Equation::Maxwell;
            else
                throw Error(ErrorCode::ConfigError, "unknown equation '" + v + "'");
        }
        else if (key == "study")
        {
            if (v == "single")
                c.study = StudyKind::Single;
            else if (v == "p_sweep")
                c.study = StudyKind::PSweep;
            else if (v == "rho_sweep")
                c.study = StudyKind::RhoSweep;
            else if (v == "omega_sweep")
                c.study = StudyKind::OmegaSweep;
            else
                throw Error(ErrorCode::ConfigError, "unknown study '" + v + "'");
        }
        else if (key == "tensor" || key == "A")
            c.tensor = v;
        else if (key == "rho")
            c.rho = parse_number(v);
        else if (key == "rho_list")
        {
            c.rho_list.clear();
            for (const auto& s : split_list(v))
                c.rho_list.push_back(parse_number(s));
        }
        else if (key == "omega")
            c.omega = parse_number(v);
        else if (key == "omega_list")
        {
            c.omega_list.clear();
            for (const auto& s : split_list(v))
                c.omega_list.push_back(parse_number(s));
        }
        else if (key == "m")
            c.m = parse_int(v);
        else if (key == "m_list")
        {
            c.m_list.clear();
            for (const auto& s : split_list(v))
                c.m_list.push_back(parse_int(s));
        }
        else if (key == "mesh_mode")
            c.mesh_mode = parse_mesh_mode(v);
        else if (key == "hat_spacing")
            c.hat_spacing = parse_number(v);
        else if (key == "n")
            c.n = parse_int(v);
        else if (key == "omega_h")
            c.omega_h = parse_number(v);
        else if (key == "target_elements")
            c.target_elements = parse_int(v);
        else if (key == "mesh_file")
            c.mesh_file = v;
        else if (key == "alpha")
            c.flux.alpha = parse_number(v);
        else if (key == "beta")
            c.flux.beta = parse_number(v);
        else if (key == "delta")
            c.flux.delta = parse_number(v);
        else if (key == "theta")
            c.flux.theta = parse_number(v);
        else if (key == "directions")
        {
            if (v == "fibonacci")
                c.directions = DirectionScheme::Fibonacci;
            else if (v == "file")
                c.directions = DirectionScheme::FromFile;
            else
                throw Error(ErrorCode::ConfigError, "unknown direction scheme '" + v + "'");
        }
        else if (key == "directions_file")
        {
            c.directions_file = v;
            c.directions = DirectionScheme::FromFile;
        }
        else if (key == "anchor")
        {
            if (v == "global")
                c.anchor = Anchor::Global;
            else if (v == "centroid")
                c.anchor = Anchor::Centroid;
            else
                throw Error(ErrorCode::ConfigError, "unknown anchor '" + v + "'");
        }
        else if (key == "quad_order")
            c.quad_order = parse_int(v);
        else if (key == "solver")
            c.solver = parse_solve_method(v);
        else if (key == "direct_limit")
            c.direct_limit = parse_int(v);
        else if (key == "direct_nnz_limit")
            c.direct_nnz_limit = parse_int(v);
        else if (key == "slabs")
            c.slabs = parse_int(v);
        else if (key == "gmres_restart")
            c.gmres_restart = parse_int(v);
        else if (key == "gmres_tolerance")
            c.gmres_tolerance = parse_number(v);
        else if (key == "estimate_condition")
            c.estimate_condition = parse_bool(v);
        else if (key == "record_timings")
            c.record_timings = parse_bool(v);
        else if (key == "deterministic")
            c.deterministic = parse_bool(v);
        else if (key == "seed")
            c.seed = static_cast<unsigned long>(parse_int(v));
        else if (key == "solution")
        {
            if (v == "point_source")
                c.solution = SolutionKind::PointSource;
            else if (v == "dipole")
                c.solution = SolutionKind::Dipole;
            else if (v == "plane_wave")
                c.solution = SolutionKind::PlaneWave;
            else
                throw Error(ErrorCode::ConfigError, "unknown solution '" + v + "'");
        }
        else if (key == "x0")
            c.x0 = parse_vec3(v);
        else if (key == "polarization")
            c.polarization = parse_vec3(v).normalized();
        else if (key == "current")
            c.current = parse_number(v);
        else if (key == "eps_r")
            c.eps_r = parse_number(v);
        else if (key == "mu_r")
            c.mu_r = parse_number(v);
        else if (key == "plane_wave_index")
            c.plane_wave_index = parse_int(v);
        else if (key == "out")
            c.out = v;
        else if (key == "export_mesh")
            c.export_mesh = v;
        else if (key == "export_matrix")
            c.export_matrix = v;
        else
            throw Error(ErrorCode::ConfigError, "unknown config key '" + key + "'");
    }

    StudyConfig parse_config(std::istream& in)
    {
        StudyConfig c;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line))
        {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos)
                line.erase(hash);
            line = trim(line);
            if (line.empty())
                continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw Error(ErrorCode::ConfigError, "line " + std::to_string(lineno) + ": expected key = value");
            apply_setting(c, trim(line.substr(0, eq)), line.substr(eq + 1));
        }
        return c;
    }

    StudyConfig parse_config_file(const std::string& path)
    {
        std::ifstream in(path);
        if (!in)
            throw Error(ErrorCode::IoError, "cannot open config " + path);
        return parse_config(in);
    }

    void StudyConfig::validate() const
    {
        flux.validate();
        if (omega < 0.0)
            throw Error(ErrorCode::ConfigError, "omega must be positive");
        if (m < 1)
            throw Error(ErrorCode::ConfigError, "m must be >= 1");
        if (!(rho >= 1.0))
            throw Error(ErrorCode::ConfigError, "rho must be >= 1");
        if (hat_spacing < 0.0 || n < 0 || omega_h < 0.0 || target_elements < 0)
            throw Error(ErrorCode::ConfigError, "mesh resolution parameters must be positive");
        if (direct_limit < 0 || direct_nnz_limit < 0 || slabs < 0 || gmres_restart < 1 || !(gmres_tolerance > 0.0))
            throw Error(ErrorCode::ConfigError, "solver parameters out of range");
        if (!(eps_r > 0.0) || !(mu_r > 0.0))
            throw Error(ErrorCode::ConfigError, "eps_r and mu_r must be positive");
        if (directions == DirectionScheme::FromFile && directions_file.empty())
            throw Error(ErrorCode::ConfigError, "directions = file needs directions_file");
        if (study == StudyKind::PSweep && m_list.empty())
            throw Error(ErrorCode::ConfigError, "p_sweep needs m_list");
        if (study == StudyKind::RhoSweep && rho_list.empty())
            throw Error(ErrorCode::ConfigError, "rho_sweep needs rho_list");
        if (study == StudyKind::OmegaSweep && omega_list.empty())
            throw Error(ErrorCode::ConfigError, "omega_sweep needs omega_list");
        if (equation == Equation::Helmholtz && solution == SolutionKind::Dipole)
            throw Error(ErrorCode::ConfigError, "the dipole solution is for maxwell");
        if (equation == Equation::Maxwell && solution == SolutionKind::PointSource)
            throw Error(ErrorCode::ConfigError, "the point source solution is for helmholtz");
        for (double r : rho_list)
            if (!(r >= 1.0))
                throw Error(ErrorCode::ConfigError, "rho values must be >= 1");
        for (double w : omega_list)
            if (!(w > 0.0))
                throw Error(ErrorCode::ConfigError, "omega values must be positive");
        for (int mm : m_list)
            if (mm < 1)
                throw Error(ErrorCode::ConfigError, "m values must be >= 1");
    }

    MeshPair make_mesh_pair(const StudyConfig& c, const Mat3& S, double omega)
    {
        if (!c.mesh_file.empty())
            return mesh_pair_from(read_mesh_file(c.mesh_file), S, c.mesh_mode);

        if (c.mesh_mode == MeshMode::Physical)
        {
            int n = c.n > 0 ? c.n : 4;
            if (c.omega_h > 0.0)
                n = static_cast<int>(std::ceil(std::sqrt(3.0) * omega / c.omega_h - 1e-9));
            if (c.target_elements > 0)
                n = std::max(1, static_cast<int>(std::lround(std::cbrt(c.target_elements / 6.0))));
            return mesh_pair_from(generate_unit_cube_tets(n), S, MeshMode::Physical);
        }

        double s = c.hat_spacing > 0.0 ? c.hat_spacing : 1.0 / (c.n > 0 ? c.n : 4);
        if (c.omega_h > 0.0)
            s = c.omega_h / omega;
        if (c.target_elements > 0)
        {
            // elements scale like spacing^-3; a few secant-like corrections
            s = std::cbrt(12.0 * std::abs(S.determinant()) / c.target_elements);
            TetMesh best;
            double best_gap = 1e300;
            for (int it = 0; it < 6; ++it)
            {
                TetMesh mesh = mesh_parallelepiped(S, s);
                const double ratio = static_cast<double>(mesh.num_elements()) / c.target_elements;
                const double gap = std::abs(std::log(ratio));
                if (gap < best_gap)
                {
                    best_gap = gap;
                    best = std::move(mesh);
                }
                if (gap < 0.03)
                    break;
                s *= std::cbrt(ratio);
            }
            return mesh_pair_from(best, S, MeshMode::Transformed);
        }
        return build_mesh_pair(S, MeshMode::Transformed, s);
    }

    StudyRow run_single(const StudyConfig& c, double rho, double omega, int m, double sweep_value)
    {
        StudyRow row;
        row.sweep = sweep_value;
        const int p = (m + 1) * (m + 1);
        row.p = p;

        try
        {
            std::string tensor_text = c.tensor;
            if (tensor_text.empty() || c.study == StudyKind::RhoSweep)
            {
                std::ostringstream t;
                t.precision(17);
                t << (c.equation == Equation::Helmholtz ? "paper41(" : "paper42(") << rho << ")";
                tensor_text = t.str();
            }
            const AnisotropicTensor A = parse_tensor(tensor_text);
            const SpectralFactorization f = factorize(A);
            const DirectionSet dirs = generate_directions(m, c.directions, c.directions_file);

            const auto t0 = std::chrono::steady_clock::now();

            MeshPair pair;
            TrefftzSpace space;
            TraceFunction exact;
            double wave_number = omega;

            if (c.equation == Equation::Helmholtz)
            {
                const HelmholtzTransform T = helmholtz_transform(f);
                pair = make_mesh_pair(c, T.S, omega);
                const HelmholtzBasis basis = make_helmholtz_basis(omega, T, A.entries(), dirs);
                space = helmholtz_space(basis, pair.phys, c.anchor);
                if (c.solution == SolutionKind::PlaneWave)
                    exact = plane_wave_solution(space, static_cast<std::size_t>(c.plane_wave_index) % space.per_element());
                else
                {
                    auto src = std::make_shared<PointSourceSolution>(c.x0, omega, T.S, A.entries());
                    exact = [src](const Vec3& x) { return src->trace(x); };
                }
            }
            else
            {
                const MaxwellTransform T = maxwell_transform(f);
                pair = make_mesh_pair(c, T.S, omega);
                const MaxwellBasis basis = make_maxwell_basis(omega, c.eps_r, c.mu_r, T, A.entries(), dirs);
                space = maxwell_space(basis, pair.phys, c.anchor);
                wave_number = basis.kappa;
                if (c.solution == SolutionKind::PlaneWave)
                    exact = plane_wave_solution(space, static_cast<std::size_t>(c.plane_wave_index) % space.per_element());
                else
                {
                    DipoleParams dp;
                    dp.x0 = c.x0;
                    dp.a = c.polarization;
                    dp.current = c.current;
                    dp.omega = omega;
                    dp.eps_r = c.eps_r;
                    dp.mu_r = c.mu_r;
                    auto dip = std::make_shared<DipoleSolution>(dp, T.S, T.G);
                    exact = [dip](const Vec3& x) { return dip->trace(x); };
                }
            }

            row.elements = static_cast<long>(pair.num_elements());
            row.dofs = static_cast<long>(pair.num_elements() * space.per_element());

            if (!c.export_mesh.empty())
            {
                std::ofstream out(c.export_mesh);
                if (!out)
                    throw Error(ErrorCode::IoError, "cannot write " + c.export_mesh);
                write_mesh(out, c.mesh_mode == MeshMode::Transformed ? pair.hat : pair.phys);
            }

            const GlobalSystem sys =
                assemble(pair.phys, space, c.flux, boundary_data(c.equation, omega, c.flux.theta, exact));
            row.t_assemble_s = seconds_since(t0);

            if (!c.export_matrix.empty())
            {
                std::ofstream out(c.export_matrix);
                if (!out)
                    throw Error(ErrorCode::IoError, "cannot write " + c.export_matrix);
                export_triplets(out, sys.matrix);
            }

            const auto t1 = std::chrono::steady_clock::now();
            const long nnz = static_cast<long>(sys.matrix.nonZeros());
            const bool iterative = c.solver == SolveMethod::Gmres
                || (c.solver == SolveMethod::Auto && (row.dofs > c.direct_limit || nnz > c.direct_nnz_limit));
            Solution sol;
            if (iterative)
            {
                std::vector<Vec3> centroids(pair.phys.num_elements());
                for (std::size_t k = 0; k < centroids.size(); ++k)
                    centroids[k] = pair.phys.centroid(k);
                const long by_size = std::max((row.dofs + 41999) / 42000, (nnz + 5499999) / 5500000);
                const int slabs = c.slabs > 0 ? c.slabs : static_cast<int>(std::max(2L, by_size));
                IterativeOptions opts;
                opts.restart = c.gmres_restart;
                opts.tolerance = c.gmres_tolerance;
                sol = solve_gmres(sys.matrix, sys.rhs, slab_partition(centroids, space.per_element(), slabs), opts);
            }
            else
                sol = solve(sys, c.solver, c.estimate_condition);
            row.t_solve_s = seconds_since(t1);
            row.cond_est = sol.cond_estimate;
            row.warnings = sol.warnings;

            row.l2_rel_err = l2_relative_error(pair, space, sol.coefficients, exact, wave_number, c.quad_order);
            row.skel_err = skeleton_error(pair.phys, space, c.flux, sol.coefficients, exact).relative();
        }
        catch (const Error& e)
        {
            row.error = e.code();
            row.message = e.what();
        }
        catch (const std::bad_alloc&)
        {
            row.error = ErrorCode::SingularSystem;
            row.message = "out of memory";
        }

        if (!c.record_timings)
        {
            row.t_assemble_s = 0.0;
            row.t_solve_s = 0.0;
        }
        return row;
    }

    bool StudyReport::all_ok() const
    {
        for (const auto& r : rows)
            if (r.error)
                return false;
        return true;
    }

    StudyReport run_study(const StudyConfig& c)
    {
        c.validate();
        const double default_omega = c.equation == Equation::Helmholtz ? 4.0 * std::numbers::pi : 2.0 * std::numbers::pi;
        const double omega = c.omega > 0.0 ? c.omega : default_omega;

        StudyReport report;
        switch (c.study)
        {
        case StudyKind::Single:
            report.rows.push_back(run_single(c, c.rho, omega, c.m, c.rho));
            break;
        case StudyKind::PSweep:
            for (int m : c.m_list)
                report.rows.push_back(run_single(c, c.rho, omega, m, m));
            break;
        case StudyKind::RhoSweep:
            for (double r : c.rho_list)
                report.rows.push_back(run_single(c, r, omega, c.m, r));
            break;
        case StudyKind::OmegaSweep:
            for (double w : c.omega_list)
                report.rows.push_back(run_single(c, c.rho, w, c.m, w));
            break;
        }
        return report;
    }

    namespace
    {
        std::string sci(double v)
        {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.5e", v);
            return buf;
        }
    }

    void emit_csv(const StudyReport& report, std::ostream& out)
    {
        out << "sweep,p,elements,dofs,l2_rel_err,skel_err,cond_est,t_assemble_s,t_solve_s\n";
        for (const auto& r : report.rows)
        {
            out << sci(r.sweep) << "," << r.p << "," << r.elements << "," << r.dofs << ",";
            if (r.error)
                out << "ERR:" << to_string(*r.error) << ",,,,\n";
            else
                out << sci(r.l2_rel_err) << "," << sci(r.skel_err) << ","
                    << (r.cond_est ? sci(*r.cond_est) : std::string("nan")) << "," << sci(r.t_assemble_s) << ","
                    << sci(r.t_solve_s) << "\n";
        }
    }

    void emit_csv(const StudyReport& report, const std::string& path)
    {
        std::ofstream out(path);
        if (!out)
            throw Error(ErrorCode::IoError, "cannot write " + path);
        emit_csv(report, out);
        if (!out)
            throw Error(ErrorCode::IoError, "write to " + path + " failed");
    }
}
