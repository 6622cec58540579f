#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "pwdg/study.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Plane-wave DG study driver for anisotropic Helmholtz and Maxwell problems"};

    std::string config_path;
    std::string omega, rho, m, n, mesh_mode, equation, study, out, directions_file;
    std::string export_mesh, export_matrix;
    std::vector<std::string> sets;

    app.add_option("--config", config_path, "key = value config file");
    app.add_option("--omega", omega, "angular frequency (accepts 4pi, 4*pi)");
    app.add_option("--rho", rho, "anisotropy ratio for the preset tensors");
    app.add_option("--m", m, "direction parameter, p = (m+1)^2");
    app.add_option("--n", n, "mesh subdivisions");
    app.add_option("--mesh-mode", mesh_mode, "new | old");
    app.add_option("--equation", equation, "helmholtz | maxwell");
    app.add_option("--study", study, "single | p_sweep | rho_sweep | omega_sweep");
    app.add_option("--out", out, "CSV output path (stdout if omitted)");
    app.add_option("--directions-file", directions_file, "file with p unit directions");
    app.add_option("--export-mesh", export_mesh, "write the meshed domain");
    app.add_option("--export-matrix", export_matrix, "write the system matrix as triplets");
    app.add_option("--set", sets, "extra key=value override (repeatable)");

    CLI11_PARSE(app, argc, argv);

    pwdg::StudyConfig config;
    try
    {
        if (!config_path.empty())
            config = pwdg::parse_config_file(config_path);

        const std::pair<const char*, const std::string*> overrides[] = {
            {"omega", &omega},         {"rho", &rho},         {"m", &m},
            {"n", &n},                 {"mesh_mode", &mesh_mode}, {"equation", &equation},
            {"study", &study},         {"out", &out},         {"directions_file", &directions_file},
            {"export_mesh", &export_mesh}, {"export_matrix", &export_matrix},
        };
        for (const auto& [key, value] : overrides)
            if (!value->empty())
                pwdg::apply_setting(config, key, *value);
        for (const auto& s : sets)
        {
            const auto eq = s.find('=');
            if (eq == std::string::npos)
                throw pwdg::Error(pwdg::ErrorCode::ConfigError, "--set expects key=value, got '" + s + "'");
            pwdg::apply_setting(config, s.substr(0, eq), s.substr(eq + 1));
        }
        config.validate();
    }
    catch (const pwdg::Error& e)
    {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    }

    const pwdg::StudyReport report = pwdg::run_study(config);

    try
    {
        if (config.out.empty())
            pwdg::emit_csv(report, std::cout);
        else
            pwdg::emit_csv(report, config.out);
    }
    catch (const pwdg::Error& e)
    {
        std::cerr << e.what() << "\n";
        return 1;
    }

    for (const auto& row : report.rows)
    {
        if (row.error)
            std::cerr << "row " << row.sweep << ": " << row.message << "\n";
        for (const auto& w : row.warnings)
            std::cerr << "row " << row.sweep << ": warning: " << w << "\n";
    }
    return report.all_ok() ? 0 : 2;
}
