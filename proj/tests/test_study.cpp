#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "pwdg/study.hpp"

using namespace pwdg;

namespace
{
    std::vector<std::string> lines_of(const std::string& text)
    {
        std::vector<std::string> out;
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line))
            out.push_back(line);
        return out;
    }

    std::size_t columns(const std::string& line)
    {
        return static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
    }

    std::string temp_path(const std::string& name)
    {
        return std::string(P_tmpdir) + "/pwdg_study_test_" + name;
    }

    int run_cli(const std::string& args)
    {
        const std::string cmd = std::string(PWDG_STUDY_BINARY) + " " + args + " > /dev/null 2>&1";
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }
}

TEST_CASE("number parsing")
{
    CHECK(parse_number("pi") == doctest::Approx(std::numbers::pi));
    CHECK(parse_number("4pi") == doctest::Approx(4.0 * std::numbers::pi));
    CHECK(parse_number(" 4*pi ") == doctest::Approx(4.0 * std::numbers::pi));
    CHECK(parse_number("2.5") == 2.5);
    CHECK(parse_number("1e-3") == 1e-3);
    CHECK_THROWS_AS(parse_number("four"), Error);
    CHECK_THROWS_AS(parse_number("4x"), Error);
}

TEST_CASE("config parsing")
{
    std::istringstream in("# comment\n"
                          "equation = maxwell\n"
                          "study = rho_sweep   # trailing comment\n"
                          "rho_list = 1, 4, 16\n"
                          "omega = 2pi\n"
                          "m = 3\n"
                          "mesh_mode = old\n"
                          "n = 2\n"
                          "solution = plane_wave\n"
                          "delta = 0.25\n");
    const StudyConfig c = parse_config(in);
    CHECK(c.equation == Equation::Maxwell);
    CHECK(c.study == StudyKind::RhoSweep);
    CHECK(c.rho_list == std::vector<double>{1.0, 4.0, 16.0});
    CHECK(c.omega == doctest::Approx(2.0 * std::numbers::pi));
    CHECK(c.m == 3);
    CHECK(c.mesh_mode == MeshMode::Physical);
    CHECK(c.n == 2);
    CHECK(c.solution == SolutionKind::PlaneWave);
    CHECK(c.flux.delta == 0.25);
    CHECK_NOTHROW(c.validate());

    auto code_of = [](const std::string& text) {
        try
        {
            std::istringstream s(text);
            parse_config(s).validate();
        }
        catch (const Error& e)
        {
            return e.code();
        }
        return ErrorCode::IoError;  // sentinel: nothing thrown
    };
    CHECK(code_of("colour = blue\n") == ErrorCode::ConfigError);
    CHECK(code_of("m\n") == ErrorCode::ConfigError);
    CHECK(code_of("m = 0\n") == ErrorCode::ConfigError);
    CHECK(code_of("rho = 0.5\n") == ErrorCode::ConfigError);
    CHECK(code_of("study = p_sweep\n") == ErrorCode::ConfigError);
    CHECK(code_of("equation = maxwell\n") == ErrorCode::ConfigError);  // point source is Helmholtz only
    CHECK(code_of("delta = 0.7\n") == ErrorCode::ConfigError);
}

TEST_CASE("CSV output")
{
    StudyReport empty;
    std::ostringstream e;
    emit_csv(empty, e);
    const auto header = lines_of(e.str());
    REQUIRE(header.size() == 1);
    CHECK(header[0] == "sweep,p,elements,dofs,l2_rel_err,skel_err,cond_est,t_assemble_s,t_solve_s");

    StudyReport report;
    StudyRow ok;
    ok.sweep = 4.0;
    ok.p = 25;
    ok.elements = 48;
    ok.dofs = 1200;
    ok.l2_rel_err = 1.25e-3;
    ok.skel_err = 2.5e-3;
    ok.cond_est = 1e6;
    StudyRow bad;
    bad.sweep = 8.0;
    bad.p = 25;
    bad.error = ErrorCode::SingularSystem;
    report.rows = {ok, bad};
    CHECK_FALSE(report.all_ok());

    std::ostringstream out;
    emit_csv(report, out);
    const auto lines = lines_of(out.str());
    REQUIRE(lines.size() == 3);
    CHECK(columns(lines[1]) == 9);
    CHECK(columns(lines[2]) == 9);

    std::istringstream row(lines[1]);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(row, cell, ','))
        cells.push_back(cell);
    REQUIRE(cells.size() == 9);
    CHECK(std::stod(cells[0]) == 4.0);
    CHECK(std::stoi(cells[1]) == 25);
    CHECK(std::stol(cells[3]) == 1200);
    CHECK(std::stod(cells[4]) == doctest::Approx(1.25e-3));
    CHECK(std::stod(cells[6]) == doctest::Approx(1e6));
    CHECK(lines[2].find(",ERR:") != std::string::npos);
}

TEST_CASE("single run reproduces an in-space plane wave")
{
    for (Equation eq : {Equation::Helmholtz, Equation::Maxwell})
    {
        StudyConfig c;
        c.equation = eq;
        c.solution = SolutionKind::PlaneWave;
        c.plane_wave_index = 3;
        c.m = 2;
        c.mesh_mode = MeshMode::Physical;
        c.n = 2;
        c.rho = 4.0;
        const StudyReport r = run_study(c);
        REQUIRE(r.rows.size() == 1);
        const StudyRow& row = r.rows[0];
        REQUIRE_FALSE(row.error.has_value());
        CHECK(row.p == 9);
        CHECK(row.elements == 48);
        const long per_element = eq == Equation::Maxwell ? 2L * row.p : row.p;
        CHECK(row.dofs == row.elements * per_element);
        CHECK(row.l2_rel_err <= 1e-8);
        CHECK(row.skel_err <= 1e-8);
    }
}

TEST_CASE("sweeps produce one row per value")
{
    StudyConfig c;
    c.study = StudyKind::PSweep;
    c.m_list = {1, 2};
    c.mesh_mode = MeshMode::Physical;
    c.n = 1;
    c.record_timings = false;
    const StudyReport r = run_study(c);
    REQUIRE(r.rows.size() == 2);
    CHECK(r.rows[0].p == 4);
    CHECK(r.rows[1].p == 9);
    CHECK(r.rows[1].t_solve_s == 0.0);
    CHECK(r.all_ok());
    // more directions cannot be less accurate on the same mesh for this smooth source
    CHECK(r.rows[1].l2_rel_err < r.rows[0].l2_rel_err);
}

TEST_CASE("the GMRES path agrees with the direct path")
{
    StudyConfig c;
    c.m = 2;
    c.mesh_mode = MeshMode::Physical;
    c.n = 2;
    const StudyRow direct = run_single(c, 4.0, 4.0 * std::numbers::pi, 2, 4.0);
    c.solver = SolveMethod::Gmres;
    c.slabs = 2;
    const StudyRow iter = run_single(c, 4.0, 4.0 * std::numbers::pi, 2, 4.0);
    REQUIRE_FALSE(direct.error.has_value());
    REQUIRE_FALSE(iter.error.has_value());
    CHECK(iter.l2_rel_err == doctest::Approx(direct.l2_rel_err).epsilon(1e-6));
}

TEST_CASE("command line exit codes")
{
    const std::string out = temp_path("out.csv");
    std::remove(out.c_str());
    CHECK(run_cli("--equation helmholtz --m 1 --n 1 --mesh-mode old --rho 4 --out " + out) == 0);
    std::ifstream in(out);
    REQUIRE(in.good());
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    CHECK(header.rfind("sweep,p,", 0) == 0);
    CHECK(columns(row) == 9);
    std::remove(out.c_str());

    CHECK(run_cli("--set colour=blue") == 1);
    CHECK(run_cli("--m 0") == 1);
    CHECK(run_cli("--config /nonexistent/pwdg.cfg") == 1);
    CHECK(run_cli("--no-such-flag") != 0);

    // a source inside the domain fails the run, which is exit code 2
    CHECK(run_cli("--rho 1 --m 1 --n 1 --mesh-mode old --set x0=0.5,0.5,0.5 --out " + out) == 2);
    std::remove(out.c_str());
}
