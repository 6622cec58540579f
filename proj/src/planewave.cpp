#include "pwdg/planewave.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace pwdg
{
    DirectionSet fibonacci_directions(int m)
    {
        if (m < 1)
            throw Error(ErrorCode::ConfigError, "m must be >= 1");

        const int p = (m + 1) * (m + 1);
        const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));

        DirectionSet set;
        set.m = m;
        set.directions.reserve(p);
        for (int i = 0; i < p; ++i)
        {
            const double z = 1.0 - (2.0 * i + 1.0) / p;
            const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double phi = golden * i;
            set.directions.emplace_back(r * std::cos(phi), r * std::sin(phi), z);
            set.directions.back().normalize();
        }
        return set;
    }

    DirectionSet read_directions(int m, const std::string& path)
    {
        std::ifstream in(path);
        if (!in)
            throw Error(ErrorCode::IoError, "cannot open direction file " + path);

        const std::size_t p = static_cast<std::size_t>((m + 1) * (m + 1));
        DirectionSet set;
        set.m = m;

        std::string line;
        while (std::getline(in, line))
        {
            std::istringstream ls(line);
            Vec3 d;
            if (!(ls >> d[0] >> d[1] >> d[2]))
                continue;  // blank or comment line
            if (std::abs(d.norm() - 1.0) > 1e-8)
                throw Error(ErrorCode::FileSchemeError, "direction not of unit length: " + line);
            set.directions.push_back(d.normalized());
        }

        if (set.directions.size() != p)
        {
            std::ostringstream msg;
            msg << path << " holds " << set.directions.size() << " directions, expected " << p;
            throw Error(ErrorCode::FileSchemeError, msg.str());
        }
        for (std::size_t a = 0; a < p; ++a)
            for (std::size_t b = a + 1; b < p; ++b)
                if ((set.directions[a] - set.directions[b]).norm() <= 1e-8)
                    throw Error(ErrorCode::FileSchemeError, "repeated direction in " + path);
        return set;
    }

    DirectionSet generate_directions(int m, DirectionScheme scheme, const std::string& path)
    {
        if (m < 1)
            throw Error(ErrorCode::ConfigError, "m must be >= 1");
        return scheme == DirectionScheme::Fibonacci ? fibonacci_directions(m) : read_directions(m, path);
    }

    Vec3 polarization(const Vec3& d)
    {
        int axis = 0;
        for (int i = 1; i < 3; ++i)
            if (std::abs(d[i]) < std::abs(d[axis]))
                axis = i;
        return Vec3::Unit(axis).cross(d).normalized();
    }

    cplx HelmholtzBasis::eval(std::size_t l, const Vec3& x) const
    {
        return std::exp(I_UNIT * wave_vector(l).dot(x));
    }

    CVec3 HelmholtzBasis::grad(std::size_t l, const Vec3& x) const
    {
        const Vec3 k = wave_vector(l);
        return (I_UNIT * eval(l, x)) * k.cast<cplx>();
    }

    HelmholtzBasis make_helmholtz_basis(double omega, const HelmholtzTransform& t, const Mat3& A,
                                        const DirectionSet& dirs)
    {
        HelmholtzBasis b;
        b.omega = omega;
        b.S = t.S;
        b.A = A;
        b.dirs = dirs;
        return b;
    }

    Vec3 MaxwellBasis::amplitude(std::size_t l) const
    {
        const std::size_t p = dirs.size();
        return l < p ? Vec3(G * F[l]) : Vec3(G * Gpol[l - p]);
    }

    CVec3 MaxwellBasis::eval(std::size_t l, const Vec3& x) const
    {
        return phase(l, x) * amplitude(l).cast<cplx>();
    }

    CVec3 MaxwellBasis::curl(std::size_t l, const Vec3& x) const
    {
        const Vec3 kxw = wave_vector(l).cross(amplitude(l));
        return (I_UNIT * phase(l, x)) * kxw.cast<cplx>();
    }

    CVec3 MaxwellBasis::flux_amplitude(std::size_t l) const
    {
        const Vec3 kxw = wave_vector(l).cross(amplitude(l));
        const Vec3 v = (mu_r * A).ldlt().solve(kxw);
        return I_UNIT * v.cast<cplx>();
    }

    MaxwellBasis make_maxwell_basis(double omega, double eps_r, double mu_r, const MaxwellTransform& t,
                                    const Mat3& A, const DirectionSet& dirs)
    {
        if (!(eps_r > 0.0) || !(mu_r > 0.0))
            throw Error(ErrorCode::ConfigError, "eps_r and mu_r must be positive");

        MaxwellBasis b;
        b.omega = omega;
        b.eps_r = eps_r;
        b.mu_r = mu_r;
        b.kappa = omega * std::sqrt(eps_r * mu_r);
        b.S = t.S;
        b.G = t.G;
        b.A = A;
        b.dirs = dirs;
        for (const Vec3& d : dirs.directions)
        {
            const Vec3 f = polarization(d);
            b.F.push_back(f);
            b.Gpol.push_back(f.cross(d));
        }
        return b;
    }
}
