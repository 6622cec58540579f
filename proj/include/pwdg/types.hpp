#ifndef PWDG_TYPES_HPP
#define PWDG_TYPES_HPP

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace pwdg
{
    using cplx = std::complex<double>;

    using Vec3 = Eigen::Vector3d;
    using Mat3 = Eigen::Matrix3d;
    using CVec3 = Eigen::Vector3cd;

    inline constexpr cplx I_UNIT{0.0, 1.0};

    // Plain (unconjugated) cross product; Eigen's cross() conjugates the
    // result for complex operands.
    inline CVec3 cross(const CVec3& a, const CVec3& b)
    {
        return CVec3(a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]);
    }

    enum class ErrorCode
    {
        NotSymmetric,
        NotPositiveDefinite,
        DegenerateElement,
        NonManifold,
        MeshFormat,
        FileSchemeError,
        UnsupportedOrder,
        BasisMeshMismatch,
        SingularSystem,
        SourceTooClose,
        ConfigError,
        IoError,
    };

    const char * to_string(ErrorCode code);

    // Every failure the library reports carries one of the codes above; the
    // study driver writes the code into the CSV for failed rows.
    class Error : public std::runtime_error
    {
    public:
        Error(ErrorCode code, const std::string& what);

        ErrorCode code() const noexcept { return code_; }

    private:
        ErrorCode code_;
    };

    enum class Equation
    {
        Helmholtz,
        Maxwell
    };
}

#endif
