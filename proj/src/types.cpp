#include "pwdg/types.hpp"

namespace pwdg
{
    const char * to_string(ErrorCode code)
    {
        switch (code)
        {
        case ErrorCode::NotSymmetric:        return "NotSymmetric";
        case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
        case ErrorCode::DegenerateElement:   return "DegenerateElement";
        case ErrorCode::NonManifold:         return "NonManifold";
        case ErrorCode::MeshFormat:          return "MeshFormat";
        case ErrorCode::FileSchemeError:     return "FileSchemeError";
        case ErrorCode::UnsupportedOrder:    return "UnsupportedOrder";
        case ErrorCode::BasisMeshMismatch:   return "BasisMeshMismatch";
        case ErrorCode::SingularSystem:      return "SingularSystem";
        case ErrorCode::SourceTooClose:      return "SourceTooClose";
        case ErrorCode::ConfigError:         return "ConfigError";
        case ErrorCode::IoError:             return "IoError";
        }
        return "Unknown";
    }

    Error::Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
    {
    }
}
