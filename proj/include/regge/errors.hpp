#pragma once

#include <stdexcept>
#include <string>

namespace regge {

enum class Errc {
    malformed_row,
    malformed_header,
    non_monotonic_energy,
    missing_j,
    unitarity_violation,
    nonzero_helicity,
    index_out_of_range,
    invalid_argument,
    degenerate_samples,
    numerically_singular,
    ill_conditioned,
    multiple_root,
    quadrature_not_converged,
    endpoint_theta,
    phi_out_of_grid,
    truncation_too_coarse,
    spurious_pole,
    too_few_points,
    beta_near_zero,
    non_positive_imaginary_part,
    pole_on_real_axis,
    config,
    io,
};

inline const char* errc_name(Errc c)
{
    switch (c) {
    case Errc::malformed_row: return "MalformedRow";
    case Errc::malformed_header: return "MalformedHeader";
    case Errc::non_monotonic_energy: return "NonMonotonicEnergy";
    case Errc::missing_j: return "MissingJ";
    case Errc::unitarity_violation: return "UnitarityViolation";
    case Errc::nonzero_helicity: return "NonzeroHelicity";
    case Errc::index_out_of_range: return "IndexOutOfRange";
    case Errc::invalid_argument: return "InvalidArgument";
    case Errc::degenerate_samples: return "DegenerateSamples";
    case Errc::numerically_singular: return "NumericallySingular";
    case Errc::ill_conditioned: return "IllConditioned";
    case Errc::multiple_root: return "MultipleRoot";
    case Errc::quadrature_not_converged: return "QuadratureNotConverged";
    case Errc::endpoint_theta: return "EndpointTheta";
    case Errc::phi_out_of_grid: return "PhiOutOfGrid";
    case Errc::truncation_too_coarse: return "TruncationTooCoarse";
    case Errc::spurious_pole: return "SpuriousPole";
    case Errc::too_few_points: return "TooFewPoints";
    case Errc::beta_near_zero: return "BetaNearZero";
    case Errc::non_positive_imaginary_part: return "NonPositiveImaginaryPart";
    case Errc::pole_on_real_axis: return "PoleOnRealAxis";
    case Errc::config: return "ConfigError";
    case Errc::io: return "IoError";
    }
    return "Unknown";
}

// Input/configuration problems map to CLI exit code 2, numerical failures to 3.
inline bool is_validation_error(Errc c)
{
    switch (c) {
    case Errc::malformed_row:
    case Errc::malformed_header:
    case Errc::non_monotonic_energy:
    case Errc::missing_j:
    case Errc::unitarity_violation:
    case Errc::nonzero_helicity:
    case Errc::index_out_of_range:
    case Errc::invalid_argument:
    case Errc::degenerate_samples:
    case Errc::endpoint_theta:
    case Errc::phi_out_of_grid:
    case Errc::spurious_pole:
    case Errc::too_few_points:
    case Errc::non_positive_imaginary_part:
    case Errc::pole_on_real_axis:
    case Errc::config:
    case Errc::io:
        return true;
    default:
        return false;
    }
}

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code)
    {
    }

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace regge
