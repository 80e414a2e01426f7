#pragma once

#include <stdexcept>
#include <string>

namespace qam {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// classical dynamics
struct NoFixedPoint : Error { using Error::Error; };
struct NotInIsland : Error { using Error::Error; };
struct NoIsland : Error { using Error::Error; };
struct QuadratureFailure : Error { using Error::Error; };
struct EnergyOutOfRange : Error { using Error::Error; };
struct NotPeriodic : Error { using Error::Error; };
struct InconsistentInputs : Error { using Error::Error; };

// quantum operators
struct NoCommensurateValue : Error { using Error::Error; };
struct UnsupportedPlanck : Error { using Error::Error; };
struct OutOfGrid : Error { using Error::Error; };
struct GridOverflow : Error { using Error::Error; };
struct NonPositiveProbability : Error { using Error::Error; };

// spectral analysis
struct ConvergenceFailure : Error { using Error::Error; };
struct EmptyCandidates : Error { using Error::Error; };

// ladder theory
struct EmptyLadder : Error { using Error::Error; };
struct DegenerateSpectrum : Error { using Error::Error; };
struct DegenerateUnperturbed : Error { using Error::Error; };
struct ActionOutsideIsland : Error { using Error::Error; };

// harness
struct NoCommonPoints : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

}  // namespace qam
