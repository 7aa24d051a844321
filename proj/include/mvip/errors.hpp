#pragma once

#include <stdexcept>
#include <string>

namespace mvip {

/// Machine-readable error categories, also used for CLI exit codes.
enum class ErrorCode {
  Config = 2,
  GimbalProximity = 3,
  NonPositiveFrequency = 4,
  EmptyRegion = 5,
  RankDeficientFit = 6,
  DegenerateGain = 7,
  InvalidWindow = 8,
  NoFeasibleDesign = 9,
  RankDeficient = 10,
  IllConditioned = 11,
  NonFiniteState = 12,
  BadProfile = 13,
  DegenerateGeometry = 14,
  NyquistViolation = 15,
  UnstableLoop = 16,
  SingularEstimate = 17,
  InsufficientData = 18,
  ContactStop = 19,
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::Config: return "config";
    case ErrorCode::GimbalProximity: return "gimbal-proximity";
    case ErrorCode::NonPositiveFrequency: return "non-positive-frequency";
    case ErrorCode::EmptyRegion: return "empty-region";
    case ErrorCode::RankDeficientFit: return "rank-deficient-fit";
    case ErrorCode::DegenerateGain: return "degenerate-gain";
    case ErrorCode::InvalidWindow: return "invalid-window";
    case ErrorCode::NoFeasibleDesign: return "no-feasible-design";
    case ErrorCode::RankDeficient: return "rank-deficient";
    case ErrorCode::IllConditioned: return "ill-conditioned";
    case ErrorCode::NonFiniteState: return "non-finite-state";
    case ErrorCode::BadProfile: return "bad-profile";
    case ErrorCode::DegenerateGeometry: return "degenerate-geometry";
    case ErrorCode::NyquistViolation: return "nyquist-violation";
    case ErrorCode::UnstableLoop: return "unstable-loop";
    case ErrorCode::SingularEstimate: return "singular-estimate";
    case ErrorCode::InsufficientData: return "insufficient-data";
    case ErrorCode::ContactStop: return "contact-stop";
  }
  return "unknown";
}

/// Base exception carrying a category; subclasses exist for the conditions
/// callers are expected to catch selectively.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

#define MVIP_DEFINE_ERROR(Name)                      \
  class Name : public Error {                        \
   public:                                           \
    explicit Name(const std::string& what)           \
        : Error(ErrorCode::Name, what) {}            \
  }

MVIP_DEFINE_ERROR(Config);
MVIP_DEFINE_ERROR(GimbalProximity);
MVIP_DEFINE_ERROR(NonPositiveFrequency);
MVIP_DEFINE_ERROR(EmptyRegion);
MVIP_DEFINE_ERROR(RankDeficientFit);
MVIP_DEFINE_ERROR(DegenerateGain);
MVIP_DEFINE_ERROR(InvalidWindow);
MVIP_DEFINE_ERROR(NoFeasibleDesign);
MVIP_DEFINE_ERROR(RankDeficient);
MVIP_DEFINE_ERROR(IllConditioned);
MVIP_DEFINE_ERROR(NonFiniteState);
MVIP_DEFINE_ERROR(BadProfile);
MVIP_DEFINE_ERROR(DegenerateGeometry);
MVIP_DEFINE_ERROR(NyquistViolation);
MVIP_DEFINE_ERROR(SingularEstimate);
MVIP_DEFINE_ERROR(InsufficientData);

#undef MVIP_DEFINE_ERROR

}  // namespace mvip
