#pragma once
// Shared domain types for the HOM simulator and analyzer.
//
// Time is integer picoseconds everywhere. Every module throws one of the
// error types below; the CLI maps them onto exit codes.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hom {

using Picoseconds = std::int64_t;

inline constexpr double kPsPerSecond = 1e12;
// FWHM / sigma for a Gaussian, 2*sqrt(2 ln 2).
inline constexpr double kFwhmPerSigma = 2.3548200450309493;

//---------------------------------------------------------------------------//
// Errors
//---------------------------------------------------------------------------//

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class AnalysisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Fit failures are analysis failures with extra diagnostics in the message.
class FitError : public AnalysisError {
 public:
  using AnalysisError::AnalysisError;
};

//---------------------------------------------------------------------------//
// Detectors
//---------------------------------------------------------------------------//

enum class Channel : std::uint8_t { D1 = 0, D2 = 1, D3 = 2, D4 = 3 };

inline constexpr std::size_t kNumChannels = 4;
inline constexpr std::array<Channel, kNumChannels> kAllChannels{
    Channel::D1, Channel::D2, Channel::D3, Channel::D4};

constexpr std::size_t index_of(Channel c) { return static_cast<std::size_t>(c); }

std::string_view to_string(Channel c);
// Accepts "D1".."D4" or "1".."4"; throws ConfigError otherwise.
Channel parse_channel(std::string_view text);

struct TimeTag {
  Channel channel = Channel::D1;
  Picoseconds time = 0;

  friend bool operator==(TimeTag const&, TimeTag const&) = default;
};

//---------------------------------------------------------------------------//
// Photons
//---------------------------------------------------------------------------//

enum class Arm : std::uint8_t { herald_1580, signal_1541 };
enum class Origin : std::uint8_t { pair_signal, stray, dark_placeholder };

struct PhotonRecord {
  Picoseconds emission_time = 0;
  Arm arm = Arm::signal_1541;
  Picoseconds mode_center = 0;  // center of the temporal wavepacket
  double mode_fwhm = 0.0;       // intensity FWHM, ps
  Origin origin = Origin::pair_signal;
  int mode_index = 0;  // 0 = signal mode, >= 1 orthogonal noise modes

  friend bool operator==(PhotonRecord const&, PhotonRecord const&) = default;
};

//---------------------------------------------------------------------------//
// Analysis configuration and results
//---------------------------------------------------------------------------//

// Coincidence windows, all offsets relative to the D1 start tag.
struct WindowConfig {
  Picoseconds width = 80;
  Picoseconds x_center = 0;
  Picoseconds y_center = 0;
  Picoseconds t0 = 0;  // D2 delay putting L' on R
  Picoseconds t1 = 0;  // D2 delay separating L' from R

  // Throws ConfigError when x/y overlap, t0 == t1 or width <= 0.
  void validate() const;

  friend bool operator==(WindowConfig const&, WindowConfig const&) = default;
};

struct RunSummary {
  std::uint64_t c_inf = 0;
  std::uint64_t c_0 = 0;
  double visibility = 0.0;
  // NaN when C_0 == 0 (one-sided bound only).
  double visibility_err = 0.0;
  double g2_ex = 0.0;
  double chi = 0.0;
  double visibility_eq2 = 0.0;  // prediction from (g2_ex, chi)
  std::array<std::uint64_t, kNumChannels> singles{};
  double duration_s = 0.0;
  WindowConfig windows;
  // Free-form extra numeric entries (fit reports etc.), sorted by key.
  std::map<std::string, double> extras;
};

}  // namespace hom
