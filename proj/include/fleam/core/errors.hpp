#pragma once

#include <stdexcept>

namespace fleam {

// Bad user-supplied configuration, paths, or file formats. CLI exit status 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed runtime inputs: empty sequences, label out of range, short windows.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parameter-layout mismatch between models, flat vectors, or profiles.
struct LayoutError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Mathematical domain violations: division by zero, too-small graphs.
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Federation protocol violations: partial aggregation, weight mismatch.
struct ProtocolError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ODE integration left the valid state region; retry with a smaller step.
struct IntegrationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace fleam
