#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace fleam::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Shape of a model; two parameter vectors are combinable only when their
// layouts hash to the same id.
struct GruLayout {
  int input_dim = 0;
  int hidden_dim = 0;
  int n_classes = 0;

  std::size_t param_count() const;
  std::uint64_t id() const;
  bool operator==(const GruLayout&) const = default;
};

// Ordered flat parameter form; the unit exchanged in federation rounds.
struct ParamVector {
  std::vector<double> values;
  std::uint64_t layout_id = 0;
};

// Single-layer GRU with a dense softmax head. Update and reset gates read
// [h_prev; x]; the candidate reads [reset * h_prev; x]. 64-bit floats
// throughout so finite-difference checks stay meaningful.
struct GruModel {
  int input_dim = 0;
  int hidden_dim = 0;
  int n_classes = 0;

  Matrix w_update, w_reset, w_cand;  // hidden x (hidden + input)
  Vector b_update, b_reset, b_cand;  // hidden
  Matrix w_out;                      // n_classes x hidden
  Vector b_out;                      // n_classes

  static GruModel zeros(int input_dim, int hidden_dim, int n_classes);

  // Weights uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)], biases zero.
  static GruModel random_init(int input_dim, int hidden_dim, int n_classes,
                              std::uint64_t seed);

  GruLayout layout() const { return {input_dim, hidden_dim, n_classes}; }
  std::size_t param_count() const { return layout().param_count(); }
  std::uint64_t layout_id() const { return layout().id(); }
  bool all_finite() const;

  // flatten/unflatten round-trip bit-exactly; order is
  // w_update, w_reset, w_cand (row-major), gate biases, w_out, b_out.
  ParamVector flatten() const;
  static GruModel unflatten(const ParamVector& params, const GruLayout& layout);

  void save(const std::string& path) const;
  static GruModel load(const std::string& path);
};

bool operator==(const GruModel& a, const GruModel& b);

}  // namespace fleam::nn
