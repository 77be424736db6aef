#include "fleam/nn/model.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "fleam/core/errors.hpp"
#include "fleam/core/rng.hpp"

namespace fleam::nn {

namespace {

constexpr char kMagic[8] = {'F', 'L', 'E', 'A', 'M', 'G', 'R', 'U'};
constexpr std::uint32_t kVersion = 1;

void check_dims(int input_dim, int hidden_dim, int n_classes) {
  if (input_dim <= 0 || hidden_dim <= 0 || n_classes <= 0) {
    throw LayoutError("model dimensions must be positive");
  }
}

}  // namespace

std::size_t GruLayout::param_count() const {
  const std::size_t h = static_cast<std::size_t>(hidden_dim);
  const std::size_t cat = h + static_cast<std::size_t>(input_dim);
  const std::size_t c = static_cast<std::size_t>(n_classes);
  return 3 * h * cat + 3 * h + c * h + c;
}

std::uint64_t GruLayout::id() const {
  std::uint64_t id = 0x466c65616d477275ULL;
  id = mix_seed(id, static_cast<std::uint64_t>(input_dim));
  id = mix_seed(id, static_cast<std::uint64_t>(hidden_dim));
  id = mix_seed(id, static_cast<std::uint64_t>(n_classes));
  return id;
}

GruModel GruModel::zeros(int input_dim, int hidden_dim, int n_classes) {
  check_dims(input_dim, hidden_dim, n_classes);
  GruModel m;
  m.input_dim = input_dim;
  m.hidden_dim = hidden_dim;
  m.n_classes = n_classes;
  const int cat = hidden_dim + input_dim;
  m.w_update = Matrix::Zero(hidden_dim, cat);
  m.w_reset = Matrix::Zero(hidden_dim, cat);
  m.w_cand = Matrix::Zero(hidden_dim, cat);
  m.b_update = Vector::Zero(hidden_dim);
  m.b_reset = Vector::Zero(hidden_dim);
  m.b_cand = Vector::Zero(hidden_dim);
  m.w_out = Matrix::Zero(n_classes, hidden_dim);
  m.b_out = Vector::Zero(n_classes);
  return m;
}

GruModel GruModel::random_init(int input_dim, int hidden_dim, int n_classes,
                               std::uint64_t seed) {
  GruModel m = zeros(input_dim, hidden_dim, n_classes);
  Rng rng(seed);
  auto fill = [&rng](Matrix& w) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(w.cols()));
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) {
        w(r, c) = rng.uniform(-bound, bound);
      }
    }
  };
  fill(m.w_update);
  fill(m.w_reset);
  fill(m.w_cand);
  fill(m.w_out);
  return m;
}

bool GruModel::all_finite() const {
  return w_update.allFinite() && w_reset.allFinite() && w_cand.allFinite() &&
         b_update.allFinite() && b_reset.allFinite() && b_cand.allFinite() &&
         w_out.allFinite() && b_out.allFinite();
}

ParamVector GruModel::flatten() const {
  ParamVector p;
  p.layout_id = layout_id();
  p.values.reserve(param_count());
  auto push_matrix = [&p](const Matrix& w) {
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) p.values.push_back(w(r, c));
    }
  };
  auto push_vector = [&p](const Vector& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) p.values.push_back(v(i));
  };
  push_matrix(w_update);
  push_matrix(w_reset);
  push_matrix(w_cand);
  push_vector(b_update);
  push_vector(b_reset);
  push_vector(b_cand);
  push_matrix(w_out);
  push_vector(b_out);
  return p;
}

GruModel GruModel::unflatten(const ParamVector& params, const GruLayout& layout) {
  if (params.layout_id != layout.id()) {
    throw LayoutError("parameter vector layout does not match the requested model layout");
  }
  if (params.values.size() != layout.param_count()) {
    throw LayoutError("parameter vector has wrong length for its layout");
  }
  GruModel m = zeros(layout.input_dim, layout.hidden_dim, layout.n_classes);
  std::size_t k = 0;
  auto pull_matrix = [&params, &k](Matrix& w) {
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = params.values[k++];
    }
  };
  auto pull_vector = [&params, &k](Vector& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = params.values[k++];
  };
  pull_matrix(m.w_update);
  pull_matrix(m.w_reset);
  pull_matrix(m.w_cand);
  pull_vector(m.b_update);
  pull_vector(m.b_reset);
  pull_vector(m.b_cand);
  pull_matrix(m.w_out);
  pull_vector(m.b_out);
  return m;
}

void GruModel::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write checkpoint: " + path);
  out.write(kMagic, sizeof(kMagic));
  const std::uint32_t header[4] = {kVersion, static_cast<std::uint32_t>(input_dim),
                                   static_cast<std::uint32_t>(hidden_dim),
                                   static_cast<std::uint32_t>(n_classes)};
  out.write(reinterpret_cast<const char*>(header), sizeof(header));
  const std::uint64_t id = layout_id();
  out.write(reinterpret_cast<const char*>(&id), sizeof(id));
  const ParamVector p = flatten();
  out.write(reinterpret_cast<const char*>(p.values.data()),
            static_cast<std::streamsize>(p.values.size() * sizeof(double)));
  if (!out) throw ConfigError("short write while saving checkpoint: " + path);
}

GruModel GruModel::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open checkpoint: " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw ConfigError("not a model checkpoint: " + path);
  }
  std::uint32_t header[4];
  in.read(reinterpret_cast<char*>(header), sizeof(header));
  if (!in || header[0] != kVersion) throw ConfigError("unsupported checkpoint version");
  GruLayout layout{static_cast<int>(header[1]), static_cast<int>(header[2]),
                   static_cast<int>(header[3])};
  check_dims(layout.input_dim, layout.hidden_dim, layout.n_classes);
  std::uint64_t id = 0;
  in.read(reinterpret_cast<char*>(&id), sizeof(id));
  if (!in || id != layout.id()) throw ConfigError("checkpoint layout id mismatch");
  ParamVector p;
  p.layout_id = id;
  p.values.resize(layout.param_count());
  in.read(reinterpret_cast<char*>(p.values.data()),
          static_cast<std::streamsize>(p.values.size() * sizeof(double)));
  if (!in) throw ConfigError("truncated checkpoint: " + path);
  return unflatten(p, layout);
}

bool operator==(const GruModel& a, const GruModel& b) {
  return a.layout() == b.layout() && a.w_update == b.w_update && a.w_reset == b.w_reset &&
         a.w_cand == b.w_cand && a.b_update == b.b_update && a.b_reset == b.b_reset &&
         a.b_cand == b.b_cand && a.w_out == b.w_out && a.b_out == b.b_out;
}

}  // namespace fleam::nn
