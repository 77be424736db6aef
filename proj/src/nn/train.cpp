#include "fleam/nn/train.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "fleam/core/errors.hpp"

namespace fleam::nn {

namespace {

inline Matrix sigmoid(const Matrix& z) {
  return ((-z.array()).exp() + 1.0).inverse().matrix();
}

void check_input_dim(const GruModel& model, const Vector& x) {
  if (x.size() != model.input_dim) {
    throw LayoutError("input vector width does not match model input_dim");
  }
}

// Per-step activations for a batch of equal-length sequences.
struct BatchCache {
  std::vector<Matrix> pre;      // [h_prev; x], (hidden+input) x batch
  std::vector<Matrix> pre_cand; // [reset*h_prev; x]
  std::vector<Matrix> update, reset, cand;  // gate activations, hidden x batch
  std::vector<Matrix> hidden;   // hidden states, index 0 = initial zeros
  std::vector<Matrix> probs;    // per-step class distributions
};

// Softmax over columns, numerically stabilized.
Matrix column_softmax(const Matrix& logits) {
  Matrix p = logits;
  for (Eigen::Index c = 0; c < p.cols(); ++c) {
    const double m = p.col(c).maxCoeff();
    p.col(c) = (p.col(c).array() - m).exp();
    p.col(c) /= p.col(c).sum();
  }
  return p;
}

BatchCache forward_batch(const GruModel& model, const std::vector<Matrix>& xs) {
  const int hidden = model.hidden_dim;
  const Eigen::Index batch = xs.empty() ? 0 : xs[0].cols();
  const std::size_t steps = xs.size();
  BatchCache cache;
  cache.pre.reserve(steps);
  cache.pre_cand.reserve(steps);
  cache.update.reserve(steps);
  cache.reset.reserve(steps);
  cache.cand.reserve(steps);
  cache.hidden.reserve(steps + 1);
  cache.probs.reserve(steps);
  cache.hidden.push_back(Matrix::Zero(hidden, batch));

  Matrix pre(hidden + model.input_dim, batch);
  for (std::size_t t = 0; t < steps; ++t) {
    const Matrix& h_prev = cache.hidden.back();
    pre.topRows(hidden) = h_prev;
    pre.bottomRows(model.input_dim) = xs[t];

    Matrix update = sigmoid((model.w_update * pre).colwise() + model.b_update);
    Matrix reset = sigmoid((model.w_reset * pre).colwise() + model.b_reset);

    Matrix pre_cand(hidden + model.input_dim, batch);
    pre_cand.topRows(hidden) = reset.cwiseProduct(h_prev);
    pre_cand.bottomRows(model.input_dim) = xs[t];
    Matrix cand = ((model.w_cand * pre_cand).colwise() + model.b_cand).array().tanh();

    Matrix h = (1.0 - update.array()) * h_prev.array() + update.array() * cand.array();

    cache.probs.push_back(column_softmax((model.w_out * h).colwise() + model.b_out));
    cache.pre.push_back(pre);
    cache.pre_cand.push_back(std::move(pre_cand));
    cache.update.push_back(std::move(update));
    cache.reset.push_back(std::move(reset));
    cache.cand.push_back(std::move(cand));
    cache.hidden.push_back(std::move(h));
  }
  return cache;
}

// Gradient accumulator shaped like the model.
struct Grads {
  Matrix w_update, w_reset, w_cand, w_out;
  Vector b_update, b_reset, b_cand, b_out;

  explicit Grads(const GruModel& m)
      : w_update(Matrix::Zero(m.w_update.rows(), m.w_update.cols())),
        w_reset(Matrix::Zero(m.w_reset.rows(), m.w_reset.cols())),
        w_cand(Matrix::Zero(m.w_cand.rows(), m.w_cand.cols())),
        w_out(Matrix::Zero(m.w_out.rows(), m.w_out.cols())),
        b_update(Vector::Zero(m.b_update.size())),
        b_reset(Vector::Zero(m.b_reset.size())),
        b_cand(Vector::Zero(m.b_cand.size())),
        b_out(Vector::Zero(m.b_out.size())) {}

  void add_l2(const GruModel& m, double reg_weight) {
    if (reg_weight == 0.0) return;
    w_update += reg_weight * m.w_update;
    w_reset += reg_weight * m.w_reset;
    w_cand += reg_weight * m.w_cand;
    w_out += reg_weight * m.w_out;
    b_update += reg_weight * m.b_update;
    b_reset += reg_weight * m.b_reset;
    b_cand += reg_weight * m.b_cand;
    b_out += reg_weight * m.b_out;
  }

  void apply(GruModel& m, double lr) const {
    m.w_update -= lr * w_update;
    m.w_reset -= lr * w_reset;
    m.w_cand -= lr * w_cand;
    m.w_out -= lr * w_out;
    m.b_update -= lr * b_update;
    m.b_reset -= lr * b_reset;
    m.b_cand -= lr * b_cand;
    m.b_out -= lr * b_out;
  }

  ParamVector flatten(const GruModel& m) const {
    GruModel g = m;  // reuse the canonical flatten order
    g.w_update = w_update;
    g.w_reset = w_reset;
    g.w_cand = w_cand;
    g.w_out = w_out;
    g.b_update = b_update;
    g.b_reset = b_reset;
    g.b_cand = b_cand;
    g.b_out = b_out;
    return g.flatten();
  }
};

double l2_half_norm(const GruModel& m) {
  return 0.5 * (m.w_update.squaredNorm() + m.w_reset.squaredNorm() + m.w_cand.squaredNorm() +
                m.w_out.squaredNorm() + m.b_update.squaredNorm() + m.b_reset.squaredNorm() +
                m.b_cand.squaredNorm() + m.b_out.squaredNorm());
}

// Cross-entropy sum over labeled steps in one forwarded batch; dlogits gets
// (p - onehot) for labeled columns, zero elsewhere.
double labeled_loss_and_dlogits(const BatchCache& cache,
                                const std::vector<const Sequence*>& seqs,
                                std::vector<Matrix>* dlogits, std::size_t* labeled_steps) {
  double loss = 0.0;
  const std::size_t steps = cache.probs.size();
  if (dlogits) dlogits->assign(steps, Matrix());
  for (std::size_t t = 0; t < steps; ++t) {
    const Matrix& p = cache.probs[t];
    Matrix d;
    if (dlogits) d = Matrix::Zero(p.rows(), p.cols());
    for (Eigen::Index c = 0; c < p.cols(); ++c) {
      const int label = seqs[static_cast<std::size_t>(c)]->labels[t];
      if (label == kUnlabeled) continue;
      if (label < 0 || label >= p.rows()) {
        throw InputError("label out of class range");
      }
      ++*labeled_steps;
      loss -= std::log(std::max(p(label, c), 1e-300));
      if (dlogits) {
        d.col(c) += p.col(c);
        d(label, c) -= 1.0;
      }
    }
    if (dlogits) (*dlogits)[t] = std::move(d);
  }
  return loss;
}

// Backward through time over one equal-length batch; accumulates into grads.
void backward_batch_group(const GruModel& model, const std::vector<Matrix>& xs,
                          const BatchCache& cache, const std::vector<Matrix>& dlogits,
                          double inv_labeled, Grads& grads) {
  const int hidden = model.hidden_dim;
  const Eigen::Index batch = xs.empty() ? 0 : xs[0].cols();
  Matrix dh_next = Matrix::Zero(hidden, batch);
  for (std::size_t t = xs.size(); t-- > 0;) {
    const Matrix& h_prev = cache.hidden[t];
    const Matrix& h_cur = cache.hidden[t + 1];
    const Matrix& update = cache.update[t];
    const Matrix& reset = cache.reset[t];
    const Matrix& cand = cache.cand[t];

    Matrix dlog = dlogits[t] * inv_labeled;
    grads.w_out.noalias() += dlog * h_cur.transpose();
    grads.b_out += dlog.rowwise().sum();

    Matrix dh = model.w_out.transpose() * dlog + dh_next;

    Matrix dupdate = dh.cwiseProduct(cand - h_prev);
    Matrix dcand = dh.cwiseProduct(update);
    Matrix dh_prev = dh.cwiseProduct(Matrix::Ones(hidden, batch) - update);

    // candidate: tanh'
    Matrix dpre_cand = dcand.array() * (1.0 - cand.array().square());
    grads.w_cand.noalias() += dpre_cand * cache.pre_cand[t].transpose();
    grads.b_cand += dpre_cand.rowwise().sum();
    Matrix dgated = model.w_cand.leftCols(hidden).transpose() * dpre_cand;
    Matrix dreset = dgated.cwiseProduct(h_prev);
    dh_prev += dgated.cwiseProduct(reset);

    // reset gate: sigmoid'
    Matrix dpre_reset = dreset.array() * reset.array() * (1.0 - reset.array());
    grads.w_reset.noalias() += dpre_reset * cache.pre[t].transpose();
    grads.b_reset += dpre_reset.rowwise().sum();
    dh_prev.noalias() += model.w_reset.leftCols(hidden).transpose() * dpre_reset;

    // update gate: sigmoid'
    Matrix dpre_update = dupdate.array() * update.array() * (1.0 - update.array());
    grads.w_update.noalias() += dpre_update * cache.pre[t].transpose();
    grads.b_update += dpre_update.rowwise().sum();
    dh_prev.noalias() += model.w_update.leftCols(hidden).transpose() * dpre_update;

    dh_next = std::move(dh_prev);
  }
}

// Groups batch members by sequence length so each group runs as one GEMM set.
std::map<std::size_t, std::vector<const Sequence*>> group_by_length(
    const std::vector<Sequence>& data, const std::vector<int>& indices, std::size_t begin,
    std::size_t end) {
  std::map<std::size_t, std::vector<const Sequence*>> groups;
  for (std::size_t i = begin; i < end; ++i) {
    const Sequence& s = data[static_cast<std::size_t>(indices[i])];
    if (s.inputs.empty()) throw InputError("sequence must be non-empty");
    if (s.inputs.size() != s.labels.size()) {
      throw InputError("labels must align with the input sequence");
    }
    groups[s.inputs.size()].push_back(&s);
  }
  return groups;
}

std::vector<Matrix> assemble_inputs(const GruModel& model,
                                    const std::vector<const Sequence*>& seqs,
                                    std::size_t steps) {
  std::vector<Matrix> xs(steps, Matrix(model.input_dim, static_cast<Eigen::Index>(seqs.size())));
  for (std::size_t c = 0; c < seqs.size(); ++c) {
    for (std::size_t t = 0; t < steps; ++t) {
      check_input_dim(model, seqs[c]->inputs[t]);
      xs[t].col(static_cast<Eigen::Index>(c)) = seqs[c]->inputs[t];
    }
  }
  return xs;
}

struct BatchGrad {
  Grads grads;
  double loss = 0.0;
};

BatchGrad compute_batch_grad(const GruModel& model, const std::vector<Sequence>& data,
                             const std::vector<int>& indices, std::size_t begin,
                             std::size_t end, double reg_weight) {
  BatchGrad out{Grads(model), 0.0};
  auto groups = group_by_length(data, indices, begin, end);

  // Two passes: count labeled steps first so every group shares the same
  // 1/labeled normalization (loss is the mean over labeled steps).
  std::size_t labeled = 0;
  std::vector<std::pair<std::vector<Matrix>, BatchCache>> forwarded;
  std::vector<std::vector<Matrix>> dlogits_per_group;
  std::vector<std::vector<const Sequence*>> seqs_per_group;
  double ce_sum = 0.0;
  for (auto& [steps, seqs] : groups) {
    std::vector<Matrix> xs = assemble_inputs(model, seqs, steps);
    BatchCache cache = forward_batch(model, xs);
    std::vector<Matrix> dlogits;
    ce_sum += labeled_loss_and_dlogits(cache, seqs, &dlogits, &labeled);
    forwarded.emplace_back(std::move(xs), std::move(cache));
    dlogits_per_group.push_back(std::move(dlogits));
    seqs_per_group.push_back(seqs);
  }
  const double inv_labeled = labeled > 0 ? 1.0 / static_cast<double>(labeled) : 0.0;
  for (std::size_t g = 0; g < forwarded.size(); ++g) {
    backward_batch_group(model, forwarded[g].first, forwarded[g].second, dlogits_per_group[g],
                         inv_labeled, out.grads);
  }
  out.grads.add_l2(model, reg_weight);
  out.loss = ce_sum * inv_labeled + reg_weight * l2_half_norm(model);
  return out;
}

}  // namespace

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning_rate must be finite and non-negative");
  }
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (epochs < 0) throw ConfigError("epochs must be >= 0");
  if (!(reg_weight >= 0.0 && reg_weight <= 1.0)) {
    throw ConfigError("reg_weight must lie in [0, 1]");
  }
}

Vector gru_step(const GruModel& model, const Vector& h_prev, const Vector& x) {
  if (h_prev.size() != model.hidden_dim) {
    throw LayoutError("hidden state width does not match model hidden_dim");
  }
  check_input_dim(model, x);
  if (!h_prev.allFinite()) throw InputError("hidden state must be finite");

  Vector pre(model.hidden_dim + model.input_dim);
  pre << h_prev, x;
  const Vector update =
      (1.0 + (-(model.w_update * pre + model.b_update).array()).exp()).inverse();
  const Vector reset = (1.0 + (-(model.w_reset * pre + model.b_reset).array()).exp()).inverse();
  Vector pre_cand(model.hidden_dim + model.input_dim);
  pre_cand << reset.cwiseProduct(h_prev), x;
  const Vector cand = (model.w_cand * pre_cand + model.b_cand).array().tanh();
  return ((1.0 - update.array()) * h_prev.array() + update.array() * cand.array()).matrix();
}

ForwardResult forward_sequence(const GruModel& model, const std::vector<Vector>& xs) {
  if (xs.empty()) throw InputError("forward_sequence requires a non-empty sequence");
  std::vector<Matrix> cols;
  cols.reserve(xs.size());
  for (const Vector& x : xs) {
    check_input_dim(model, x);
    cols.push_back(x);
  }
  BatchCache cache = forward_batch(model, cols);
  ForwardResult out;
  out.probs.reserve(xs.size());
  for (const Matrix& p : cache.probs) out.probs.push_back(p.col(0));
  out.h_final = cache.hidden.back().col(0);
  return out;
}

BackwardResult backward(const GruModel& model, const Sequence& seq, double reg_weight) {
  std::vector<Sequence> one{seq};
  std::vector<int> idx{0};
  return backward_batch(model, one, idx, reg_weight);
}

BackwardResult backward_batch(const GruModel& model, const std::vector<Sequence>& data,
                              const std::vector<int>& indices, double reg_weight) {
  BatchGrad bg = compute_batch_grad(model, data, indices, 0, indices.size(), reg_weight);
  BackwardResult out;
  out.grad = bg.grads.flatten(model);
  out.loss = bg.loss;
  return out;
}

EpochStats sgd_epoch_inplace(GruModel& model, const std::vector<Sequence>& data,
                             const std::vector<int>& shard, const TrainConfig& config,
                             Rng& rng) {
  config.validate();
  EpochStats stats;
  if (shard.empty()) {
    stats.empty_shard = true;
    return stats;
  }
  std::vector<int> order = shard;
  rng.shuffle(order);
  const std::size_t batch = static_cast<std::size_t>(config.batch_size);
  double loss_sum = 0.0;
  for (std::size_t begin = 0; begin < order.size(); begin += batch) {
    const std::size_t end = std::min(order.size(), begin + batch);
    BatchGrad bg = compute_batch_grad(model, data, order, begin, end, config.reg_weight);
    bg.grads.apply(model, config.learning_rate);
    loss_sum += bg.loss;
    ++stats.batches;
  }
  stats.mean_loss = stats.batches ? loss_sum / stats.batches : 0.0;
  return stats;
}

GruModel sgd_epoch(const GruModel& model, const std::vector<Sequence>& data,
                   const std::vector<int>& shard, const TrainConfig& config) {
  GruModel updated = model;
  Rng rng(config.seed);
  sgd_epoch_inplace(updated, data, shard, config, rng);
  return updated;
}

double dataset_loss(const GruModel& model, const std::vector<Sequence>& data,
                    const std::vector<int>& indices, double reg_weight) {
  double ce_sum = 0.0;
  std::size_t labeled = 0;
  const std::size_t chunk = 256;
  for (std::size_t begin = 0; begin < indices.size(); begin += chunk) {
    const std::size_t end = std::min(indices.size(), begin + chunk);
    auto groups = group_by_length(data, indices, begin, end);
    for (auto& [steps, seqs] : groups) {
      BatchCache cache = forward_batch(model, assemble_inputs(model, seqs, steps));
      ce_sum += labeled_loss_and_dlogits(cache, seqs, nullptr, &labeled);
    }
  }
  const double mean = labeled ? ce_sum / static_cast<double>(labeled) : 0.0;
  return mean + reg_weight * l2_half_norm(model);
}

int argmax_class(const Vector& probs) {
  int best = 0;
  for (Eigen::Index i = 1; i < probs.size(); ++i) {
    if (probs(i) > probs(best)) best = static_cast<int>(i);
  }
  return best;
}

double accuracy(const GruModel& model, const std::vector<Sequence>& data,
                const std::vector<int>& indices) {
  if (indices.empty()) return 0.0;
  std::size_t correct = 0;
  std::size_t total = 0;
  const std::size_t chunk = 256;
  for (std::size_t begin = 0; begin < indices.size(); begin += chunk) {
    const std::size_t end = std::min(indices.size(), begin + chunk);
    auto groups = group_by_length(data, indices, begin, end);
    for (auto& [steps, seqs] : groups) {
      BatchCache cache = forward_batch(model, assemble_inputs(model, seqs, steps));
      for (std::size_t c = 0; c < seqs.size(); ++c) {
        // last labeled step decides the sequence's class
        for (std::size_t t = steps; t-- > 0;) {
          const int label = seqs[c]->labels[t];
          if (label == kUnlabeled) continue;
          ++total;
          if (argmax_class(cache.probs[t].col(static_cast<Eigen::Index>(c))) == label) {
            ++correct;
          }
          break;
        }
      }
    }
  }
  return total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0;
}

std::vector<EpochStats> Trainer::fit(const std::vector<Sequence>& data,
                                     const std::vector<int>& shard) {
  config.validate();
  std::vector<EpochStats> history;
  history.reserve(static_cast<std::size_t>(config.epochs));
  for (int e = 0; e < config.epochs; ++e) {
    history.push_back(sgd_epoch_inplace(model, data, shard, config, rng));
  }
  return history;
}

}  // namespace fleam::nn
