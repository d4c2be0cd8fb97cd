#include "capserv/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numeric>

#include "capserv/rng.hpp"

namespace capserv {

namespace {

const std::vector<int> kDims = {kInputDim, 400, 400, 400, 400, kOutputDim};
constexpr char kMagic[4] = {'C', 'S', 'R', 'V'};
constexpr std::uint32_t kFormatVersion = 1;

void write_f64(std::ofstream& os, const double* data, std::size_t n) {
  os.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n * sizeof(double)));
}

void read_f64(std::ifstream& is, double* data, std::size_t n) {
  is.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(n * sizeof(double)));
  if (!is) throw std::runtime_error("model file truncated");
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs < 1) throw std::invalid_argument("TrainConfig: epochs must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
  if (learning_rate <= 0.0) throw std::invalid_argument("TrainConfig: learning_rate must be > 0");
  if (val_fraction < 0.0 || val_fraction >= 1.0)
    throw std::invalid_argument("TrainConfig: val_fraction must lie in [0, 1)");
  if (angle_scale <= 0.0) throw std::invalid_argument("TrainConfig: angle_scale must be > 0");
}

const std::vector<int>& MlpModel::layer_dims() { return kDims; }

MlpModel::MlpModel() {
  for (std::size_t l = 0; l + 1 < kDims.size(); ++l) {
    weights.emplace_back(Eigen::MatrixXd::Zero(kDims[l + 1], kDims[l]));
    biases.emplace_back(Eigen::VectorXd::Zero(kDims[l + 1]));
  }
  input_mean = Eigen::VectorXd::Zero(kInputDim);
  input_sd = Eigen::VectorXd::Ones(kInputDim);
  target_scale = Vec4::Ones();
}

Eigen::MatrixXd MlpModel::normalize(const Eigen::MatrixXd& X) const {
  return (X.rowwise() - input_mean.transpose()).array().rowwise() /
         input_sd.transpose().array();
}

Eigen::MatrixXd MlpModel::scaled_forward(const Eigen::MatrixXd& x_norm) const {
  Eigen::MatrixXd a = x_norm;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    Eigen::MatrixXd z = a * weights[l].transpose();
    z.rowwise() += biases[l].transpose();
    if (l + 1 < weights.size()) z = z.cwiseMax(0.0);  // ReLU on hidden layers
    a = std::move(z);
  }
  return a;
}

Vec4 MlpModel::predict(const Eigen::VectorXd& x) const {
  if (x.size() != kInputDim) throw std::invalid_argument("predict: input must have 300 values");
  if (!x.allFinite()) throw std::invalid_argument("predict: non-finite input");
  Eigen::MatrixXd out = scaled_forward(normalize(x.transpose()));
  Vec4 y = out.row(0).transpose();
  return y.cwiseQuotient(target_scale);
}

Eigen::MatrixXd MlpModel::predict_batch(const Eigen::MatrixXd& X) const {
  if (X.cols() != kInputDim) throw std::invalid_argument("predict_batch: inputs must have 300 columns");
  if (!X.allFinite()) throw std::invalid_argument("predict_batch: non-finite input");
  Eigen::MatrixXd out = scaled_forward(normalize(X));
  out.array().rowwise() /= target_scale.transpose().array();
  return out;
}

double MlpModel::scaled_loss_and_gradients(const Eigen::MatrixXd& x_norm,
                                           const Eigen::MatrixXd& y_scaled,
                                           MlpGradients& grads) const {
  const auto layers = weights.size();
  const double inv_count = 1.0 / static_cast<double>(y_scaled.rows() * y_scaled.cols());

  std::vector<Eigen::MatrixXd> activations(layers + 1);
  activations[0] = x_norm;
  for (std::size_t l = 0; l < layers; ++l) {
    Eigen::MatrixXd z = activations[l] * weights[l].transpose();
    z.rowwise() += biases[l].transpose();
    if (l + 1 < layers) z = z.cwiseMax(0.0);
    activations[l + 1] = std::move(z);
  }

  const Eigen::MatrixXd residual = activations[layers] - y_scaled;
  const double loss = residual.squaredNorm() * inv_count;

  grads.w.resize(layers);
  grads.b.resize(layers);
  Eigen::MatrixXd delta = 2.0 * inv_count * residual;
  for (std::size_t l = layers; l-- > 0;) {
    grads.w[l] = delta.transpose() * activations[l];
    grads.b[l] = delta.colwise().sum().transpose();
    if (l > 0) {
      // ReLU mask: the stored activation is zero exactly where the unit was
      // clamped, so reuse it instead of caching pre-activations.
      delta = (delta * weights[l]).cwiseProduct(
          (activations[l].array() > 0.0).cast<double>().matrix());
    }
  }
  return loss;
}

void MlpModel::save(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open model file for writing: " + path);
  os.write(kMagic, 4);
  const std::uint32_t version = kFormatVersion;
  os.write(reinterpret_cast<const char*>(&version), sizeof(version));
  const std::uint32_t n_layers = static_cast<std::uint32_t>(kDims.size());
  os.write(reinterpret_cast<const char*>(&n_layers), sizeof(n_layers));
  for (int d : kDims) {
    const std::uint32_t dim = static_cast<std::uint32_t>(d);
    os.write(reinterpret_cast<const char*>(&dim), sizeof(dim));
  }
  write_f64(os, input_mean.data(), kInputDim);
  write_f64(os, input_sd.data(), kInputDim);
  write_f64(os, target_scale.data(), kOutputDim);
  for (std::size_t l = 0; l < weights.size(); ++l) {
    // Stored row-major: one output row at a time.
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> w =
        weights[l];
    write_f64(os, w.data(), static_cast<std::size_t>(w.size()));
    write_f64(os, biases[l].data(), static_cast<std::size_t>(biases[l].size()));
  }
  if (!os) throw std::runtime_error("failed writing model file: " + path);
}

MlpModel MlpModel::load(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open model file: " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("not a capserv model file: " + path);
  std::uint32_t version = 0;
  is.read(reinterpret_cast<char*>(&version), sizeof(version));
  if (version != kFormatVersion) throw std::runtime_error("unsupported model format version");
  std::uint32_t n_layers = 0;
  is.read(reinterpret_cast<char*>(&n_layers), sizeof(n_layers));
  if (n_layers != kDims.size()) throw std::runtime_error("unexpected layer count in model file");
  for (int d : kDims) {
    std::uint32_t dim = 0;
    is.read(reinterpret_cast<char*>(&dim), sizeof(dim));
    if (dim != static_cast<std::uint32_t>(d))
      throw std::runtime_error("unexpected layer dimensions in model file");
  }

  MlpModel m;
  read_f64(is, m.input_mean.data(), kInputDim);
  read_f64(is, m.input_sd.data(), kInputDim);
  read_f64(is, m.target_scale.data(), kOutputDim);
  for (std::size_t l = 0; l + 1 < kDims.size(); ++l) {
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> w(kDims[l + 1],
                                                                             kDims[l]);
    read_f64(is, w.data(), static_cast<std::size_t>(w.size()));
    m.weights[l] = w;
    read_f64(is, m.biases[l].data(), static_cast<std::size_t>(m.biases[l].size()));
  }
  if (m.input_sd.minCoeff() <= 0.0 || !m.input_sd.allFinite() || !m.input_mean.allFinite())
    throw std::runtime_error("model normalization stats invalid");
  return m;
}

namespace {

struct AdamState {
  std::vector<Eigen::MatrixXd> mw, vw;
  std::vector<Eigen::VectorXd> mb, vb;
  long step = 0;

  explicit AdamState(const MlpModel& m) {
    for (const auto& w : m.weights) {
      mw.emplace_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
      vw.emplace_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
    }
    for (const auto& b : m.biases) {
      mb.emplace_back(Eigen::VectorXd::Zero(b.size()));
      vb.emplace_back(Eigen::VectorXd::Zero(b.size()));
    }
  }

  void update(MlpModel& m, const MlpGradients& g, const TrainConfig& cfg) {
    ++step;
    const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
    const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
    for (std::size_t l = 0; l < m.weights.size(); ++l) {
      mw[l] = cfg.beta1 * mw[l] + (1.0 - cfg.beta1) * g.w[l];
      vw[l] = cfg.beta2 * vw[l] + (1.0 - cfg.beta2) * g.w[l].cwiseProduct(g.w[l]);
      m.weights[l].array() -=
          cfg.learning_rate * (mw[l].array() / c1) / ((vw[l].array() / c2).sqrt() + cfg.adam_eps);
      mb[l] = cfg.beta1 * mb[l] + (1.0 - cfg.beta1) * g.b[l];
      vb[l] = cfg.beta2 * vb[l] + (1.0 - cfg.beta2) * g.b[l].cwiseProduct(g.b[l]);
      m.biases[l].array() -=
          cfg.learning_rate * (mb[l].array() / c1) / ((vb[l].array() / c2).sqrt() + cfg.adam_eps);
    }
  }
};

void he_uniform_init(MlpModel& m, std::mt19937_64& rng) {
  for (auto& w : m.weights) {
    const double limit = std::sqrt(6.0 / static_cast<double>(w.cols()));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (Eigen::Index j = 0; j < w.cols(); ++j)
      for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = dist(rng);
  }
}

Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& src, const std::vector<int>& idx,
                            int begin, int end) {
  Eigen::MatrixXd out(end - begin, src.cols());
  for (int r = begin; r < end; ++r) out.row(r - begin) = src.row(idx[r]);
  return out;
}

}  // namespace

TrainResult mlp_train(const WindowedData& data, const TrainConfig& config) {
  config.validate();
  if (data.samples.empty()) throw std::invalid_argument("mlp_train: empty dataset");

  const int n = static_cast<int>(data.samples.size());

  // Hold out whole trajectories for validation.
  std::vector<int> traj_ids;
  for (int t : data.traj)
    if (std::find(traj_ids.begin(), traj_ids.end(), t) == traj_ids.end()) traj_ids.push_back(t);
  auto split_rng = substream(config.seed, "train/split");
  std::shuffle(traj_ids.begin(), traj_ids.end(), split_rng);
  const int n_val_traj =
      traj_ids.size() > 1 ? static_cast<int>(std::lround(config.val_fraction * traj_ids.size()))
                          : 0;
  std::vector<int> val_traj(traj_ids.begin(), traj_ids.begin() + n_val_traj);
  std::sort(val_traj.begin(), val_traj.end());
  auto is_val = [&](int t) {
    return std::binary_search(val_traj.begin(), val_traj.end(), t);
  };

  std::vector<int> train_rows, val_rows;
  for (int i = 0; i < n; ++i) (is_val(data.traj[i]) ? val_rows : train_rows).push_back(i);
  if (train_rows.empty()) throw std::invalid_argument("mlp_train: no training rows after split");

  Eigen::MatrixXd X(n, kInputDim);
  Eigen::MatrixXd Y(n, kOutputDim);
  for (int i = 0; i < n; ++i) {
    X.row(i) = data.samples[i].x.transpose();
    Y.row(i) = data.samples[i].y.transpose();
  }

  MlpModel model;
  model.target_scale = Vec4(1.0, 1.0, config.angle_scale, config.angle_scale);

  // Normalization stats from the training split only.
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(kInputDim);
  for (int r : train_rows) mean += X.row(r).transpose();
  mean /= static_cast<double>(train_rows.size());
  Eigen::VectorXd var = Eigen::VectorXd::Zero(kInputDim);
  for (int r : train_rows) {
    const Eigen::VectorXd d = X.row(r).transpose() - mean;
    var += d.cwiseProduct(d);
  }
  var /= static_cast<double>(train_rows.size());
  model.input_mean = mean;
  model.input_sd = var.cwiseSqrt().cwiseMax(1e-8);

  const Eigen::MatrixXd Xn = model.normalize(X);
  Eigen::MatrixXd Ys = Y;
  Ys.array().rowwise() *= model.target_scale.transpose().array();

  auto init_rng = substream(config.seed, "train/init");
  he_uniform_init(model, init_rng);

  AdamState adam(model);
  MlpGradients grads;
  auto shuffle_rng = substream(config.seed, "train/shuffle");

  TrainResult result;
  std::vector<int> order = train_rows;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double loss_sum = 0.0;
    long loss_count = 0;
    for (int begin = 0; begin < static_cast<int>(order.size()); begin += config.batch_size) {
      const int end = std::min<int>(begin + config.batch_size, static_cast<int>(order.size()));
      const Eigen::MatrixXd xb = gather_rows(Xn, order, begin, end);
      const Eigen::MatrixXd yb = gather_rows(Ys, order, begin, end);
      const double loss = model.scaled_loss_and_gradients(xb, yb, grads);
      if (!std::isfinite(loss))
        throw std::runtime_error("mlp_train: NaN loss at epoch " + std::to_string(epoch) +
                                 ", batch starting at row " + std::to_string(begin));
      adam.update(model, grads, config);
      loss_sum += loss * (end - begin);
      loss_count += end - begin;
    }

    EpochLoss e;
    e.epoch = epoch;
    e.train_mse = loss_sum / static_cast<double>(loss_count);
    if (!val_rows.empty()) {
      const Eigen::MatrixXd xv = gather_rows(Xn, val_rows, 0, static_cast<int>(val_rows.size()));
      const Eigen::MatrixXd yv = gather_rows(Ys, val_rows, 0, static_cast<int>(val_rows.size()));
      e.val_mse = (model.scaled_forward(xv) - yv).squaredNorm() /
                  static_cast<double>(yv.rows() * yv.cols());
    }
    result.curve.push_back(e);
  }

  result.model = std::move(model);
  result.val_trajectories = val_traj;
  return result;
}

}  // namespace capserv
