#include "nac/mlp.hpp"

#include <cmath>
#include <nlohmann/json.hpp>
#include <stdexcept>

#include "nac/rng.hpp"

using nlohmann::json;

namespace nac {

// ---------------------------------------------------------------------------
// Normalizer

Normalizer Normalizer::fit(const Eigen::MatrixXd& samples) {
  Normalizer n;
  n.lo = samples.rowwise().minCoeff();
  Eigen::VectorXd hi = samples.rowwise().maxCoeff();
  n.range = (hi - n.lo).cwiseMax(1e-12);
  return n;
}

Eigen::MatrixXd Normalizer::normalize_all(const Eigen::MatrixXd& m) const {
  return (m.colwise() - lo).array().colwise() / range.array();
}

Eigen::MatrixXd Normalizer::denormalize_all(const Eigen::MatrixXd& m) const {
  return (m.array().colwise() * range.array()).matrix().colwise() + lo;
}

// ---------------------------------------------------------------------------
// Model

MlpModel MlpModel::init(int input_dim, int output_dim, const MlpConfig& config) {
  if (input_dim < 1 || output_dim < 1)
    throw std::invalid_argument("mlp: dimensions must be positive");
  MlpModel m;
  m.bn_eps_ = config.bn_eps;
  RngStream rng = RngStream::keyed(config.seed, 0xA11ull);
  std::vector<int> sizes;
  sizes.push_back(input_dim);
  for (int h : config.hidden) sizes.push_back(h);
  sizes.push_back(output_dim);
  for (size_t l = 0; l + 1 < sizes.size(); ++l) {
    Layer layer;
    int in = sizes[l], out = sizes[l + 1];
    double lim = std::sqrt(6.0 / in);
    layer.W.resize(out, in);
    for (int i = 0; i < out; ++i)
      for (int j = 0; j < in; ++j) layer.W(i, j) = rng.uniform(-lim, lim);
    layer.b = Eigen::VectorXd::Zero(out);
    bool is_hidden = l + 2 < sizes.size();
    layer.relu = is_hidden;
    layer.has_bn = is_hidden && config.batch_norm;
    if (layer.has_bn) {
      layer.gamma = Eigen::VectorXd::Ones(out);
      layer.beta = Eigen::VectorXd::Zero(out);
      layer.running_mean = Eigen::VectorXd::Zero(out);
      layer.running_var = Eigen::VectorXd::Ones(out);
    }
    m.layers_.push_back(std::move(layer));
  }
  // identity normalizers until training fits real ranges
  m.input_norm_.lo = Eigen::VectorXd::Zero(input_dim);
  m.input_norm_.range = Eigen::VectorXd::Ones(input_dim);
  m.output_norm_.lo = Eigen::VectorXd::Zero(output_dim);
  m.output_norm_.range = Eigen::VectorXd::Ones(output_dim);
  return m;
}

Eigen::MatrixXd MlpModel::forward_eval(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd h = x;
  for (const auto& layer : layers_) {
    Eigen::MatrixXd z = (layer.W * h).colwise() + layer.b;
    if (layer.has_bn) {
      Eigen::ArrayXd s = (layer.running_var.array() + bn_eps_).sqrt();
      z = (((z.colwise() - layer.running_mean).array().colwise() / s).colwise() *
           layer.gamma.array())
              .matrix()
              .colwise() +
          layer.beta;
    }
    if (layer.relu) z = z.cwiseMax(0.0);
    h = std::move(z);
  }
  return h;
}

Eigen::VectorXd MlpModel::forward(const Eigen::VectorXd& features) const {
  if (features.size() != input_dim())
    throw std::invalid_argument("mlp forward: expected " + std::to_string(input_dim()) +
                                " inputs, got " + std::to_string(features.size()));
  Eigen::MatrixXd x = input_norm_.normalize(features);
  return output_norm_.denormalize(forward_eval(x).col(0));
}

Eigen::MatrixXd MlpModel::forward_all(const Eigen::MatrixXd& features) const {
  if (features.rows() != input_dim())
    throw std::invalid_argument("mlp forward: feature dimension mismatch");
  return output_norm_.denormalize_all(forward_eval(input_norm_.normalize_all(features)));
}

Eigen::MatrixXd MlpModel::forward_train(const Eigen::MatrixXd& x, double bn_eps) const {
  Eigen::MatrixXd h = x;
  const double B = static_cast<double>(x.cols());
  for (const auto& layer : layers_) {
    Eigen::MatrixXd z = (layer.W * h).colwise() + layer.b;
    if (layer.has_bn) {
      Eigen::VectorXd mu = z.rowwise().mean();
      Eigen::MatrixXd centered = z.colwise() - mu;
      Eigen::VectorXd var = centered.array().square().rowwise().sum() / B;
      Eigen::ArrayXd s = (var.array() + bn_eps).sqrt();
      z = ((centered.array().colwise() / s).colwise() * layer.gamma.array()).matrix().colwise() +
          layer.beta;
    }
    if (layer.relu) z = z.cwiseMax(0.0);
    h = std::move(z);
  }
  return h;
}

// ---------------------------------------------------------------------------
// Training internals

namespace {

struct LayerCache {
  Eigen::MatrixXd x_in;
  Eigen::MatrixXd xhat;      // BN-normalized pre-activation
  Eigen::ArrayXd inv_std;    // 1/sqrt(var + eps)
  Eigen::VectorXd mu, var;
  Eigen::MatrixXd pre_act;   // input to ReLU
};

struct LayerGrads {
  Eigen::MatrixXd dW;
  Eigen::VectorXd db;
  Eigen::VectorXd dgamma, dbeta;
};

Eigen::MatrixXd forward_cached(const MlpModel& model, const Eigen::MatrixXd& x,
                               double bn_eps, std::vector<LayerCache>& caches) {
  const double B = static_cast<double>(x.cols());
  caches.assign(model.layers().size(), {});
  Eigen::MatrixXd h = x;
  for (size_t l = 0; l < model.layers().size(); ++l) {
    const auto& layer = model.layers()[l];
    auto& cache = caches[l];
    cache.x_in = h;
    Eigen::MatrixXd z = (layer.W * h).colwise() + layer.b;
    if (layer.has_bn) {
      cache.mu = z.rowwise().mean();
      Eigen::MatrixXd centered = z.colwise() - cache.mu;
      cache.var = centered.array().square().rowwise().sum() / B;
      cache.inv_std = 1.0 / (cache.var.array() + bn_eps).sqrt();
      cache.xhat = centered.array().colwise() * cache.inv_std;
      z = (cache.xhat.array().colwise() * layer.gamma.array()).matrix().colwise() + layer.beta;
    }
    cache.pre_act = z;
    if (layer.relu) z = z.cwiseMax(0.0);
    h = std::move(z);
  }
  return h;
}

std::vector<LayerGrads> backward(const MlpModel& model,
                                 const std::vector<LayerCache>& caches,
                                 const Eigen::MatrixXd& dout) {
  const size_t L = model.layers().size();
  std::vector<LayerGrads> grads(L);
  Eigen::MatrixXd d = dout;
  for (size_t l = L; l-- > 0;) {
    const auto& layer = model.layers()[l];
    const auto& cache = caches[l];
    if (layer.relu) d = (cache.pre_act.array() > 0.0).select(d, 0.0);
    if (layer.has_bn) {
      const double B = static_cast<double>(d.cols());
      grads[l].dgamma = (d.array() * cache.xhat.array()).rowwise().sum();
      grads[l].dbeta = d.rowwise().sum();
      Eigen::MatrixXd dxhat = d.array().colwise() * layer.gamma.array();
      Eigen::VectorXd sum_dxhat = dxhat.rowwise().sum();
      Eigen::VectorXd sum_dxhat_xhat = (dxhat.array() * cache.xhat.array()).rowwise().sum();
      Eigen::MatrixXd t = (dxhat * B).colwise() - sum_dxhat;
      t -= (cache.xhat.array().colwise() * sum_dxhat_xhat.array()).matrix();
      d = (t.array().colwise() * (cache.inv_std / B)).matrix();
    }
    grads[l].dW = d * cache.x_in.transpose();
    grads[l].db = d.rowwise().sum();
    if (l > 0) d = layer.W.transpose() * d;
  }
  return grads;
}

class Adam {
 public:
  Adam(const MlpModel& model, const MlpConfig& cfg) : cfg_(cfg) {
    for (const auto& layer : model.layers()) {
      m_.push_back({Eigen::MatrixXd::Zero(layer.W.rows(), layer.W.cols()),
                    Eigen::VectorXd::Zero(layer.b.size()),
                    layer.has_bn ? Eigen::VectorXd::Zero(layer.gamma.size()) : Eigen::VectorXd(),
                    layer.has_bn ? Eigen::VectorXd::Zero(layer.beta.size()) : Eigen::VectorXd()});
      v_.push_back(m_.back());
    }
  }

  void step(MlpModel& model, const std::vector<LayerGrads>& grads) {
    ++t_;
    double corr1 = 1.0 - std::pow(cfg_.adam_beta1, t_);
    double corr2 = 1.0 - std::pow(cfg_.adam_beta2, t_);
    double alpha = cfg_.learning_rate * std::sqrt(corr2) / corr1;
    for (size_t l = 0; l < model.layers().size(); ++l) {
      auto& layer = model.layers()[l];
      update(layer.W, grads[l].dW, m_[l].W, v_[l].W, alpha);
      update(layer.b, grads[l].db, m_[l].b, v_[l].b, alpha);
      if (layer.has_bn) {
        update(layer.gamma, grads[l].dgamma, m_[l].gamma, v_[l].gamma, alpha);
        update(layer.beta, grads[l].dbeta, m_[l].beta, v_[l].beta, alpha);
      }
    }
  }

 private:
  struct Slot {
    Eigen::MatrixXd W;
    Eigen::VectorXd b, gamma, beta;
  };

  template <typename T, typename G>
  void update(T& param, const G& grad, T& m, T& v, double alpha) {
    m = cfg_.adam_beta1 * m + (1.0 - cfg_.adam_beta1) * grad;
    v = (cfg_.adam_beta2 * v.array() + (1.0 - cfg_.adam_beta2) * grad.array().square()).matrix();
    param.array() -= alpha * m.array() / (v.array().sqrt() + cfg_.adam_eps);
  }

  MlpConfig cfg_;
  int t_ = 0;
  std::vector<Slot> m_, v_;
};

}  // namespace

TrainResult train_mlp(const TrainingData& data, const MlpConfig& config) {
  const int N = static_cast<int>(data.features.cols());
  if (N == 0) throw std::invalid_argument("train_mlp: empty data");
  if (data.targets.cols() != N)
    throw std::invalid_argument("train_mlp: feature/target count mismatch");

  TrainResult result;
  result.model = MlpModel::init(static_cast<int>(data.features.rows()),
                                static_cast<int>(data.targets.rows()), config);
  result.model.input_norm() = Normalizer::fit(data.features);
  result.model.output_norm() = Normalizer::fit(data.targets);
  Eigen::MatrixXd X = result.model.input_norm().normalize_all(data.features);
  Eigen::MatrixXd Y = result.model.output_norm().normalize_all(data.targets);

  Adam optimizer(result.model, config);
  const int B = std::min(config.batch_size, N);

  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    RngStream shuffle_rng = RngStream::keyed(config.seed, 0xE90ull + epoch);
    std::vector<int> perm = shuffle_rng.permutation(N);
    double loss_sum = 0.0;
    int batches = 0;
    for (int off = 0; off + B <= N || (off == 0 && N < B); off += B) {
      int bs = std::min(B, N - off);
      Eigen::MatrixXd xb(X.rows(), bs), yb(Y.rows(), bs);
      for (int i = 0; i < bs; ++i) {
        xb.col(i) = X.col(perm[off + i]);
        yb.col(i) = Y.col(perm[off + i]);
      }
      std::vector<LayerCache> caches;
      Eigen::MatrixXd pred = forward_cached(result.model, xb, config.bn_eps, caches);
      Eigen::MatrixXd diff = pred - yb;
      double loss = diff.array().square().mean();
      if (!std::isfinite(loss))
        throw std::runtime_error("train_mlp: non-finite loss at epoch " + std::to_string(epoch));
      loss_sum += loss;
      ++batches;
      Eigen::MatrixXd dout = diff * (2.0 / (diff.rows() * diff.cols()));
      auto grads = backward(result.model, caches, dout);
      optimizer.step(result.model, grads);
      // running statistics track the post-step batches
      for (size_t l = 0; l < result.model.layers().size(); ++l) {
        auto& layer = result.model.layers()[l];
        if (!layer.has_bn) continue;
        layer.running_mean =
            (1.0 - config.bn_momentum) * layer.running_mean + config.bn_momentum * caches[l].mu;
        layer.running_var =
            (1.0 - config.bn_momentum) * layer.running_var + config.bn_momentum * caches[l].var;
      }
    }
    result.loss_curve.push_back(loss_sum / std::max(batches, 1));
    result.epochs = epoch + 1;
    if (result.loss_curve.back() <= config.target_loss) {
      result.reached_target = true;
      break;
    }
  }
  return result;
}

GradCheckResult gradient_check(const MlpModel& model, const Eigen::MatrixXd& x,
                               const Eigen::MatrixXd& y, double epsilon) {
  if (epsilon < 1e-7 || epsilon > 1e-3)
    throw std::invalid_argument("gradient_check: epsilon out of [1e-7, 1e-3]");
  MlpModel work = model;
  const double bn_eps = 1e-5;

  auto loss_of = [&]() {
    Eigen::MatrixXd pred = work.forward_train(x, bn_eps);
    return (pred - y).array().square().mean();
  };

  std::vector<LayerCache> caches;
  Eigen::MatrixXd pred = forward_cached(work, x, bn_eps, caches);
  Eigen::MatrixXd diff = pred - y;
  Eigen::MatrixXd dout = diff * (2.0 / (diff.rows() * diff.cols()));
  auto grads = backward(work, caches, dout);

  GradCheckResult res;
  double grad_sq = 0.0;

  auto check_tensor = [&](double* param, const double* analytic, int count) {
    for (int i = 0; i < count; ++i) {
      double saved = param[i];
      param[i] = saved + epsilon;
      double lp = loss_of();
      param[i] = saved - epsilon;
      double lm = loss_of();
      param[i] = saved;
      double numeric = (lp - lm) / (2.0 * epsilon);
      double denom = std::max(std::abs(analytic[i]) + std::abs(numeric), 1e-8);
      res.max_rel_error = std::max(res.max_rel_error, std::abs(analytic[i] - numeric) / denom);
      grad_sq += analytic[i] * analytic[i];
    }
  };

  for (size_t l = 0; l < work.layers().size(); ++l) {
    auto& layer = work.layers()[l];
    check_tensor(layer.W.data(), grads[l].dW.data(), static_cast<int>(layer.W.size()));
    check_tensor(layer.b.data(), grads[l].db.data(), static_cast<int>(layer.b.size()));
    if (layer.has_bn) {
      check_tensor(layer.gamma.data(), grads[l].dgamma.data(),
                   static_cast<int>(layer.gamma.size()));
      check_tensor(layer.beta.data(), grads[l].dbeta.data(),
                   static_cast<int>(layer.beta.size()));
    }
  }
  res.grad_norm = std::sqrt(grad_sq);
  return res;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

json vec_json(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd vec_from(const json& j) {
  auto v = j.get<std::vector<double>>();
  return Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<int>(v.size()));
}

}  // namespace

std::string MlpModel::to_json() const {
  json j;
  j["format"] = "nac-mlp";
  j["version"] = 1;
  j["bn_eps"] = bn_eps_;
  j["input_norm"] = {{"lo", vec_json(input_norm_.lo)}, {"range", vec_json(input_norm_.range)}};
  j["output_norm"] = {{"lo", vec_json(output_norm_.lo)}, {"range", vec_json(output_norm_.range)}};
  json layers = json::array();
  for (const auto& layer : layers_) {
    json lj;
    lj["out"] = layer.W.rows();
    lj["in"] = layer.W.cols();
    // row-major weight dump
    std::vector<double> w;
    w.reserve(static_cast<size_t>(layer.W.size()));
    for (int i = 0; i < layer.W.rows(); ++i)
      for (int k = 0; k < layer.W.cols(); ++k) w.push_back(layer.W(i, k));
    lj["W"] = w;
    lj["b"] = vec_json(layer.b);
    lj["relu"] = layer.relu;
    lj["batch_norm"] = layer.has_bn;
    if (layer.has_bn) {
      lj["gamma"] = vec_json(layer.gamma);
      lj["beta"] = vec_json(layer.beta);
      lj["running_mean"] = vec_json(layer.running_mean);
      lj["running_var"] = vec_json(layer.running_var);
    }
    layers.push_back(std::move(lj));
  }
  j["layers"] = layers;
  return j.dump();
}

MlpModel MlpModel::from_json(const std::string& text) {
  json j = json::parse(text);
  if (j.at("format").get<std::string>() != "nac-mlp")
    throw std::invalid_argument("not a model file");
  MlpModel m;
  m.bn_eps_ = j.at("bn_eps").get<double>();
  m.input_norm_.lo = vec_from(j.at("input_norm").at("lo"));
  m.input_norm_.range = vec_from(j.at("input_norm").at("range"));
  m.output_norm_.lo = vec_from(j.at("output_norm").at("lo"));
  m.output_norm_.range = vec_from(j.at("output_norm").at("range"));
  for (const auto& lj : j.at("layers")) {
    Layer layer;
    int out = lj.at("out").get<int>();
    int in = lj.at("in").get<int>();
    auto w = lj.at("W").get<std::vector<double>>();
    if (static_cast<int>(w.size()) != out * in)
      throw std::invalid_argument("model file: weight size mismatch");
    layer.W.resize(out, in);
    for (int i = 0; i < out; ++i)
      for (int k = 0; k < in; ++k) layer.W(i, k) = w[static_cast<size_t>(i) * in + k];
    layer.b = vec_from(lj.at("b"));
    layer.relu = lj.at("relu").get<bool>();
    layer.has_bn = lj.at("batch_norm").get<bool>();
    if (layer.has_bn) {
      layer.gamma = vec_from(lj.at("gamma"));
      layer.beta = vec_from(lj.at("beta"));
      layer.running_mean = vec_from(lj.at("running_mean"));
      layer.running_var = vec_from(lj.at("running_var"));
    }
    m.layers_.push_back(std::move(layer));
  }
  return m;
}

}  // namespace nac
