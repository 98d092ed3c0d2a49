#include "secretprot/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "secretprot/rng.hpp"

namespace secretprot {
namespace {

// rng streams
constexpr std::uint64_t kSampleStream = 1;
constexpr std::uint64_t kNoiseStream = 2;
constexpr std::uint64_t kSynthModel = 10;
constexpr std::uint64_t kSynthFeatures = 11;
constexpr std::uint64_t kSynthTargets = 12;
constexpr std::uint64_t kSynthSecrets = 13;

double l2_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

void check_payload(const std::vector<double>& payload, size_t dim) {
  if (payload.size() != dim + 1)
    throw std::invalid_argument("payload dimension mismatch with model");
}

}  // namespace

std::vector<double> clip(std::vector<double> v, double C) {
  double norm = l2_norm(v);
  if (norm > C) {
    double scale = C / norm;
    for (double& x : v) x *= scale;
  }
  return v;
}

ModelAdapter linear_regression_model(int dim) {
  ModelAdapter m;
  m.theta.assign(dim, 0.0);
  m.loss_grad = [dim](const std::vector<double>& theta,
                      const std::vector<double>& payload) {
    check_payload(payload, dim);
    double pred = 0.0;
    for (int c = 0; c < dim; ++c) pred += theta[c] * payload[c];
    double residual = pred - payload[dim];
    std::vector<double> g(dim);
    for (int c = 0; c < dim; ++c) g[c] = residual * payload[c];
    return g;
  };
  m.loss_value = [dim](const std::vector<double>& theta,
                       const std::vector<double>& payload) {
    check_payload(payload, dim);
    double pred = 0.0;
    for (int c = 0; c < dim; ++c) pred += theta[c] * payload[c];
    double residual = pred - payload[dim];
    return 0.5 * residual * residual;
  };
  m.update = [](std::vector<double>& theta, const std::vector<double>& g,
                double lr) {
    for (size_t c = 0; c < theta.size(); ++c) theta[c] -= lr * g[c];
  };
  return m;
}

ModelAdapter logistic_regression_model(int dim) {
  ModelAdapter m;
  m.theta.assign(dim, 0.0);
  auto sigmoid = [](double z) { return 1.0 / (1.0 + std::exp(-z)); };
  m.loss_grad = [dim, sigmoid](const std::vector<double>& theta,
                               const std::vector<double>& payload) {
    check_payload(payload, dim);
    double z = 0.0;
    for (int c = 0; c < dim; ++c) z += theta[c] * payload[c];
    double label = payload[dim] > 0.0 ? 1.0 : 0.0;
    double err = sigmoid(z) - label;
    std::vector<double> g(dim);
    for (int c = 0; c < dim; ++c) g[c] = err * payload[c];
    return g;
  };
  m.loss_value = [dim, sigmoid](const std::vector<double>& theta,
                                const std::vector<double>& payload) {
    check_payload(payload, dim);
    double z = 0.0;
    for (int c = 0; c < dim; ++c) z += theta[c] * payload[c];
    double label = payload[dim] > 0.0 ? 1.0 : 0.0;
    double p = std::clamp(sigmoid(z), 1e-12, 1.0 - 1e-12);
    return -(label * std::log(p) + (1.0 - label) * std::log1p(-p));
  };
  m.update = [](std::vector<double>& theta, const std::vector<double>& g,
                double lr) {
    for (size_t c = 0; c < theta.size(); ++c) theta[c] -= lr * g[c];
  };
  return m;
}

TrainTrace train(const SecretMap& map, const SamplingPlan& plan,
                 ModelAdapter& model, const RunConfig& config,
                 std::uint64_t rng_seed, double learning_rate) {
  const size_t n = map.examples.size();
  if (plan.probs.size() != n)
    throw std::invalid_argument("sampling plan does not match dataset size");
  const double B = config.batch_target;
  const double C = config.clip_norm;
  const double sigma = plan.sigma;
  const size_t dim = model.theta.size();

  TrainTrace trace;
  std::vector<double> g(dim);
  for (long t = 0; t < config.rounds; ++t) {
    std::fill(g.begin(), g.end(), 0.0);
    int batch = 0;
    for (size_t i = 0; i < n; ++i) {
      if (counter_uniform(rng_seed, kSampleStream, t, i) >= plan.probs[i])
        continue;
      ++batch;
      std::vector<double> gi =
          clip(model.loss_grad(model.theta, map.examples[i].payload), C);
      if (gi.size() != dim)
        throw std::invalid_argument("gradient dimension mismatch");
      for (size_t c = 0; c < dim; ++c) g[c] += gi[c];
    }
    for (size_t c = 0; c < dim; ++c) g[c] /= B;
    trace.batch_sizes.push_back(batch);
    trace.grad_norms.push_back(l2_norm(g));
    if (sigma > 0.0) {
      double noise_scale = C * sigma / B;
      for (size_t c = 0; c < dim; ++c)
        g[c] += noise_scale * counter_gaussian(rng_seed, kNoiseStream, t, c);
    }
    model.update(model.theta, g, learning_rate);

    double loss = 0.0;
    for (const auto& e : map.examples) loss += model.loss_value(model.theta, e.payload);
    trace.round_losses.push_back(n > 0 ? loss / static_cast<double>(n) : 0.0);
  }
  trace.theta = model.theta;
  trace.eval_loss = trace.round_losses.empty() ? 0.0 : trace.round_losses.back();
  return trace;
}

SecretMap make_synthetic(int n, int m, double skew, int dim,
                         std::uint64_t seed) {
  if (n < 1 || m < 1 || dim < 1)
    throw std::invalid_argument("make_synthetic: n, m, dim must be >= 1");
  std::vector<double> true_theta(dim);
  for (int c = 0; c < dim; ++c)
    true_theta[c] = counter_gaussian(seed, kSynthModel, c);

  std::vector<ExampleRecord> examples(n);
  for (int i = 0; i < n; ++i) {
    ExampleRecord& e = examples[i];
    e.id = "ex" + std::to_string(i);
    e.payload.resize(dim + 1);
    double target = 0.0;
    for (int c = 0; c < dim; ++c) {
      e.payload[c] = counter_gaussian(seed, kSynthFeatures, i, c);
      target += true_theta[c] * e.payload[c];
    }
    e.payload[dim] = target + 0.1 * counter_gaussian(seed, kSynthTargets, i);
  }

  std::vector<SecretSpec> secrets(m);
  for (int j = 0; j < m; ++j) {
    SecretSpec& s = secrets[j];
    s.id = "s" + std::to_string(j);
    s.prior_p = 1e-10;
    s.posterior_r =
        2e-4 + (1e-3 - 2e-4) * counter_uniform(seed, kSynthSecrets, j);

    // power-law incidence sizes: heavily overrepresented head secrets
    int size = static_cast<int>(
        std::lround(0.25 * n * std::pow(static_cast<double>(j + 1), -skew)));
    size = std::clamp(size, 1, n);
    CounterRng rng(seed, kSynthSecrets + 100 + static_cast<std::uint64_t>(j));
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    for (int t = 0; t < size; ++t) {
      int pick = t + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - t)));
      std::swap(idx[t], idx[pick]);
      examples[idx[t]].secret_ids.push_back(s.id);
    }
  }
  return make_secret_map(std::move(examples), std::move(secrets));
}

}  // namespace secretprot
