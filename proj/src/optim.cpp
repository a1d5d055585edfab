#include "gpnet/optim.hpp"

#include <cmath>

#include "gpnet/error.hpp"

namespace gpnet {

void Adam::step(ParameterSet& params, const Forward& fwd, double lr) {
  if (lr <= 0.0) throw ConfigError("adam: learning rate must be positive, got " + std::to_string(lr));
  ++t_;
  for (auto& p : params) {
    if (!fwd.bound(*p)) continue;
    apply(*p, fwd.grad_of(*p), lr);
  }
}

void Adam::update(Parameter& p, const Matrix& grad, double lr) {
  if (lr <= 0.0) throw ConfigError("adam: learning rate must be positive, got " + std::to_string(lr));
  ++t_;
  apply(p, grad, lr);
}

void Adam::apply(Parameter& p, const Matrix& grad, double lr) {
  if (!grad.same_shape(p.value)) {
    throw ShapeError("adam: gradient shape " + grad.shape_str() + " does not match parameter " +
                     p.name + " " + p.value.shape_str());
  }
  State& s = state_[&p];
  if (s.m.empty()) {
    s.m = Matrix(p.value.rows(), p.value.cols());
    s.v = Matrix(p.value.rows(), p.value.cols());
  }
  const double b1 = config_.beta1, b2 = config_.beta2;
  const double bc1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  double* w = p.value.data();
  double* m = s.m.data();
  double* v = s.v.data();
  const double* g = grad.data();
  for (std::size_t i = 0; i < p.value.size(); ++i) {
    const double gi = g[i] + config_.weight_decay * w[i];
    m[i] = b1 * m[i] + (1.0 - b1) * gi;
    v[i] = b2 * v[i] + (1.0 - b2) * gi * gi;
    const double mhat = m[i] / bc1;
    const double vhat = v[i] / bc2;
    w[i] -= lr * mhat / (std::sqrt(vhat) + config_.eps);
  }
}

}  // namespace gpnet
