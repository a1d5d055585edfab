#pragma once

#include <unordered_map>

#include "gpnet/matrix.hpp"
#include "gpnet/params.hpp"

namespace gpnet {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;  // classic coupled decay: g <- g + wd * w
};

// Adam with bias correction. State is keyed per parameter and allocated on
// first use; the step counter is shared by all parameters.
class Adam {
 public:
  explicit Adam(AdamConfig config = {}) : config_(config) {}

  // Applies one update to every parameter bound in `fwd`, in registry order.
  void step(ParameterSet& params, const Forward& fwd, double lr);

  // Single-parameter update, usable without a Forward episode.
  void update(Parameter& p, const Matrix& grad, double lr);

  long long step_count() const { return t_; }

 private:
  struct State {
    Matrix m;
    Matrix v;
  };
  void apply(Parameter& p, const Matrix& grad, double lr);

  AdamConfig config_;
  std::unordered_map<const Parameter*, State> state_;
  long long t_ = 0;
};

}  // namespace gpnet
