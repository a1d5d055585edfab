#pragma once

#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "gpnet/autodiff.hpp"
#include "gpnet/matrix.hpp"

namespace gpnet {

// A learnable matrix that outlives any single tape.
struct Parameter {
  std::string name;
  Matrix value;
};

// Ordered registry of parameters. Creation order is the canonical order for
// optimizer sweeps and checkpoints, which keeps runs reproducible.
class ParameterSet {
 public:
  Parameter& create(std::string name, Matrix init);
  Parameter* find(const std::string& name);

  std::size_t size() const { return params_.size(); }
  std::size_t element_count() const;
  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

 private:
  std::vector<std::unique_ptr<Parameter>> params_;
  std::unordered_map<std::string, Parameter*> by_name_;
};

// One forward/backward episode: a tape plus the parameter bindings made on
// it. Binding the same Parameter twice returns the same node, so fan-out
// gradients accumulate correctly.
class Forward {
 public:
  explicit Forward(bool training = true) : training_(training) {}

  ad::Value use(Parameter& p);
  ad::Value constant(Matrix m) { return tape_.constant(std::move(m)); }
  ad::Tape& tape() { return tape_; }
  bool training() const { return training_; }

  // Gradient of a bound parameter after backward(); zeros if the parameter
  // did not participate in the loss.
  Matrix grad_of(const Parameter& p) const;
  bool bound(const Parameter& p) const { return bindings_.count(&p) > 0; }

 private:
  ad::Tape tape_;
  std::unordered_map<const Parameter*, ad::Value> bindings_;
  bool training_;
};

}  // namespace gpnet
