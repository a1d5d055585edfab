#include "gpnet/params.hpp"

#include "gpnet/error.hpp"

namespace gpnet {

Parameter& ParameterSet::create(std::string name, Matrix init) {
  if (by_name_.count(name)) {
    throw ConfigError("duplicate parameter name: " + name);
  }
  auto p = std::make_unique<Parameter>();
  p->name = std::move(name);
  p->value = std::move(init);
  Parameter* raw = p.get();
  params_.push_back(std::move(p));
  by_name_[raw->name] = raw;
  return *raw;
}

Parameter* ParameterSet::find(const std::string& name) {
  auto it = by_name_.find(name);
  return it == by_name_.end() ? nullptr : it->second;
}

std::size_t ParameterSet::element_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p->value.size();
  return n;
}

ad::Value Forward::use(Parameter& p) {
  auto it = bindings_.find(&p);
  if (it != bindings_.end()) return it->second;
  ad::Value v = tape_.leaf(p.value, training_, p.name);
  bindings_.emplace(&p, v);
  return v;
}

Matrix Forward::grad_of(const Parameter& p) const {
  auto it = bindings_.find(&p);
  if (it == bindings_.end() || !it->second.has_grad()) {
    return Matrix(p.value.rows(), p.value.cols());
  }
  return it->second.grad();
}

}  // namespace gpnet
