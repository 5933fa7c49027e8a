#include "dcoord/costs.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dcoord {

QuadraticTrackingCost::QuadraticTrackingCost(std::vector<double> reference)
    : reference_(std::move(reference)) {
  if (reference_.empty())
    throw std::invalid_argument("reference must have dimension >= 1");
  for (double v : reference_)
    if (!std::isfinite(v))
      throw std::invalid_argument("reference entries must be finite");
}

double QuadraticTrackingCost::eval(std::span<const double> y) const {
  if (y.size() != reference_.size())
    throw std::invalid_argument("cost eval dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double d = y[i] - reference_[i];
    s += d * d;
  }
  return s;
}

std::vector<double> QuadraticTrackingCost::grad(
    std::span<const double> y) const {
  if (y.size() != reference_.size())
    throw std::invalid_argument("cost grad dimension mismatch");
  std::vector<double> g(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) g[i] = 2.0 * (y[i] - reference_[i]);
  return g;
}

CostSet::CostSet(std::vector<QuadraticTrackingCost> costs)
    : costs_(std::move(costs)) {
  if (costs_.empty()) throw std::invalid_argument("cost set must be non-empty");
  dim_ = costs_.front().dimension();
  for (const auto& c : costs_)
    if (c.dimension() != dim_)
      throw std::invalid_argument("cost set members must share one dimension");
}

const QuadraticTrackingCost& CostSet::at(int i) const {
  if (i < 0 || i >= size())
    throw std::out_of_range("cost index " + std::to_string(i));
  return costs_[static_cast<std::size_t>(i)];
}

std::vector<double> CostSet::global_optimum() const {
  std::vector<double> mean(dim_, 0.0);
  for (const auto& c : costs_)
    for (int k = 0; k < dim_; ++k) mean[k] += c.reference()[k];
  for (int k = 0; k < dim_; ++k) mean[k] /= size();
  return mean;
}

CostSet CostSet::reschedule(int agent, std::vector<double> new_reference) const {
  if (agent < 0 || agent >= size())
    throw std::out_of_range("reschedule agent index " + std::to_string(agent));
  if (static_cast<int>(new_reference.size()) != dim_)
    throw std::invalid_argument("reschedule reference dimension mismatch");
  std::vector<QuadraticTrackingCost> next = costs_;
  next[static_cast<std::size_t>(agent)] =
      QuadraticTrackingCost(std::move(new_reference));
  return CostSet(std::move(next));
}

}  // namespace dcoord
