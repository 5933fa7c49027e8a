// Quadratic tracking objectives ||y - r||^2 with the derived quantities the
// optimizer consumes: gradients, the gradient Lipschitz constant, and the
// analytic global optimum of the summed cost.
#pragma once

#include <span>
#include <vector>

namespace dcoord {

class QuadraticTrackingCost {
 public:
  explicit QuadraticTrackingCost(std::vector<double> reference);

  int dimension() const { return static_cast<int>(reference_.size()); }
  const std::vector<double>& reference() const { return reference_; }

  double eval(std::span<const double> y) const;
  std::vector<double> grad(std::span<const double> y) const;  // 2(y - r)

 private:
  std::vector<double> reference_;
};

class CostSet {
 public:
  explicit CostSet(std::vector<QuadraticTrackingCost> costs);

  int size() const { return static_cast<int>(costs_.size()); }
  int dimension() const { return dim_; }
  const QuadraticTrackingCost& at(int i) const;

  /// Gradient Lipschitz constant of every member; 2 for the quadratic family.
  double lipschitz_constant() const { return 2.0; }

  /// The unique minimizer of the summed cost: the mean of the references.
  std::vector<double> global_optimum() const;

  /// New set with agent's reference replaced; all other members untouched.
  CostSet reschedule(int agent, std::vector<double> new_reference) const;

 private:
  std::vector<QuadraticTrackingCost> costs_;
  int dim_ = 0;
};

}  // namespace dcoord
