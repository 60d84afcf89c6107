#pragma once

#include <Eigen/Dense>

namespace oactl {

// Axis-aligned box { w : lo <= w <= hi }.  Degenerate axes (lo_i == hi_i) are
// allowed; they model exactly-known coordinates.
class Box {
 public:
  Box() = default;
  Box(Eigen::VectorXd lo, Eigen::VectorXd hi);

  static Box centered(const Eigen::VectorXd& center,
                      const Eigen::VectorXd& halfwidth);

  int dim() const { return static_cast<int>(lo_.size()); }
  const Eigen::VectorXd& lo() const { return lo_; }
  const Eigen::VectorXd& hi() const { return hi_; }

  Eigen::VectorXd center() const { return 0.5 * (lo_ + hi_); }
  Eigen::VectorXd halfwidth() const { return 0.5 * (hi_ - lo_); }
  Eigen::VectorXd width() const { return hi_ - lo_; }

  // Componentwise containment with slack: lo_i - tol <= p_i <= hi_i + tol.
  bool contains(const Eigen::VectorXd& p, double tol = 0.0) const;

  // Largest violation of the bounds at p (0 when p is inside).
  double violation(const Eigen::VectorXd& p) const;

 private:
  Eigen::VectorXd lo_, hi_;
};

// Support function max { c.w : w in box } = c.center + sum_i |c_i| hw_i.
double box_support(const Eigen::VectorXd& c, const Box& box);

bool box_contains(const Box& box, const Eigen::VectorXd& p, double tol = 0.0);

// Polytope in H-representation { x : H x <= h }.
struct Polytope {
  Eigen::MatrixXd H;
  Eigen::VectorXd h;

  static Polytope from_box(const Box& box);

  int dim() const { return static_cast<int>(H.cols()); }
  bool contains(const Eigen::VectorXd& x, double tol = 0.0) const;
};

}  // namespace oactl
