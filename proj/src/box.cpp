#include "oactl/box.hpp"

#include "oactl/errors.hpp"

namespace oactl {

Box::Box(Eigen::VectorXd lo, Eigen::VectorXd hi)
    : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (lo_.size() == 0 || lo_.size() != hi_.size())
    throw InputError("box bounds must be non-empty and of equal dimension");
  for (Eigen::Index i = 0; i < lo_.size(); ++i) {
    if (!std::isfinite(lo_[i]) || !std::isfinite(hi_[i]))
      throw InputError("box bounds must be finite");
    if (lo_[i] > hi_[i])
      throw InputError("box has lo > hi on axis " + std::to_string(i + 1));
  }
}

Box Box::centered(const Eigen::VectorXd& center,
                  const Eigen::VectorXd& halfwidth) {
  if ((halfwidth.array() < 0).any())
    throw InputError("box halfwidth must be nonnegative");
  return Box(center - halfwidth, center + halfwidth);
}

bool Box::contains(const Eigen::VectorXd& p, double tol) const {
  return violation(p) <= tol;
}

double Box::violation(const Eigen::VectorXd& p) const {
  if (p.size() != lo_.size())
    throw InputError("point dimension does not match box dimension");
  double v = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    v = std::max(v, lo_[i] - p[i]);
    v = std::max(v, p[i] - hi_[i]);
  }
  return v;
}

double box_support(const Eigen::VectorXd& c, const Box& box) {
  if (c.size() != box.dim())
    throw InputError("support direction dimension does not match box");
  return c.dot(box.center()) + c.cwiseAbs().dot(box.halfwidth());
}

bool box_contains(const Box& box, const Eigen::VectorXd& p, double tol) {
  return box.contains(p, tol);
}

Polytope Polytope::from_box(const Box& box) {
  const int n = box.dim();
  Polytope poly;
  poly.H = Eigen::MatrixXd::Zero(2 * n, n);
  poly.h = Eigen::VectorXd::Zero(2 * n);
  for (int i = 0; i < n; ++i) {
    poly.H(i, i) = 1.0;
    poly.h(i) = box.hi()[i];
    poly.H(n + i, i) = -1.0;
    poly.h(n + i) = -box.lo()[i];
  }
  return poly;
}

bool Polytope::contains(const Eigen::VectorXd& x, double tol) const {
  if (x.size() != H.cols())
    throw InputError("point dimension does not match polytope dimension");
  return ((H * x - h).array() <= tol).all();
}

}  // namespace oactl
