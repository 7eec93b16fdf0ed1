#pragma once

// Laurent polynomials with positive coefficients, evaluated in logarithmic coordinates x = e^t.

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mirrorgamma/toric/fan.hpp"

namespace mirrorgamma {

struct LaurentTerm {
  double coeff = 1.0;
  IntVector exponent;
};

class LaurentPoly {
 public:
  LaurentPoly() = default;
  LaurentPoly(int dim, std::vector<LaurentTerm> terms) : dim_(dim), terms_(std::move(terms)) {
    for (const auto& t : terms_)
      if (static_cast<int>(t.exponent.size()) != dim_) throw std::invalid_argument("exponent has wrong dimension");
  }

  int dim() const { return dim_; }
  const std::vector<LaurentTerm>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  /// W(e^t).
  double operator()(const double* t) const {
    double s = 0.0;
    for (const auto& term : terms_) s += term.coeff * std::exp(exponent_dot(term, t));
    return s;
  }
  double operator()(const Eigen::VectorXd& t) const { return (*this)(t.data()); }

  /// Value, gradient and Hessian of f(t) = W(e^t).
  double derivatives(const Eigen::VectorXd& t, Eigen::VectorXd& grad, Eigen::MatrixXd& hess) const {
    grad = Eigen::VectorXd::Zero(dim_);
    hess = Eigen::MatrixXd::Zero(dim_, dim_);
    double f = 0.0;
    Eigen::VectorXd b(dim_);
    for (const auto& term : terms_) {
      for (int a = 0; a < dim_; ++a) b[a] = term.exponent[a];
      const double w = term.coeff * std::exp(b.dot(t));
      f += w;
      grad += w * b;
      hess += w * b * b.transpose();
    }
    return f;
  }

  std::string to_string() const {
    std::ostringstream os;
    for (std::size_t k = 0; k < terms_.size(); ++k) {
      if (k) os << " + ";
      os << terms_[k].coeff << "*x^(";
      for (int a = 0; a < dim_; ++a) os << (a ? "," : "") << terms_[k].exponent[a];
      os << ")";
    }
    return os.str();
  }

 private:
  static double exponent_dot(const LaurentTerm& term, const double* t) {
    double e = 0.0;
    for (std::size_t a = 0; a < term.exponent.size(); ++a) e += term.exponent[a] * t[a];
    return e;
  }

  int dim_ = 0;
  std::vector<LaurentTerm> terms_;
};

/// W = sum_j e^{-lambda_j} x^{b_j}.
inline LaurentPoly build_mirror(const FanData& fan, const std::vector<double>& lambda) {
  if (static_cast<int>(lambda.size()) != fan.num_rays()) throw std::invalid_argument("lambda needs one entry per ray");
  std::vector<LaurentTerm> terms;
  for (int j = 0; j < fan.num_rays(); ++j) terms.push_back({std::exp(-lambda[j]), fan.rays[j]});
  return LaurentPoly(fan.dim, std::move(terms));
}

/// W = W^{(0)} + sum_i W^{(i)}, grouped by a partition of the rays.
struct MirrorPartition {
  LaurentPoly W0;
  std::vector<LaurentPoly> Ws;
};

inline MirrorPartition build_mirror_partition(const FanData& fan, const std::vector<double>& lambda,
                                              const std::vector<std::vector<int>>& parts) {
  const LaurentPoly W = build_mirror(fan, lambda);
  std::vector<int> owner(fan.num_rays(), -1);
  for (std::size_t i = 0; i < parts.size(); ++i)
    for (int j : parts[i]) {
      if (j < 0 || j >= fan.num_rays()) throw std::invalid_argument("partition names a ray that does not exist");
      if (owner[j] != -1) throw std::invalid_argument("partition parts overlap");
      owner[j] = static_cast<int>(i);
    }
  std::vector<std::vector<LaurentTerm>> grouped(parts.size());
  std::vector<LaurentTerm> rest;
  for (int j = 0; j < fan.num_rays(); ++j) (owner[j] < 0 ? rest : grouped[owner[j]]).push_back(W.terms()[j]);
  MirrorPartition out{LaurentPoly(fan.dim, std::move(rest)), {}};
  for (auto& g : grouped) out.Ws.emplace_back(fan.dim, std::move(g));
  return out;
}

}  // namespace mirrorgamma
