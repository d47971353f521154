#include "lsr/metric.hpp"

#include <cmath>
#include <stdexcept>

namespace lsr {

std::string to_string(Metric m) {
  switch (m) {
    case Metric::L1:
      return "l1";
    case Metric::L2:
      return "l2";
    case Metric::Linf:
      return "linf";
  }
  throw std::logic_error("unknown metric");
}

Metric metric_from_string(const std::string& s) {
  if (s == "l1" || s == "L1") return Metric::L1;
  if (s == "l2" || s == "L2") return Metric::L2;
  if (s == "linf" || s == "Linf" || s == "LInf") return Metric::Linf;
  throw std::invalid_argument("unknown metric '" + s + "' (expected l1, l2 or linf)");
}

void validate_tuple(const TransitionTuple& t) {
  if (t.z1.size() != t.z2.size())
    throw std::invalid_argument("tuple endpoints have different dimensions");
  if (t.action && !t.u)
    throw std::invalid_argument("action tuple (a=1) is missing action specifics u");
  if (!t.action && t.u)
    throw std::invalid_argument("no-action tuple (a=0) carries action specifics u");
  if (!t.z1.allFinite() || !t.z2.allFinite())
    throw std::invalid_argument("tuple contains non-finite coordinates");
}

double distance(const Vector& z1, const Vector& z2, Metric m) {
  if (z1.size() != z2.size())
    throw std::invalid_argument("distance: dimension mismatch");
  switch (m) {
    case Metric::L1:
      return (z1 - z2).cwiseAbs().sum();
    case Metric::L2:
      return (z1 - z2).norm();
    case Metric::Linf:
      return z1.size() == 0 ? 0.0 : (z1 - z2).cwiseAbs().maxCoeff();
  }
  throw std::logic_error("unknown metric");
}

bool within_epsilon(const double* a, const double* b, Eigen::Index dim,
                    Metric m, double eps) {
  switch (m) {
    case Metric::L1: {
      double acc = 0.0;
      for (Eigen::Index i = 0; i < dim; ++i) {
        acc += std::abs(a[i] - b[i]);
        if (acc >= eps) return false;
      }
      return true;
    }
    case Metric::L2: {
      const double cap = eps * eps;
      double acc = 0.0;
      for (Eigen::Index i = 0; i < dim; ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
        if (acc >= cap) return false;
      }
      return true;
    }
    case Metric::Linf: {
      for (Eigen::Index i = 0; i < dim; ++i) {
        if (std::abs(a[i] - b[i]) >= eps) return false;
      }
      return true;
    }
  }
  throw std::logic_error("unknown metric");
}

Vector metric_subgradient(const Vector& diff, Metric m) {
  const Eigen::Index n = diff.size();
  switch (m) {
    case Metric::L1: {
      Vector g(n);
      for (Eigen::Index i = 0; i < n; ++i)
        g[i] = diff[i] > 0.0 ? 1.0 : (diff[i] < 0.0 ? -1.0 : 0.0);
      return g;
    }
    case Metric::L2: {
      const double norm = diff.norm();
      if (norm == 0.0) return Vector::Zero(n);
      return diff / norm;
    }
    case Metric::Linf: {
      Vector g = Vector::Zero(n);
      if (n == 0) return g;
      Eigen::Index best = 0;
      for (Eigen::Index i = 1; i < n; ++i)
        if (std::abs(diff[i]) > std::abs(diff[best])) best = i;
      g[best] = diff[best] > 0.0 ? 1.0 : (diff[best] < 0.0 ? -1.0 : 0.0);
      return g;
    }
  }
  throw std::logic_error("unknown metric");
}

double estimate_epsilon_from_distances(std::span<const double> distances,
                                       double w_eps) {
  if (distances.empty())
    throw std::invalid_argument("estimate_epsilon: no no-action pairs");
  double mean = 0.0;
  for (double d : distances) mean += d;
  mean /= static_cast<double>(distances.size());
  double var = 0.0;
  for (double d : distances) var += (d - mean) * (d - mean);
  var /= static_cast<double>(distances.size());  // population convention
  const double eps = mean + w_eps * std::sqrt(var);
  if (!(eps > 0.0))
    throw std::runtime_error("estimate_epsilon: non-positive result (degenerate w_eps)");
  return eps;
}

double estimate_epsilon(std::span<const TransitionTuple> no_action_pairs,
                        Metric m, double w_eps) {
  if (no_action_pairs.empty())
    throw std::invalid_argument("estimate_epsilon: no no-action pairs");
  std::vector<double> d;
  d.reserve(no_action_pairs.size());
  for (const auto& t : no_action_pairs) {
    if (t.action)
      throw std::invalid_argument("estimate_epsilon: input contains an action tuple");
    d.push_back(distance(t.z1, t.z2, m));
  }
  return estimate_epsilon_from_distances(d, w_eps);
}

}  // namespace lsr
