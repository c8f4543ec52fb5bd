#pragma once

#include <compare>
#include <map>
#include <shared_mutex>

namespace conesa {

/// Index of the generalized progress coefficient e^{alpha,beta}_{mu,lambda}.
struct CoefficientKey {
  int alpha = 0;
  int beta = 0;
  int mu = 1;
  int lambda = 1;

  auto operator<=>(const CoefficientKey&) const = default;
};

/// Thread-safe memo table for coefficient values. Concurrent readers share a
/// lock; a miss evaluates the integral outside the lock and inserts.
class CoefficientCache {
 public:
  double get(const CoefficientKey& key);
  std::size_t size() const;
  void clear();

 private:
  mutable std::shared_mutex mutex_;
  std::map<CoefficientKey, double> values_;
};

/// Process-wide cache used by the free functions below.
CoefficientCache& default_coefficient_cache();

/// e^{alpha,beta}_{mu,lambda} =
///   (lambda - mu) / sqrt(2 pi)^(alpha + 1) * binom(lambda, mu)
///   * integral t^beta exp(-(alpha + 1) t^2 / 2) Phi(t)^(lambda - mu - 1)
///     (1 - Phi(t))^(mu - alpha) dt
///
/// Requires 1 <= mu <= lambda and alpha, beta >= 0. When mu == lambda the
/// prefactor vanishes and the result is exactly 0.
double generalized_progress_coefficient(const CoefficientKey& key);

/// c_{mu/mu,lambda} = e^{1,0}_{mu,lambda}.
double c_mu_mu_lambda(int mu, int lambda);

/// e^{1,1}_{mu,lambda}.
double e11(int mu, int lambda);

struct AveragedOrderCoefficients {
  double avg_e01 = 0.0;  ///< (1/mu) sum_{m=1..mu} e^{0,1}_{(m-1),lambda}
  double avg_e02 = 0.0;  ///< (1/mu) sum_{m=1..mu} e^{0,2}_{(m-1),lambda}
};

/// Term-by-term sums over the first mu order statistics of lambda standard
/// normals. Identities: avg_e01 = c_{mu/mu,lambda}, avg_e02 = 1 + e^{1,1}.
AveragedOrderCoefficients averaged_order_coefficients(int mu, int lambda);

namespace detail {

/// Uncached quadrature of the defining integral. Unlike the public entry
/// point this accepts mu = 0 (needed for e^{0,beta}_{(m-1),lambda} at m = 1)
/// provided mu >= alpha.
double coefficient_integral(int alpha, int beta, int mu, int lambda);

}  // namespace detail

}  // namespace conesa
