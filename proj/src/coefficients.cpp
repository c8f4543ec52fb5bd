#include "conesa/coefficients.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/binomial.hpp>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include "conesa/errors.hpp"
#include "conesa/normal.hpp"

namespace conesa {
namespace {

// Outside [-12, 12] every integrand here is below 1e-30.
constexpr double kLower = -12.0;
constexpr double kUpper = 12.0;
constexpr double kRelativeTolerance = 1e-14;
constexpr unsigned kMaxDepth = 20;

void validate(const CoefficientKey& key) {
  if (key.alpha < 0 || key.beta < 0 || key.mu < 1 || key.mu > key.lambda) {
    throw ContractViolation("invalid coefficient key e^{" + std::to_string(key.alpha) + "," +
                            std::to_string(key.beta) + "}_{" + std::to_string(key.mu) + "," +
                            std::to_string(key.lambda) + "}: need 1 <= mu <= lambda, alpha, beta >= 0");
  }
}

}  // namespace

namespace detail {

double coefficient_integral(int alpha, int beta, int mu, int lambda) {
  if (lambda < 1 || mu < 0 || mu > lambda || alpha < 0 || beta < 0) {
    throw ContractViolation("coefficient integral index out of range");
  }
  if (mu == lambda) return 0.0;
  if (mu < alpha) {
    throw ContractViolation("coefficient integral requires mu >= alpha when mu < lambda");
  }

  const int phi_power = lambda - mu - 1;
  const int tail_power = mu - alpha;
  const double gauss_rate = 0.5 * (alpha + 1);
  auto integrand = [=](double t) {
    double value = std::exp(-gauss_rate * t * t);
    if (beta > 0) value *= std::pow(t, beta);
    if (phi_power > 0) value *= std::pow(normal_cdf(t), phi_power);
    if (tail_power > 0) value *= std::pow(normal_sf(t), tail_power);
    return value;
  };

  using Quadrature = boost::math::quadrature::gauss_kronrod<double, 31>;
  const double integral = Quadrature::integrate(integrand, kLower, kUpper, kMaxDepth, kRelativeTolerance);

  const double prefactor = (lambda - mu) *
                           boost::math::binomial_coefficient<double>(static_cast<unsigned>(lambda),
                                                                     static_cast<unsigned>(mu)) /
                           std::pow(std::sqrt(2.0 * std::numbers::pi), alpha + 1);
  return prefactor * integral;
}

}  // namespace detail

double CoefficientCache::get(const CoefficientKey& key) {
  {
    std::shared_lock lock(mutex_);
    if (auto it = values_.find(key); it != values_.end()) return it->second;
  }
  const double value = detail::coefficient_integral(key.alpha, key.beta, key.mu, key.lambda);
  std::unique_lock lock(mutex_);
  // A concurrent writer may have inserted the same key; keep its value.
  return values_.try_emplace(key, value).first->second;
}

std::size_t CoefficientCache::size() const {
  std::shared_lock lock(mutex_);
  return values_.size();
}

void CoefficientCache::clear() {
  std::unique_lock lock(mutex_);
  values_.clear();
}

CoefficientCache& default_coefficient_cache() {
  static CoefficientCache cache;
  return cache;
}

double generalized_progress_coefficient(const CoefficientKey& key) {
  validate(key);
  return default_coefficient_cache().get(key);
}

double c_mu_mu_lambda(int mu, int lambda) {
  return generalized_progress_coefficient({1, 0, mu, lambda});
}

double e11(int mu, int lambda) {
  return generalized_progress_coefficient({1, 1, mu, lambda});
}

AveragedOrderCoefficients averaged_order_coefficients(int mu, int lambda) {
  validate({0, 0, mu, lambda});
  double sum01 = 0.0;
  double sum02 = 0.0;
  for (int m = 1; m <= mu; ++m) {
    sum01 += detail::coefficient_integral(0, 1, m - 1, lambda);
    sum02 += detail::coefficient_integral(0, 2, m - 1, lambda);
  }
  return {sum01 / mu, sum02 / mu};
}

}  // namespace conesa
