#include "mcpsim/thresholds.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mcpsim/errors.hpp"

namespace mcpsim {
namespace {

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

void require_dim(int dim) {
  if (dim < 1) throw DomainError("dim must be >= 1, got " + std::to_string(dim));
}

// Smaller root of x^2 - sum*x + product = 0 with discriminant disc,
// written as 2*product/(sum + sqrt(disc)) to avoid cancellation.
double smaller_root(double sum, double disc, double product) {
  const double root = std::sqrt(std::max(disc, 0.0));
  const double denom = sum + root;
  return denom > 0.0 ? 2.0 * product / denom : 0.0;
}

}  // namespace

McpParams::McpParams(double beta, double c, double alpha, int dim)
    : beta_(beta), c_(c), alpha_(alpha), dim_(dim) {
  if (!positive_finite(beta)) throw DomainError("beta must be > 0");
  if (!positive_finite(c)) throw DomainError("c must be > 0");
  if (!positive_finite(alpha)) throw DomainError("alpha must be > 0");
  require_dim(dim);
}

void BromanParams::validate() const {
  if (!std::isfinite(alpha0) || alpha0 < 0.0) throw DomainError("alpha0 must be >= 0");
  if (!std::isfinite(alpha1) || alpha1 < alpha0) throw DomainError("alpha1 must be >= alpha0");
  if (!positive_finite(gamma)) throw DomainError("gamma must be > 0");
  if (!(p > 0.0 && p < 1.0)) throw DomainError("p must lie in (0,1)");
}

void GenericMcpRates::validate() const {
  for (double r : {b1, d1, b2, d2}) {
    if (!std::isfinite(r) || r < 0.0) throw DomainError("rates must be finite and >= 0");
  }
  require_dim(dim);
}

GenericMcpRates GenericMcpRates::from(const McpParams& p) noexcept {
  return {p.birth1(), p.death1(), p.birth2(), p.death2(), p.dim()};
}

bool operator==(const GenericMcpRates& a, const GenericMcpRates& b) noexcept {
  return a.b1 == b.b1 && a.d1 == b.d1 && a.b2 == b.b2 && a.d2 == b.d2 && a.dim == b.dim;
}

double lambda_bar_mcp(const McpParams& p) {
  const double beta = p.beta();
  const double cb = p.c() * beta;
  const double a = p.alpha();
  const double two_d = 2.0 * p.dim();
  const double sum = cb + a + two_d * beta * a;
  const double diff = cb - a - two_d * beta * a;
  const double disc = diff * diff + 4.0 * two_d * a * p.c() * beta * beta;
  // Product of the two roots is c*beta*alpha.
  return smaller_root(sum, disc, cb * a);
}

double lambda_bar_broman(const BromanParams& b) {
  b.validate();
  const double spread = b.alpha1 - b.alpha0;
  const double sum = b.alpha1 + b.alpha0 + b.gamma;
  const double diff = spread - b.gamma;
  const double disc = diff * diff + 4.0 * b.gamma * (1.0 - b.p) * spread;
  const double product = b.alpha0 * b.alpha1 + b.gamma * (b.p * b.alpha1 + (1.0 - b.p) * b.alpha0);
  return smaller_root(sum, disc, product);
}

BromanParams cpree_broman_params(const McpParams& p) {
  const double k = 1.0 + 2.0 * p.dim() * p.beta();
  return {0.0, p.c() * p.beta(), p.alpha() * k, 1.0 / k};
}

double c_star(double alpha, double beta, int dim) {
  require_dim(dim);
  if (!positive_finite(beta)) throw DomainError("beta must be > 0");
  const double m = 2.0 * dim - 1.0;
  if (!std::isfinite(alpha) || !(alpha > 1.0 / m)) {
    throw DomainError("c* requires alpha > 1/(2d-1)");
  }
  const double num = alpha * (1.0 + 2.0 * dim * beta) * m - 1.0;
  const double den = beta * m * (alpha * m - 1.0);
  return num / den;
}

double sufficient_c_bound(double alpha, double beta, int dim) {
  require_dim(dim);
  const double d = dim;
  if (!std::isfinite(alpha) || !(alpha > 2.0 / d)) throw DomainError("bound requires alpha > 2/d");
  if (!std::isfinite(beta) || !(beta > 2.0 / d)) throw DomainError("bound requires beta > 2/d");
  return 2.0 / (beta * d) + 4.0 * d * alpha / (d * alpha - 2.0);
}

bool survival_sufficient(const McpParams& p, double lambda_c_ref) {
  if (!positive_finite(lambda_c_ref)) throw DomainError("lambda_c reference must be > 0");
  return lambda_bar_mcp(p) > lambda_c_ref;
}

double lambda_c_lower_bound(int dim) {
  require_dim(dim);
  return 1.0 / (2.0 * dim - 1.0);
}

double lambda_c_upper_bound(int dim) {
  require_dim(dim);
  return 2.0 / dim;
}

}  // namespace mcpsim
