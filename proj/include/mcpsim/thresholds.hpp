#pragma once

// Closed-form domination thresholds for the multitype contact process with
// unequal death rates, and the two-state modulated point process it is
// compared against.

namespace mcpsim {

// The four-parameter family beta_2 = c*beta, delta_2 = 1,
// beta_1 = beta*alpha, delta_1 = alpha on Z^dim.
class McpParams {
public:
  // Throws DomainError unless beta, c, alpha > 0 and dim >= 1.
  McpParams(double beta, double c, double alpha, int dim);

  double beta() const noexcept { return beta_; }
  double c() const noexcept { return c_; }
  double alpha() const noexcept { return alpha_; }
  int dim() const noexcept { return dim_; }

  double birth1() const noexcept { return beta_ * alpha_; }
  double death1() const noexcept { return alpha_; }
  double birth2() const noexcept { return c_ * beta_; }
  double death2() const noexcept { return 1.0; }

  // Number of nearest neighbours, 2d.
  int degree() const noexcept { return 2 * dim_; }

private:
  double beta_;
  double c_;
  double alpha_;
  int dim_;
};

// Two-state background B_t in {0,1} flipping 0->1 at gamma*p and 1->0 at
// gamma*(1-p); arrivals occur at rate alpha0 (B=0) or alpha1 (B=1).
struct BromanParams {
  double alpha0 = 0.0;
  double alpha1 = 0.0;
  double gamma = 1.0;
  double p = 0.5;

  // Throws DomainError unless 0 <= alpha0 <= alpha1, gamma > 0, 0 < p < 1.
  void validate() const;
};

// General MCP rates; also used to describe the intensities of the Poisson
// streams of a graphical construction.
struct GenericMcpRates {
  double b1 = 0.0;  // 1-arrow intensity per directed edge
  double d1 = 0.0;  // type-1-only death marks per site
  double b2 = 0.0;  // 2-arrow intensity per directed edge
  double d2 = 0.0;  // death marks that kill type 2 (and CP particles)
  int dim = 1;

  void validate() const;

  static GenericMcpRates from(const McpParams& p) noexcept;
};

bool operator==(const GenericMcpRates& a, const GenericMcpRates& b) noexcept;

// Maximal Poisson rate dominated by the unblocked 2-arrow count process.
double lambda_bar_mcp(const McpParams& p);

// Maximal Poisson rate dominated by the modulated counting process started
// in equilibrium.
double lambda_bar_broman(const BromanParams& b);

// Parameters of the modulated process describing unblocked 2-arrows:
// alpha0 = 0, alpha1 = c*beta, gamma = alpha*(1+2d*beta), p = 1/(1+2d*beta).
BromanParams cpree_broman_params(const McpParams& p);

// The c solving lambda_bar_mcp = 1/(2d-1). Requires alpha > 1/(2d-1).
double c_star(double alpha, double beta, int dim);

// 2/(beta*d) + 4*d*alpha/(d*alpha-2): any larger c gives lambda_bar >= 2/d.
// Requires alpha > 2/d and beta > 2/d.
double sufficient_c_bound(double alpha, double beta, int dim);

// True iff lambda_bar_mcp(p) > lambda_c_ref.
bool survival_sufficient(const McpParams& p, double lambda_c_ref);

// Rigorous bounds on the contact-process critical rate:
// 1/(2d-1) <= lambda_c <= 2/d.
double lambda_c_lower_bound(int dim);
double lambda_c_upper_bound(int dim);

}  // namespace mcpsim
