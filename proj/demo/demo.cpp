// Walks through the library: special functions, the two mixture families, and one identity check.
#include <cstdio>

#include "nvmix/nvmix.hpp"

int main() {
  using namespace nvmix;

  std::printf("Gamma(4.7)            = %.17g\n", nvmix::gamma(4.7));
  std::printf("gamma(1.5, 2)         = %.17g\n", lower_inc_gamma(1.5, 2.0));
  std::printf("Gamma(-0.5, 1)        = %.17g\n", upper_inc_gamma(-0.5, 1.0));
  std::printf("Gamma(0, 1) = E1(1)   = %.17g\n", upper_inc_gamma(0.0, 1.0));

  const double lambda = 1.5;
  std::printf("\nPareto(%.1f) mixture: pdf(0) = %.12g, pdf(2) = %.12g, cf(1) = %.12g\n", lambda,
              pareto_mixture_pdf(lambda, 0.0), pareto_mixture_pdf(lambda, 2.0), pareto_mixture_cf(lambda, 1.0));
  std::printf("BetaPower(%.1f) mixture: pdf(0.7) = %.12g, cf(1) = %.12g\n", lambda, beta_mixture_pdf(lambda, 0.7),
              beta_mixture_cf(lambda, 1.0));

  const MixtureSpec skewed(ParetoLaw(2.5), 0.0, 0.5, 1.0);
  const auto phi = mixture_cf_numeric(skewed, 1.0);
  std::printf("variance-mean mixture: pdf(1) = %.12g, cf(1) = %.12g%+.12gi\n", mixture_pdf_numeric(skewed, 1.0),
              phi.real(), phi.imag());

  const auto batch = sample(MixtureSpec(ParetoLaw(lambda)), 200'000, 42);
  const auto emp = empirical_cf(batch, 1.0);
  std::printf("empirical cf(1) from 2e5 draws = %.6f +/- %.6f\n", emp.estimate.real(), emp.std_error());

  const auto report = verify(IdentityCase{IdentityKind::Int1, 1.5, 2.0, 0.5});
  std::printf("\n%s", report_to_text(report).c_str());
  return report.pass ? 0 : 1;
}
