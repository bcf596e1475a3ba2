#pragma once

#include "lab/measures.hpp"

namespace lab {

// Closed-form 1-D distribution functions for the supported laws
// (dim must be 1). F is the CDF; A(t) = int_{-inf}^t F(u) du is its
// antiderivative, which makes integrals of |F_hat - F| exact piecewise.

double law_cdf(const LawSpec& law, double t);
double law_pdf(const LawSpec& law, double t);
double law_cdf_antideriv(const LawSpec& law, double t);
double law_quantile(const LawSpec& law, double u);  // u in (0,1)
double law_mean1d(const LawSpec& law);

// int_t^inf (1 - F) = E[(X-t)^+] ; derived from the antiderivative.
double law_upper_tail_integral(const LawSpec& law, double t);

// Support endpoints (+-inf for unbounded laws).
double law_support_lo(const LawSpec& law);
double law_support_hi(const LawSpec& law);

}  // namespace lab
