#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace lab {

// Compensated (Kahan) accumulator.
class KahanSum {
  public:
    void add(double x) {
        const double y = x - c_;
        const double t = s_ + y;
        c_ = (t - s_) - y;
        s_ = t;
    }
    double value() const { return s_; }

  private:
    double s_ = 0.0;
    double c_ = 0.0;
};

double kahan_total(std::span<const double> xs);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::size_t n = 0;
};

// Ordinary least squares of y against x.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

// Exact (Clopper-Pearson) two-sided binomial confidence interval for
// k successes out of n trials at the given confidence level.
struct BinomialInterval {
    double lo = 0.0;
    double hi = 1.0;
};
BinomialInterval clopper_pearson(std::size_t k, std::size_t n, double confidence = 0.95);

double mean(std::span<const double> xs);
double variance(std::span<const double> xs);  // population variance
double median(std::vector<double> xs);        // by copy; input order preserved

}  // namespace lab
