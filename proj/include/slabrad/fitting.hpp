// fitting.hpp: damped-exponential fits of sampled traces

#pragma once

#include <vector>

#include "slabrad/common.hpp"

namespace slabrad {

struct RateFit {
    double gamma = 0.0;   // decay rate, trace = sum c exp(-i omega tau), omega = Omega - i Gamma
    double omega = 0.0;   // oscillation frequency Omega
    cplx amplitude;
    double sigma_gamma = 0.0;
    double sigma_omega = 0.0;
};

struct FitOptions {
    int n_terms = 1;              // complex exponentials in the model (a real oscillating mode needs two)
    int max_iterations = 200;
    double max_relative_sigma = 0.5;  // ResolutionError above this sigma_gamma / gamma
    double min_decay_fraction = 1e-3; // ResolutionError if gamma * span is below this
};

/// Matrix-pencil initial guess refined by Levenberg-Marquardt on the complex samples.
/// Samples must be uniformly spaced. Returns terms ordered by decreasing |amplitude|.
std::vector<RateFit> extract_rates(const std::vector<double>& times, const std::vector<cplx>& samples,
                                   const FitOptions& opts = {});
std::vector<RateFit> extract_rates(const std::vector<double>& times, const std::vector<double>& samples,
                                   const FitOptions& opts = {});

/// Least-squares slope of log|y| against t (samples with y == 0 are skipped); returns the decay rate.
double log_linear_rate(const std::vector<double>& times, const std::vector<double>& values);

}  // namespace slabrad
