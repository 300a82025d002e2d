#pragma once

#include "anaflow/flowseries.hpp"

#include <map>
#include <string>
#include <vector>

namespace anaflow {

struct ExperimentCase {
    std::string input;
    double series_value = 0.0;
    double oracle_value = 0.0;
    double diff = 0.0;
    double bound = 0.0;
    bool pass = false;
};

struct ExperimentReport {
    std::string name;
    std::string inputs_digest;
    std::vector<ExperimentCase> cases;
    std::map<std::string, double> fitted;  // named fitted slopes/exponents
    bool pass = false;

    void finish();  // pass = all cases pass
};

/// Classical fixed-step RK4 with steps aligned to the step-field
/// breakpoints. Throws on the blow-up guard (|x| > 1e12), reporting the
/// escape time.
std::vector<double> rk4_flow(const StepField& X, double t0, double t,
                             const std::vector<double>& x0, int steps);

/// Componentwise a*X + b*Y on the common breakpoint refinement.
StepField step_linear_combination(const StepField& X, double a, const StepField& Y, double b);

/// Quantifies sequential continuity of the exponential map: for each eps,
/// Delta(eps) = sup over the K-grid of |zeta^{X+eps Y}(f) - zeta^X(f)| and
/// I(eps) = time integral of max_i p_V((eps Y)^i); fits log Delta against
/// log I and checks Delta <= h_max * I with h_max from the certificate's
/// geometric series (a conservative stand-in, recorded in `fitted`).
ExperimentReport exp_continuity_experiment(const StepField& X, const StepField& Y,
                                           const std::vector<double>& epsilons,
                                           const Expression& f, const CompactBox& K,
                                           const TimeInterval& T);

/// The bundled example suite: the 1/(1+n^2 x^2) radius family, the
/// t^2/(t^2+x^2) non-extendability flags, and the x/(1-nxt) flows with the
/// shrinking certified interval.
std::vector<ExperimentReport> run_paper_examples();

/// Ten certified flows checked against the RK4 oracle at 1e5 steps; each
/// case must agree within residual_bound + 1e-7.
ExperimentReport series_vs_rk4_suite();

/// The three (X, Y) continuity pairs at eps = 1e-1, 1e-2, 1e-3.
std::vector<ExperimentReport> continuity_suite();

/// Least-squares slope of log y against log x (positive inputs only).
double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace anaflow
