#pragma once

#include "anaflow/seminorms.hpp"
#include "anaflow/timevarying.hpp"

#include <string>
#include <vector>

namespace anaflow {

/// Estimated distance from x0 to the nearest complex singularity of f at
/// time t, from the Cauchy-Hadamard fit on jet coefficients along each axis
/// (axiswise minimum). Returns +inf for entire-looking coefficient decay.
double radius_at(const Expression& f, const std::vector<double>& x0, double t = 0.0,
                 int fit_order = 24);

enum class ExtensionVerdict { UniformlyExtendable, RadiusToZero, Inconclusive };

struct DomainEstimate {
    std::vector<double> times;
    /// min over components and axes of radius_at, per time then grid point.
    std::vector<std::vector<double>> point_radii;
    /// min over the grid per time; trend input for the verdict.
    std::vector<double> time_minima;
    double inf_radius = 0.0;
    ExtensionVerdict verdict = ExtensionVerdict::Inconclusive;
    std::string note;
};

/// Radius floor below which "no uniform extension" is declared.
constexpr double kRadiusFloor = 1e-6;

DomainEstimate domain_estimate(const StepField& X, const CompactBox& K,
                               const std::vector<double>& times, int fit_order = 24);
DomainEstimate domain_estimate(const VectorField& X, const CompactBox& K,
                               const std::vector<double>& times, int fit_order = 24);

struct CommonMajorant {
    bool found = false;
    double d_star = 0.0;   // largest sampled pole-free radius
    double p_sup = 0.0;    // family-wide sup of time-integrated sup-norms
    std::string failure;   // offending member and piece when not found
};

CommonMajorant common_majorant(const std::vector<StepField>& family, const CompactBox& K,
                               std::vector<double> candidate_radii, double safety = 1.0);

struct IntegrabilityReport {
    std::vector<double> times;
    std::vector<double> m_samples;  // 4N max_i holo_supnorm; +inf where singular
    std::vector<double> M_of_t;     // cumulative trapezoid of m
    bool locally_integrally_bounded = false;
    bool seminorm_integral_diverges = false;
    int singular_samples = 0;
    /// seminorm time-integrals at the base and refined levels (R extension
    /// and time-grid doubling), kept for the refinement ratio test.
    double seminorm_integral_base = 0.0;
    double seminorm_integral_refined = 0.0;
};

IntegrabilityReport integrability_report(const VectorField& X, const TimeInterval& T,
                                         const CompactBox& K, const WeightSequence& a,
                                         const Polydisc& V, int time_samples = 33);
IntegrabilityReport integrability_report(const StepField& X, const TimeInterval& T,
                                         const CompactBox& K, const WeightSequence& a,
                                         const Polydisc& V, int time_samples = 33);

}  // namespace anaflow
