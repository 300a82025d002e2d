#pragma once

#include "anaflow/expression.hpp"

#include <string>
#include <vector>

namespace anaflow {

struct TimeInterval {
    double t_start = 0.0;
    double t_end = 0.0;

    TimeInterval() = default;
    TimeInterval(double a, double b) : t_start(a), t_end(b) {
        if (!(t_start <= t_end))
            throw std::invalid_argument("time interval must satisfy t_start <= t_end");
    }
    double length() const { return t_end - t_start; }
    bool contains(double t, double slack = 1e-12) const {
        return t >= t_start - slack && t <= t_end + slack;
    }
};

/// Simple function in time with values in the space of vector fields:
/// piecewise-constant curve t -> X_i on [t_i, t_{i+1}).
struct StepField {
    int dim = 0;
    std::vector<double> breakpoints;   // strictly increasing, size = pieces+1
    std::vector<VectorField> pieces;   // each time-independent

    StepField() = default;
    StepField(int n, std::vector<double> breaks, std::vector<VectorField> fields);
    /// Wrap one autonomous field as a single piece over T.
    static StepField autonomous(const VectorField& X, const TimeInterval& T);

    int piece_count() const { return static_cast<int>(pieces.size()); }
    TimeInterval span() const { return {breakpoints.front(), breakpoints.back()}; }
    /// Piece containing t (right-open pieces, last piece closed).
    int piece_index(double t) const;
    const VectorField& piece_at(double t) const { return pieces[piece_index(t)]; }

    /// Printed form; used to match certificates to fields.
    std::string digest() const;
};

enum class FreezeRule { Midpoint, Left };

/// Approximate a time-dependent field by a simple function: piece i carries
/// X with t frozen at the rule's sample point of interval i.
StepField simple_approximate(const VectorField& X, const TimeInterval& T, int pieces,
                             FreezeRule rule = FreezeRule::Midpoint);

/// Trapezoid integral of sampled values over their time grid.
double integrate_curve(const std::vector<double>& times, const std::vector<double>& values);

/// Exact integral of a step curve: sum of value * piece width.
double integrate_step(const std::vector<double>& breakpoints,
                      const std::vector<double>& piece_values);

}  // namespace anaflow
