#include "anaflow/timevarying.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace anaflow {

StepField::StepField(int n, std::vector<double> breaks, std::vector<VectorField> fields)
    : dim(n), breakpoints(std::move(breaks)), pieces(std::move(fields)) {
    if (dim < 1) throw std::invalid_argument("step field dimension must be >= 1");
    if (breakpoints.size() < 2)
        throw std::invalid_argument("step field needs at least one piece");
    for (std::size_t i = 1; i < breakpoints.size(); ++i)
        if (!(breakpoints[i] > breakpoints[i - 1]))
            throw std::invalid_argument("breakpoints must be strictly increasing");
    if (pieces.size() + 1 != breakpoints.size())
        throw std::invalid_argument("piece count must equal breakpoint count - 1");
    for (const auto& p : pieces) {
        if (p.dim != dim) throw std::invalid_argument("piece dimension mismatch");
        if (p.depends_on_time())
            throw std::invalid_argument("step field pieces must be time-independent");
    }
}

StepField StepField::autonomous(const VectorField& X, const TimeInterval& T) {
    if (!(T.length() > 0.0))
        throw std::invalid_argument("autonomous wrapping needs a nondegenerate interval");
    return StepField(X.dim, {T.t_start, T.t_end}, {X});
}

int StepField::piece_index(double t) const {
    if (!span().contains(t)) throw std::invalid_argument("time outside the step field span");
    auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), t);
    int idx = static_cast<int>(it - breakpoints.begin()) - 1;
    return std::clamp(idx, 0, piece_count() - 1);
}

std::string StepField::digest() const {
    std::ostringstream os;
    os << "n=" << dim << ";breaks=";
    for (double b : breakpoints) os << b << ",";
    for (const auto& p : pieces) {
        os << "|";
        for (const auto& c : p.components) os << c.str() << ";";
    }
    return os.str();
}

StepField simple_approximate(const VectorField& X, const TimeInterval& T, int pieces,
                             FreezeRule rule) {
    if (pieces < 1) throw std::invalid_argument("piece count must be >= 1");
    if (!(T.length() > 0.0))
        throw std::invalid_argument("approximation interval must be nondegenerate");
    std::vector<double> breaks(pieces + 1);
    for (int i = 0; i <= pieces; ++i)
        breaks[i] = T.t_start + T.length() * i / pieces;
    std::vector<VectorField> frozen;
    frozen.reserve(pieces);
    for (int i = 0; i < pieces; ++i) {
        double sample = rule == FreezeRule::Midpoint ? 0.5 * (breaks[i] + breaks[i + 1])
                                                     : breaks[i];
        frozen.push_back(X.with_time_frozen(sample));
    }
    return StepField(X.dim, std::move(breaks), std::move(frozen));
}

double integrate_curve(const std::vector<double>& times, const std::vector<double>& values) {
    if (times.size() != values.size() || times.size() < 2)
        throw std::invalid_argument("need matching time/value samples, at least two");
    double acc = 0.0;
    for (std::size_t i = 1; i < times.size(); ++i) {
        double h = times[i] - times[i - 1];
        if (h < 0.0) throw std::invalid_argument("time samples must be non-decreasing");
        acc += 0.5 * h * (values[i] + values[i - 1]);
    }
    return acc;
}

double integrate_step(const std::vector<double>& breakpoints,
                      const std::vector<double>& piece_values) {
    if (breakpoints.size() != piece_values.size() + 1 || piece_values.empty())
        throw std::invalid_argument("step integral needs k+1 breakpoints for k values");
    double acc = 0.0;
    for (std::size_t i = 0; i < piece_values.size(); ++i)
        acc += piece_values[i] * (breakpoints[i + 1] - breakpoints[i]);
    return acc;
}

}  // namespace anaflow
