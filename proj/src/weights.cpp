#include "anaflow/weights.hpp"

#include "anaflow/multiindex.hpp"

#include <cmath>
#include <stdexcept>

namespace anaflow {

namespace {
constexpr double kEuler = 2.718281828459045235360287471352662498;
}

WeightSequence::WeightSequence(double d, int R, std::vector<double> values)
    : d_(d), R_(R), values_(std::move(values)) {}

WeightSequence WeightSequence::geometric(double d, double ratio, int max_order) {
    if (d <= 0.0) throw std::invalid_argument("weight bound d must be positive");
    if (!(ratio > 0.0 && ratio < 1.0))
        throw std::invalid_argument("geometric ratio must lie in (0,1)");
    if (max_order < 0) throw std::invalid_argument("max_order must be >= 0");
    std::vector<double> v(max_order + 1);
    double x = d;
    for (int m = 0; m <= max_order; ++m) {
        v[m] = x;
        x *= ratio;
    }
    return WeightSequence(d, max_order, std::move(v));
}

WeightSequence WeightSequence::from_values(double d, std::vector<double> values) {
    if (d <= 0.0) throw std::invalid_argument("weight bound d must be positive");
    if (values.empty()) throw std::invalid_argument("weight sequence needs at least a_0");
    for (std::size_t m = 0; m < values.size(); ++m) {
        if (!(values[m] > 0.0)) throw std::invalid_argument("weights must be positive");
        if (values[m] > d) throw std::invalid_argument("weights must not exceed d");
        if (m > 0 && values[m] > values[m - 1])
            throw std::invalid_argument("weights must be non-increasing");
    }
    int R = static_cast<int>(values.size()) - 1;
    return WeightSequence(d, R, std::move(values));
}

double WeightSequence::at(int m) const {
    if (m < 0 || m > R_) throw std::out_of_range("weight order beyond truncation horizon");
    return values_[m];
}

double WeightSequence::weight(int k) const {
    if (k < 0 || k > R_) throw std::out_of_range("weight order beyond truncation horizon");
    double p = 1.0;
    for (int m = 0; m <= k; ++m) p *= values_[m];
    return p / factorial(k);
}

WeightSequence WeightSequence::lift_a(int n) const {
    if (n < 0) throw std::invalid_argument("lift index must be >= 0");
    std::vector<double> v(R_ + 1);
    for (int m = 0; m <= R_; ++m) {
        if (m == 0) {
            v[m] = values_[m];
            continue;
        }
        double f = (m + 1.0) / m;
        int p = std::min(m, n);
        v[m] = std::pow(f, p) * values_[m];
    }
    return WeightSequence(kEuler * d_, R_, std::move(v));
}

WeightSequence WeightSequence::lift_b(int n) const {
    WeightSequence an = lift_a(n);
    std::vector<double> v(R_ + 1);
    for (int m = 0; m <= R_; ++m) {
        if (m <= 1) {
            v[m] = an.values_[m];
        } else {
            v[m] = ((m + 1.0) * (m + 2.0) / ((m - 1.0) * m)) * an.values_[m];
        }
    }
    return WeightSequence(6.0 * kEuler * d_, R_, std::move(v));
}

}  // namespace anaflow
