#pragma once

#include <vector>

namespace anaflow {

/// Decreasing positive weight sequence a_0 >= a_1 >= ... > 0 bounded by d,
/// stored up to a truncation horizon R. Lifted sequences (lift_a, lift_b)
/// are derived values and are exempt from the monotonicity check; their
/// bound fields become e*d and 6e*d.
class WeightSequence {
public:
    /// a_m = d * ratio^m, ratio in (0,1).
    static WeightSequence geometric(double d, double ratio, int max_order);
    /// Arbitrary values; validated positive, non-increasing, <= d.
    static WeightSequence from_values(double d, std::vector<double> values);

    double bound() const { return d_; }      // d
    int max_order() const { return R_; }     // R
    double at(int m) const;                  // a_m, m <= R

    /// a_0 * a_1 * ... * a_k / k!  (the |r|=0 weight is the single factor a_0).
    double weight(int k) const;

    /// Lifted sequence a_n: factor ((m+1)/m)^min(m,n), the m=0 factor taken
    /// as 1, so a_{n,0} = a_0.
    WeightSequence lift_a(int n) const;
    /// Lifted sequence b_n: equals a_n for m<=1, scaled by (m+1)(m+2)/((m-1)m)
    /// for m>1.
    WeightSequence lift_b(int n) const;

private:
    WeightSequence(double d, int R, std::vector<double> values);

    double d_ = 1.0;
    int R_ = 0;
    std::vector<double> values_;  // a_0..a_R
};

}  // namespace anaflow
