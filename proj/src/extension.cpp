#include "anaflow/extension.hpp"

#include "anaflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace anaflow {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double radius_at(const Expression& f, const std::vector<double>& x0, double t, int fit_order) {
    if (fit_order < 6) throw std::invalid_argument("radius fit order must be >= 6");
    if (f.polynomial_degree().has_value()) return kInf;
    Jet<double> jet = f.jet_at(x0, t, fit_order);
    double r = kInf;
    for (std::size_t axis = 0; axis < x0.size(); ++axis)
        r = std::min(r, detail::radius_from_jet_axis(jet, static_cast<int>(axis)));
    return r;
}

namespace {

DomainEstimate domain_estimate_impl(
    const std::function<VectorField(std::size_t, double)>& field_at, const CompactBox& K,
    const std::vector<double>& times, int fit_order) {
    if (times.empty()) throw std::invalid_argument("domain estimate needs sample times");
    DomainEstimate est;
    est.times = times;
    est.inf_radius = kInf;
    auto pts = K.grid_points();
    for (std::size_t ti = 0; ti < times.size(); ++ti) {
        double t = times[ti];
        VectorField X = field_at(ti, t);
        std::vector<double> radii;
        radii.reserve(pts.size());
        double tmin = kInf;
        for (const auto& x : pts) {
            double r = kInf;
            for (const auto& c : X.components)
                r = std::min(r, radius_at(c, x, t, fit_order));
            radii.push_back(r);
            tmin = std::min(tmin, r);
        }
        est.point_radii.push_back(std::move(radii));
        est.time_minima.push_back(tmin);
        est.inf_radius = std::min(est.inf_radius, tmin);
    }

    // verdict: floor first, then the empirical trend along the time grid
    const auto& m = est.time_minima;
    bool all_entire = std::all_of(m.begin(), m.end(), [](double v) { return std::isinf(v); });
    if (est.inf_radius < kRadiusFloor) {
        est.verdict = ExtensionVerdict::RadiusToZero;
        est.note = "inf radius below floor";
        return est;
    }
    if (all_entire) {
        est.verdict = ExtensionVerdict::UniformlyExtendable;
        est.note = "entire along all sampled axes";
        return est;
    }
    bool monotone = true;
    for (std::size_t j = 1; j < m.size(); ++j)
        if (m[j] > m[j - 1] * (1.0 + 1e-12)) monotone = false;
    double drop = m.back() > 0.0 ? m.front() / m.back() : kInf;
    double lo = *std::min_element(m.begin(), m.end());
    double hi = *std::max_element(m.begin(), m.end());
    if (monotone && drop >= 8.0) {
        est.verdict = ExtensionVerdict::RadiusToZero;
        est.note = "radii collapse monotonically along the time grid";
    } else if (hi <= 3.0 * lo) {
        est.verdict = ExtensionVerdict::UniformlyExtendable;
        est.note = "stable radii across the grid";
    } else {
        est.verdict = ExtensionVerdict::Inconclusive;
        est.note = "radii vary without a monotone collapse";
    }
    return est;
}

}  // namespace

DomainEstimate domain_estimate(const StepField& X, const CompactBox& K,
                               const std::vector<double>& times, int fit_order) {
    return domain_estimate_impl(
        [&X](std::size_t, double t) { return X.piece_at(t); }, K, times, fit_order);
}

DomainEstimate domain_estimate(const VectorField& X, const CompactBox& K,
                               const std::vector<double>& times, int fit_order) {
    return domain_estimate_impl(
        [&X](std::size_t, double t) { return X.with_time_frozen(t); }, K, times, fit_order);
}

CommonMajorant common_majorant(const std::vector<StepField>& family, const CompactBox& K,
                               std::vector<double> candidate_radii, double safety) {
    if (family.empty()) throw std::invalid_argument("common majorant needs a nonempty family");
    if (candidate_radii.empty())
        throw std::invalid_argument("common majorant needs candidate radii");
    std::sort(candidate_radii.rbegin(), candidate_radii.rend());

    CommonMajorant out;
    for (double d : candidate_radii) {
        Polydisc V(K, d);
        bool ok = true;
        double family_sup = 0.0;
        for (std::size_t mi = 0; mi < family.size() && ok; ++mi) {
            const StepField& X = family[mi];
            double member_integral = 0.0;
            for (int p = 0; p < X.piece_count() && ok; ++p) {
                double piece_sup = 0.0;
                for (const auto& c : X.pieces[p].components) {
                    try {
                        piece_sup = std::max(piece_sup, holo_supnorm(c, V, 0.0, safety));
                    } catch (const DomainError& e) {
                        std::ostringstream os;
                        os << "member " << mi << ", piece " << p << ", radius " << d << ": "
                           << e.what();
                        out.failure = os.str();
                        ok = false;
                        break;
                    }
                }
                member_integral +=
                    piece_sup * (X.breakpoints[p + 1] - X.breakpoints[p]);
            }
            family_sup = std::max(family_sup, member_integral);
        }
        if (ok) {
            out.found = true;
            out.d_star = d;
            out.p_sup = family_sup;
            return out;
        }
    }
    return out;  // found = false, failure set
}

namespace {

WeightSequence extend_geometrically(const WeightSequence& a) {
    int R = a.max_order();
    std::vector<double> v(2 * R + 1);
    for (int m = 0; m <= R; ++m) v[m] = a.at(m);
    double q = R >= 1 ? a.at(R) / a.at(R - 1) : 0.5;
    q = std::min(q, 1.0);
    for (int m = R + 1; m <= 2 * R; ++m) v[m] = v[m - 1] * q;
    return WeightSequence::from_values(a.bound(), std::move(v));
}

IntegrabilityReport integrability_impl(
    const std::function<const VectorField&(double)>& field_at, const TimeInterval& T,
    const CompactBox& K, const WeightSequence& a, const Polydisc& V, int time_samples) {
    if (time_samples < 3) throw std::invalid_argument("need at least 3 time samples");
    IntegrabilityReport rep;
    rep.times.resize(time_samples);
    for (int i = 0; i < time_samples; ++i)
        rep.times[i] = T.t_start + T.length() * i / (time_samples - 1);

    // diagnostic raw sup-norms (safety 1.0); certificates apply their own
    // safety factor where the bound is load-bearing
    int N = K.dim();
    rep.m_samples.reserve(time_samples);
    for (double t : rep.times) {
        double m = 0.0;
        try {
            const VectorField& X = field_at(t);
            for (const auto& c : X.components)
                m = std::max(m, holo_supnorm(c, V, t, 1.0));
            m *= 4.0 * N;
        } catch (const DomainError&) {
            m = kInf;
            ++rep.singular_samples;
        }
        rep.m_samples.push_back(m);
    }
    rep.M_of_t.resize(time_samples, 0.0);
    for (int i = 1; i < time_samples; ++i) {
        double h = rep.times[i] - rep.times[i - 1];
        rep.M_of_t[i] =
            rep.M_of_t[i - 1] + 0.5 * h * (rep.m_samples[i] + rep.m_samples[i - 1]);
    }
    rep.locally_integrally_bounded = std::isfinite(rep.M_of_t.back());

    // seminorm-integral refinement ratio test (time-grid doubling and
    // geometric horizon extension; threshold 2x)
    auto seminorm_integral = [&](int samples, const WeightSequence& w) {
        std::vector<double> ts(samples), vs(samples);
        for (int i = 0; i < samples; ++i) {
            ts[i] = T.t_start + T.length() * i / (samples - 1);
            try {
                const VectorField& X = field_at(ts[i]);
                vs[i] = seminorm_field(X, K, w, ts[i]).value();
            } catch (const DomainError&) {
                vs[i] = kInf;
            }
        }
        return integrate_curve(ts, vs);
    };
    rep.seminorm_integral_base = seminorm_integral(time_samples, a);
    double refined_t = seminorm_integral(2 * time_samples - 1, a);
    double refined_r = seminorm_integral(time_samples, extend_geometrically(a));
    rep.seminorm_integral_refined = std::max(refined_t, refined_r);
    rep.seminorm_integral_diverges =
        !(std::isfinite(rep.seminorm_integral_base) &&
          std::isfinite(rep.seminorm_integral_refined) &&
          rep.seminorm_integral_refined < 2.0 * rep.seminorm_integral_base);
    return rep;
}

}  // namespace

IntegrabilityReport integrability_report(const VectorField& X, const TimeInterval& T,
                                         const CompactBox& K, const WeightSequence& a,
                                         const Polydisc& V, int time_samples) {
    // freeze lazily per sample; cache the last one since calls repeat in order
    struct Cache {
        double t = std::numeric_limits<double>::quiet_NaN();
        VectorField field;
    };
    auto cache = std::make_shared<Cache>();
    return integrability_impl(
        [&X, cache](double t) -> const VectorField& {
            if (!(cache->t == t)) {
                cache->field = X.with_time_frozen(t);
                cache->t = t;
            }
            return cache->field;
        },
        T, K, a, V, time_samples);
}

IntegrabilityReport integrability_report(const StepField& X, const TimeInterval& T,
                                         const CompactBox& K, const WeightSequence& a,
                                         const Polydisc& V, int time_samples) {
    if (!(X.span().contains(T.t_start) && X.span().contains(T.t_end)))
        throw std::invalid_argument("step field does not cover the requested interval");
    return integrability_impl(
        [&X](double t) -> const VectorField& { return X.piece_at(t); }, T, K, a, V,
        time_samples);
}

}  // namespace anaflow
