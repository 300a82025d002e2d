#include "anaflow/seminorms.hpp"

#include "anaflow/errors.hpp"
#include "anaflow/runtime.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <limits>
#include <thread>

namespace anaflow {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kValueGuard = 1e12;   // |f| beyond this counts as unbounded
constexpr int kRadiusFitOrder = 24;    // jet order for the pole pre-check

std::atomic<int> g_threads{1};
}  // namespace

void set_thread_count(int n) { g_threads.store(std::max(1, n)); }
int thread_count() { return g_threads.load(); }

CompactBox::CompactBox(std::vector<double> lo_, std::vector<double> hi_, int grid_)
    : lo(std::move(lo_)), hi(std::move(hi_)), grid(grid_) {
    if (lo.size() != hi.size() || lo.empty())
        throw std::invalid_argument("box bounds must be nonempty and of equal dimension");
    for (std::size_t i = 0; i < lo.size(); ++i)
        if (!(lo[i] <= hi[i])) throw std::invalid_argument("box must satisfy lo <= hi");
    if (grid < 2) throw std::invalid_argument("grid resolution must be >= 2");
}

CompactBox CompactBox::interval(double a, double b, int grid) {
    return CompactBox({a}, {b}, grid);
}

std::vector<double> CompactBox::axis_points(int axis) const {
    std::vector<double> pts(grid);
    double a = lo[axis], b = hi[axis];
    for (int i = 0; i < grid; ++i) pts[i] = a + (b - a) * i / (grid - 1);
    return pts;
}

std::vector<std::vector<double>> CompactBox::grid_points() const {
    int n = dim();
    std::vector<std::vector<double>> axes(n);
    std::size_t total = 1;
    for (int i = 0; i < n; ++i) {
        axes[i] = axis_points(i);
        total *= axes[i].size();
    }
    std::vector<std::vector<double>> out;
    out.reserve(total);
    std::vector<std::size_t> idx(n, 0);
    for (std::size_t k = 0; k < total; ++k) {
        std::vector<double> p(n);
        for (int i = 0; i < n; ++i) p[i] = axes[i][idx[i]];
        out.push_back(std::move(p));
        for (int i = n - 1; i >= 0; --i) {
            if (++idx[i] < axes[i].size()) break;
            idx[i] = 0;
        }
    }
    return out;
}

bool CompactBox::contains(const std::vector<double>& x, double slack) const {
    if (static_cast<int>(x.size()) != dim()) return false;
    for (int i = 0; i < dim(); ++i)
        if (x[i] < lo[i] - slack || x[i] > hi[i] + slack) return false;
    return true;
}

Polydisc::Polydisc(CompactBox K, double d, int angles_)
    : center(std::move(K)), radius(d), boundary_samples(angles_) {
    if (!(radius > 0.0)) throw std::invalid_argument("polydisc radius must be positive");
}

int Polydisc::angles() const {
    if (boundary_samples > 0) return boundary_samples;
    switch (center.dim()) {
        case 1: return 64;
        case 2: return 24;
        default: return 12;
    }
}

namespace detail {

namespace {
// slope of least-squares line through (k, y_k)
std::optional<double> fit_slope(const std::vector<std::pair<int, double>>& pts) {
    if (pts.size() < 2) return std::nullopt;
    double n = static_cast<double>(pts.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [k, y] : pts) {
        sx += k;
        sy += y;
        sxx += double(k) * k;
        sxy += k * y;
    }
    double den = n * sxx - sx * sx;
    if (den == 0.0) return std::nullopt;
    return (n * sxy - sx * sy) / den;
}
}  // namespace

double radius_from_coeffs(const std::vector<double>& absc) {
    const double inf = std::numeric_limits<double>::infinity();
    int R = static_cast<int>(absc.size()) - 1;
    int lo = R / 2;
    std::vector<std::pair<int, double>> window;
    for (int k = lo; k <= R; ++k)
        if (absc[k] > 1e-300) window.emplace_back(k, std::log(absc[k]));
    if (window.size() < 3) return inf;  // degenerate: polynomial-like decay

    auto slope = fit_slope(window);
    if (!slope) return inf;

    // superlinear log-decay (entire functions): the slope keeps steepening
    // across the window, unlike the straight line of a finite radius
    int mid = (lo + R) / 2;
    std::vector<std::pair<int, double>> first, second;
    for (auto& p : window) (p.first <= mid ? first : second).push_back(p);
    auto s1 = fit_slope(first), s2 = fit_slope(second);
    if (s1 && s2 && *s2 - *s1 < -0.2) return inf;

    double r = std::exp(-*slope);
    return r > 1e6 ? inf : r;
}

double radius_from_jet_axis(const Jet<double>& jet, int axis) {
    std::vector<double> absc(jet.degree() + 1, 0.0);
    for (int k = 0; k <= jet.degree(); ++k) {
        std::vector<int> e(jet.dim(), 0);
        e[axis] = k;
        absc[k] = std::fabs(jet.coeff(MultiIndex(e)));
    }
    return radius_from_coeffs(absc);
}

}  // namespace detail

namespace {

// Distance from each pre-check grid point to the nearest complex
// singularity; throws when it undercuts the polydisc radius.
void require_pole_free(const Expression& f, const Polydisc& V, double t) {
    if (f.polynomial_degree().has_value()) return;  // entire
    CompactBox coarse = V.center;
    coarse.grid = std::min(coarse.grid, V.center.dim() >= 3 ? 5 : 9);
    int order = V.center.dim() >= 3 ? 12 : kRadiusFitOrder;
    for (const auto& x : coarse.grid_points()) {
        Jet<double> jet = f.jet_at(x, t, order);  // DomainError propagates
        for (int axis = 0; axis < coarse.dim(); ++axis) {
            double r = detail::radius_from_jet_axis(jet, axis);
            if (r <= V.radius)
                throw DomainError("not boundedly extendable on the polydisc (singularity within radius " +
                                      std::to_string(V.radius) + ")",
                                  f.str());
        }
    }
}

}  // namespace

double holo_supnorm(const Expression& f, const Polydisc& V, double t, double safety) {
    require_pole_free(f, V, t);
    int n = V.center.dim();
    int A = V.angles();
    std::vector<double> theta(A);
    for (int k = 0; k < A; ++k) theta[k] = kTwoPi * k / A;

    double best = 0.0;
    std::vector<std::complex<double>> z(n);
    std::vector<int> ang(n, 0);
    for (const auto& x : V.center.grid_points()) {
        // distinguished boundary: every axis on its bounding circle
        std::fill(ang.begin(), ang.end(), 0);
        std::size_t total = 1;
        for (int i = 0; i < n; ++i) total *= A;
        for (std::size_t k = 0; k < total; ++k) {
            for (int i = 0; i < n; ++i)
                z[i] = std::complex<double>(x[i] + V.radius * std::cos(theta[ang[i]]),
                                            V.radius * std::sin(theta[ang[i]]));
            double m = std::abs(f.eval_complex(z, t));
            if (m > kValueGuard)
                throw DomainError("not boundedly extendable on the polydisc (value guard)",
                                  f.str());
            best = std::max(best, m);
            for (int i = n - 1; i >= 0; --i) {
                if (++ang[i] < A) break;
                ang[i] = 0;
            }
        }
    }
    return best * safety;
}

namespace {

struct SupTracker {
    double sup = 0.0;
    int order = 0;
    std::vector<double> at;
    void offer(double v, int k, const std::vector<double>& x) {
        if (v > sup) {
            sup = v;
            order = k;
            at = x;
        }
    }
};

std::optional<double> cauchy_tail(const WeightSequence& a, const Polydisc& V, double psup) {
    int R = a.max_order();
    double d = V.radius;
    double q = a.at(R) / d;
    if (!(q < 1.0)) return std::nullopt;
    double prod = 1.0;
    for (int j = 0; j <= R; ++j) prod *= a.at(j) / d;
    return psup * prod * q / (1.0 - q);
}

}  // namespace

SeminormValue seminorm_function(const Expression& f, const CompactBox& K,
                                const WeightSequence& a, double t,
                                const SeminormOptions& opts) {
    int R = a.max_order();
    auto pdeg = f.polynomial_degree();
    int D = pdeg ? std::min(R, *pdeg) : R;

    auto pts = K.grid_points();
    auto scan = [&](std::size_t lo, std::size_t hi, SupTracker& track, double& last) {
        for (std::size_t p = lo; p < hi; ++p) {
            const auto& x = pts[p];
            Jet<double> jet = f.jet_at(x, t, D);
            const auto& lay = jet.layout();
            for (int i = 0; i < jet.size(); ++i) {
                int k = lay.index(i).order();
                double term = a.weight(k) * std::fabs(jet.coeff(i) * lay.index(i).factorial());
                track.offer(term, k, x);
                if (k == D) last = std::max(last, term);
            }
        }
    };

    SupTracker track;
    double last = 0.0;
    int workers = std::min<int>(thread_count(), static_cast<int>(pts.size()));
    if (workers <= 1) {
        scan(0, pts.size(), track, last);
    } else {
        std::vector<SupTracker> tracks(workers);
        std::vector<double> lasts(workers, 0.0);
        std::vector<std::exception_ptr> errors(workers);
        std::vector<std::thread> threads;
        std::size_t chunk = (pts.size() + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            std::size_t lo = w * chunk, hi = std::min(pts.size(), lo + chunk);
            threads.emplace_back([&, w, lo, hi] {
                try {
                    scan(lo, hi, tracks[w], lasts[w]);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& th : threads) th.join();
        for (int w = 0; w < workers; ++w)
            if (errors[w]) std::rethrow_exception(errors[w]);
        // merge in chunk order; strict > keeps the first achiever like the
        // serial scan
        for (int w = 0; w < workers; ++w) {
            track.offer(tracks[w].sup, tracks[w].order, tracks[w].at);
            last = std::max(last, lasts[w]);
        }
    }

    SeminormValue out;
    out.computed_sup = track.sup;
    out.achieved_order = track.order;
    out.achieved_at = track.at;
    out.last_order_term = last;
    if (pdeg && *pdeg <= R) {
        // all higher derivatives vanish; the truncated sup is the sup
        out.tail_bound = 0.0;
        out.rigorous = true;
    } else if (opts.majorant) {
        double psup = holo_supnorm(f, *opts.majorant, t, opts.supnorm_safety);
        if (auto tail = cauchy_tail(a, *opts.majorant, psup)) {
            out.tail_bound = *tail;
            out.rigorous = true;
        }
    }
    return out;
}

SeminormValue seminorm_field(const VectorField& X, const CompactBox& K,
                             const WeightSequence& a, double t,
                             const SeminormOptions& opts) {
    if (K.dim() != X.dim) throw std::invalid_argument("box/field dimension mismatch");
    if (opts.field_norm == FieldNorm::MaxComponent) {
        SeminormValue best;
        bool all_rigorous = true;
        double tail = 0.0;
        for (const auto& c : X.components) {
            SeminormValue v = seminorm_function(c, K, a, t, opts);
            if (v.computed_sup > best.computed_sup) {
                best.computed_sup = v.computed_sup;
                best.achieved_order = v.achieved_order;
                best.achieved_at = v.achieved_at;
            }
            best.last_order_term = std::max(best.last_order_term, v.last_order_term);
            if (v.rigorous)
                tail = std::max(tail, *v.tail_bound);
            else
                all_rigorous = false;
        }
        if (all_rigorous) {
            best.tail_bound = tail;
            best.rigorous = true;
        }
        return best;
    }

    // Euclidean norm across components of each derivative vector
    int R = a.max_order();
    int D = R;
    bool all_poly = true;
    int maxdeg = 0;
    for (const auto& c : X.components) {
        auto pd = c.polynomial_degree();
        if (!pd) {
            all_poly = false;
            break;
        }
        maxdeg = std::max(maxdeg, *pd);
    }
    if (all_poly) D = std::min(R, maxdeg);

    SupTracker track;
    double last = 0.0;
    for (const auto& x : K.grid_points()) {
        std::vector<Jet<double>> jets;
        jets.reserve(X.components.size());
        for (const auto& c : X.components) jets.push_back(c.jet_at(x, t, D));
        const auto& lay = jets.front().layout();
        for (int i = 0; i < jets.front().size(); ++i) {
            int k = lay.index(i).order();
            double fac = lay.index(i).factorial();
            double ss = 0.0;
            for (const auto& j : jets) {
                double d = j.coeff(i) * fac;
                ss += d * d;
            }
            double term = a.weight(k) * std::sqrt(ss);
            track.offer(term, k, x);
            if (k == D) last = std::max(last, term);
        }
    }
    SeminormValue out;
    out.computed_sup = track.sup;
    out.achieved_order = track.order;
    out.achieved_at = track.at;
    out.last_order_term = last;
    if (all_poly && maxdeg <= R) {
        out.tail_bound = 0.0;
        out.rigorous = true;
    }
    return out;
}

DerivationBoundReport check_derivation_bound(const VectorField& X, const Expression& f,
                                             const CompactBox& K, const WeightSequence& a,
                                             int n, double t) {
    if (n < 0) throw std::invalid_argument("lift index must be >= 0");
    Expression Xf = apply_derivation(X, f);
    SeminormValue lhs = seminorm_function(Xf, K, a.lift_a(n), t);

    double xmax = 0.0;
    WeightSequence bn = a.lift_b(n);
    for (const auto& c : X.components)
        xmax = std::max(xmax, seminorm_function(c, K, bn, t).value());
    SeminormValue fs = seminorm_function(f, K, a.lift_a(n + 1), t);

    DerivationBoundReport rep;
    rep.lhs = lhs.value();
    rep.rhs = 4.0 * X.dim * (n + 1.0) * xmax * fs.value();
    rep.holds = rep.lhs <= rep.rhs * (1.0 + 1e-9);
    return rep;
}

}  // namespace anaflow
