#pragma once

#include "anaflow/multiindex.hpp"

#include <complex>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace anaflow {

/// Shared index tables for all jets of a given (dimension, degree).
class JetLayout {
public:
    static std::shared_ptr<const JetLayout> get(int dim, int degree);

    int dim() const { return dim_; }
    int degree() const { return degree_; }
    int size() const { return static_cast<int>(indices_.size()); }
    const std::vector<MultiIndex>& indices() const { return indices_; }
    const MultiIndex& index(int i) const { return indices_[i]; }
    /// Position of a multi-index, or -1 when |r| exceeds the degree.
    int rank(const MultiIndex& r) const;

private:
    JetLayout(int dim, int degree);
    int dim_, degree_;
    std::vector<MultiIndex> indices_;
    std::unordered_map<std::vector<int>, int, MultiIndexHash> ranks_;
};

/// Truncated Taylor expansion at a base point. Coefficients are Taylor
/// coefficients D^{(r)}f(x0)/(r)!, so products are plain truncated
/// convolutions; raw derivatives come from derivative().
template <class T>
class Jet {
public:
    using Scalar = T;

    Jet(int dim, int degree, std::vector<T> base_point)
        : layout_(JetLayout::get(dim, degree)),
          base_(std::move(base_point)),
          coeff_(layout_->size(), T{}) {
        if (static_cast<int>(base_.size()) != dim)
            throw std::invalid_argument("jet base point dimension mismatch");
    }

    static Jet constant(int dim, int degree, const std::vector<T>& x0, T value) {
        Jet j(dim, degree, x0);
        j.coeff_[0] = value;
        return j;
    }

    /// The coordinate function x_axis expanded at x0: x0_axis + dx_axis.
    static Jet variable(int dim, int degree, const std::vector<T>& x0, int axis) {
        Jet j(dim, degree, x0);
        j.coeff_[0] = x0.at(axis);
        if (degree >= 1) j.coeff_[j.layout_->rank(MultiIndex::unit(dim, axis))] = T(1);
        return j;
    }

    int dim() const { return layout_->dim(); }
    int degree() const { return layout_->degree(); }
    int size() const { return layout_->size(); }
    const std::vector<T>& base_point() const { return base_; }
    const JetLayout& layout() const { return *layout_; }

    T coeff(int i) const { return coeff_[i]; }
    T& coeff(int i) { return coeff_[i]; }
    T coeff(const MultiIndex& r) const {
        int i = layout_->rank(r);
        return i < 0 ? T{} : coeff_[i];
    }
    void set_coeff(const MultiIndex& r, T v) {
        int i = layout_->rank(r);
        if (i < 0) throw std::out_of_range("multi-index beyond jet degree");
        coeff_[i] = v;
    }

    /// Raw derivative D^{(r)}f(x0) = (r)! * coefficient.
    T derivative(const MultiIndex& r) const { return coeff(r) * T(r.factorial()); }

    Jet operator+(const Jet& o) const {
        require_compatible(o);
        Jet r(*this);
        for (int i = 0; i < size(); ++i) r.coeff_[i] += o.coeff_[i];
        return r;
    }
    Jet operator-(const Jet& o) const {
        require_compatible(o);
        Jet r(*this);
        for (int i = 0; i < size(); ++i) r.coeff_[i] -= o.coeff_[i];
        return r;
    }
    Jet scaled(T s) const {
        Jet r(*this);
        for (auto& c : r.coeff_) c *= s;
        return r;
    }

    /// Truncated convolution; operands must share dimension and base point.
    /// The result degree is the smaller of the two.
    Jet operator*(const Jet& o) const {
        require_same_point(o);
        int d = std::min(degree(), o.degree());
        Jet r(dim(), d, base_);
        const auto& lay = r.layout();
        for (int i = 0; i < size(); ++i) {
            if (coeff_[i] == T{}) continue;
            int oi = layout_->index(i).order();
            if (oi > d) break;  // graded order: all later entries have order >= oi
            for (int j = 0; j < o.size(); ++j) {
                const MultiIndex& rj = o.layout_->index(j);
                if (oi + rj.order() > d) continue;
                if (o.coeff_[j] == T{}) continue;
                int k = lay.rank(layout_->index(i) + rj);
                r.coeff_[k] += coeff_[i] * o.coeff_[j];
            }
        }
        return r;
    }

    /// d/dx_axis; drops the top degree.
    Jet diff(int axis) const {
        if (degree() < 1) throw std::invalid_argument("jet degree budget exhausted");
        Jet r(dim(), degree() - 1, base_);
        const auto& lay = r.layout();
        MultiIndex e = MultiIndex::unit(dim(), axis);
        for (int i = 0; i < r.size(); ++i) {
            MultiIndex src = lay.index(i) + e;
            r.coeff_[i] = coeff(src) * T(lay.index(i)[axis] + 1.0);
        }
        return r;
    }

    /// Antiderivative in x_axis with zero constant slice; raises degree by one.
    Jet integrate(int axis) const {
        Jet r(dim(), degree() + 1, base_);
        const auto& lay = r.layout();
        MultiIndex e = MultiIndex::unit(dim(), axis);
        for (int i = 0; i < size(); ++i) {
            MultiIndex dst = layout_->index(i) + e;
            r.coeff_[lay.rank(dst)] = coeff_[i] / T(static_cast<double>(dst[axis]));
        }
        return r;
    }

    /// Truncate (or keep) to a lower degree.
    Jet truncated(int d) const {
        if (d >= degree()) return *this;
        Jet r(dim(), d, base_);
        for (int i = 0; i < r.size(); ++i) r.coeff_[i] = coeff_[i];
        return r;
    }

    /// Evaluate the truncated polynomial at x0 + dx.
    T eval(const std::vector<T>& dx) const {
        if (static_cast<int>(dx.size()) != dim())
            throw std::invalid_argument("jet evaluation offset dimension mismatch");
        T acc{};
        for (int i = 0; i < size(); ++i) {
            if (coeff_[i] == T{}) continue;
            T mono = coeff_[i];
            const MultiIndex& r = layout_->index(i);
            for (int a = 0; a < dim(); ++a)
                for (int p = 0; p < r[a]; ++p) mono *= dx[a];
            acc += mono;
        }
        return acc;
    }

    T value() const { return coeff_[0]; }

private:
    void require_compatible(const Jet& o) const {
        if (o.dim() != dim() || o.degree() != degree())
            throw std::invalid_argument("jet shape mismatch");
        require_same_point(o);
    }
    void require_same_point(const Jet& o) const {
        if (o.dim() != dim()) throw std::invalid_argument("jet dimension mismatch");
        if (base_ != o.base_) throw std::invalid_argument("jet base point mismatch");
    }

    std::shared_ptr<const JetLayout> layout_;
    std::vector<T> base_;
    std::vector<T> coeff_;
};

using RealJet = Jet<double>;
using ComplexJet = Jet<std::complex<double>>;

}  // namespace anaflow
