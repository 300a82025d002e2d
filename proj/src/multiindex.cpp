#include "anaflow/multiindex.hpp"

#include <numeric>
#include <sstream>
#include <stdexcept>

namespace anaflow {

MultiIndex::MultiIndex(std::vector<int> entries) : entries_(std::move(entries)) {
    for (int e : entries_)
        if (e < 0) throw std::invalid_argument("multi-index entries must be >= 0");
}

MultiIndex MultiIndex::zero(int dim) { return MultiIndex(std::vector<int>(dim, 0)); }

MultiIndex MultiIndex::unit(int dim, int axis) {
    std::vector<int> e(dim, 0);
    e.at(axis) = 1;
    return MultiIndex(std::move(e));
}

int MultiIndex::order() const {
    return std::accumulate(entries_.begin(), entries_.end(), 0);
}

double MultiIndex::factorial() const {
    double f = 1.0;
    for (int e : entries_) f *= anaflow::factorial(e);
    return f;
}

MultiIndex MultiIndex::operator+(const MultiIndex& s) const {
    if (s.dim() != dim()) throw std::invalid_argument("multi-index dimension mismatch");
    std::vector<int> e(entries_);
    for (int i = 0; i < dim(); ++i) e[i] += s.entries_[i];
    return MultiIndex(std::move(e));
}

bool MultiIndex::leq(const MultiIndex& s) const {
    if (s.dim() != dim()) throw std::invalid_argument("multi-index dimension mismatch");
    for (int i = 0; i < dim(); ++i)
        if (entries_[i] > s.entries_[i]) return false;
    return true;
}

std::string MultiIndex::str() const {
    std::ostringstream os;
    os << '(';
    for (int i = 0; i < dim(); ++i) {
        if (i) os << ',';
        os << entries_[i];
    }
    os << ')';
    return os.str();
}

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

double binom(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    if (k > n - k) k = n - k;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

double multi_binom(const MultiIndex& r, const MultiIndex& s) {
    if (r.dim() != s.dim()) throw std::invalid_argument("multi-index dimension mismatch");
    double b = 1.0;
    for (int i = 0; i < r.dim(); ++i) b *= binom(r[i], s[i]);
    return b;
}

namespace {
void fill_degree(int N, int axis, int remaining, std::vector<int>& cur,
                 std::vector<MultiIndex>& out) {
    if (axis == N - 1) {
        cur[axis] = remaining;
        out.emplace_back(cur);
        return;
    }
    for (int v = remaining; v >= 0; --v) {
        cur[axis] = v;
        fill_degree(N, axis + 1, remaining - v, cur, out);
    }
}
}  // namespace

std::vector<MultiIndex> enumerate_multiindices(int N, int D) {
    if (N < 1) throw std::invalid_argument("dimension must be >= 1");
    if (D < 0) throw std::invalid_argument("max order must be >= 0");
    std::vector<MultiIndex> out;
    std::vector<int> cur(N, 0);
    for (int g = 0; g <= D; ++g) fill_degree(N, 0, g, cur, out);
    return out;
}

}  // namespace anaflow
