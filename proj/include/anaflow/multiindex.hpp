#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace anaflow {

/// Multi-index (r) = (r_1, ..., r_N) of partial-derivative orders.
class MultiIndex {
public:
    MultiIndex() = default;
    explicit MultiIndex(std::vector<int> entries);
    static MultiIndex zero(int dim);
    static MultiIndex unit(int dim, int axis);  // 1 in position `axis`, else 0

    int dim() const { return static_cast<int>(entries_.size()); }
    int order() const;                       // |r| = sum of entries
    double factorial() const;                // (r)! = prod r_i!
    int operator[](int i) const { return entries_[i]; }
    const std::vector<int>& entries() const { return entries_; }

    MultiIndex operator+(const MultiIndex& s) const;
    bool leq(const MultiIndex& s) const;     // componentwise <=
    bool operator==(const MultiIndex& s) const { return entries_ == s.entries_; }

    std::string str() const;                 // "(r1,r2,...)"

private:
    std::vector<int> entries_;
};

/// binom((r),(s)) = prod_i binom(r_i, s_i); 0 unless (s) <= (r).
double multi_binom(const MultiIndex& r, const MultiIndex& s);

double binom(int n, int k);
double factorial(int n);

/// All multi-indices of dimension N with |r| <= D, graded order: by |r|
/// ascending, then lexicographic with earlier axes carrying higher degree
/// first ((2,0) before (1,1) before (0,2)).
std::vector<MultiIndex> enumerate_multiindices(int N, int D);

struct MultiIndexHash {
    std::size_t operator()(const std::vector<int>& v) const {
        std::size_t h = 1469598103934665603ull;
        for (int e : v) {
            h ^= static_cast<std::size_t>(e) + 0x9e3779b97f4a7c15ull;
            h *= 1099511628211ull;
        }
        return h;
    }
};

}  // namespace anaflow
