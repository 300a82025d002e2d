#include "anaflow/jet.hpp"

#include <map>

namespace anaflow {

JetLayout::JetLayout(int dim, int degree) : dim_(dim), degree_(degree) {
    indices_ = enumerate_multiindices(dim, degree);
    ranks_.reserve(indices_.size());
    for (int i = 0; i < static_cast<int>(indices_.size()); ++i)
        ranks_.emplace(indices_[i].entries(), i);
}

int JetLayout::rank(const MultiIndex& r) const {
    auto it = ranks_.find(r.entries());
    return it == ranks_.end() ? -1 : it->second;
}

std::shared_ptr<const JetLayout> JetLayout::get(int dim, int degree) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::shared_ptr<const JetLayout>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(dim, degree);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto lay = std::shared_ptr<const JetLayout>(new JetLayout(dim, degree));
    cache.emplace(key, lay);
    return lay;
}

}  // namespace anaflow
