#pragma once

#include <set>
#include <string>
#include <vector>

#include "entlayer/scm.hpp"

namespace entlayer::detail {

// Distinct joint assignments reachable with positive probability, built
// one node at a time in topological order. Unassigned slots hold 0.
class SupportFrontier {
public:
    SupportFrontier(std::size_t n, std::size_t limit) : limit_(limit) {
        states_.insert(std::vector<Value>(n, 0));
    }

    std::set<std::vector<Value>> parent_tuples(const std::vector<NodeId>& parents) const {
        std::set<std::vector<Value>> out;
        for (const auto& s : states_) {
            out.insert(project(s, parents));
        }
        return out;
    }

    // f(parent_tuple, noise_value) -> output value.
    template <typename F>
    void assign(NodeId v, const std::vector<NodeId>& parents,
                const std::vector<Value>& positive_noise, F&& f) {
        std::set<std::vector<Value>> next;
        for (const auto& s : states_) {
            auto tuple = project(s, parents);
            for (Value n : positive_noise) {
                auto t = s;
                t[index_of(v)] = f(tuple, n);
                next.insert(std::move(t));
                if (next.size() > limit_) {
                    throw ScmError("reachable support exceeds " + std::to_string(limit_) +
                                   " joint assignments");
                }
            }
        }
        states_ = std::move(next);
    }

    const std::set<std::vector<Value>>& states() const { return states_; }

private:
    static std::vector<Value> project(const std::vector<Value>& s,
                                      const std::vector<NodeId>& parents) {
        std::vector<Value> out;
        out.reserve(parents.size());
        for (NodeId p : parents) {
            out.push_back(s[index_of(p)]);
        }
        return out;
    }

    std::size_t limit_;
    std::set<std::vector<Value>> states_;
};

}  // namespace entlayer::detail
