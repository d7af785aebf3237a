#include "stspgl/covers.hpp"

#include <algorithm>

#include "stspgl/random.hpp"
#include "stspgl/scenarios.hpp"

namespace stspgl {

std::vector<char> FeasibilityCover::node_incidence(int num_nodes) const {
    std::vector<char> l(static_cast<std::size_t>(num_nodes), 0);
    for (int v : nodes) l[v] = 1;
    return l;
}

std::vector<char> FeasibilityCover::request_incidence(int num_requests) const {
    std::vector<char> r(static_cast<std::size_t>(num_requests), 0);
    for (int q : requests) r[q] = 1;
    return r;
}

NodeSet cover_nodes(const Instance& inst, const RequestSet& requests) {
    NodeSet nodes(inst.compulsory().begin(), inst.compulsory().end());
    for (int r : requests) {
        nodes.push_back(inst.request(r).origin);
        nodes.push_back(inst.request(r).destination);
    }
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    return nodes;
}

FeasibilityCover make_cover(const Instance& inst, RequestSet requests) {
    std::sort(requests.begin(), requests.end());
    requests.erase(std::unique(requests.begin(), requests.end()), requests.end());
    FeasibilityCover cover;
    cover.nodes = cover_nodes(inst, requests);
    cover.requests = std::move(requests);
    return cover;
}

namespace {

RequestSet without(const RequestSet& q, std::size_t pos) {
    RequestSet out;
    out.reserve(q.size() - 1);
    out.insert(out.end(), q.begin(), q.begin() + static_cast<std::ptrdiff_t>(pos));
    out.insert(out.end(), q.begin() + static_cast<std::ptrdiff_t>(pos) + 1, q.end());
    return out;
}

}  // namespace

RequestSet minimal_feasibility_cover(const Instance& inst, const RequestSet& cover, RemovalOrder order,
                                     std::uint64_t seed) {
    if (!is_feasibility_cover(inst, cover)) {
        throw StructuralError("minimal_feasibility_cover called on a set that is not a feasibility cover");
    }
    Rng rng(seed);
    RequestSet q = cover;
    // The recursion restarts the scan after each successful removal.
    for (;;) {
        std::vector<std::size_t> positions(q.size());
        for (std::size_t i = 0; i < q.size(); ++i) positions[i] = i;
        if (order == RemovalOrder::Random) rng.shuffle(positions);
        bool removed = false;
        for (auto pos : positions) {
            RequestSet smaller = without(q, pos);
            if (is_feasibility_cover(inst, smaller)) {
                q = std::move(smaller);
                removed = true;
                break;
            }
        }
        if (!removed) return q;
    }
}

bool is_minimal(const Instance& inst, const RequestSet& cover) {
    for (std::size_t pos = 0; pos < cover.size(); ++pos) {
        if (is_feasibility_cover(inst, without(cover, pos))) return false;
    }
    return true;
}

bool SeenRegistry::insert(const NodeSet& nodes) {
    std::lock_guard lock(mutex_);
    return seen_.insert(nodes).second;
}

bool SeenRegistry::contains(const NodeSet& nodes) const {
    std::lock_guard lock(mutex_);
    return seen_.contains(nodes);
}

std::size_t SeenRegistry::size() const {
    std::lock_guard lock(mutex_);
    return seen_.size();
}

std::optional<NodeCover> random_minimal_node_cover(const Instance& inst, int size, std::uint64_t seed,
                                                   SeenRegistry& seen, const ExploreOptions& opts) {
    const int n = inst.num_nodes();
    const auto& comp = inst.compulsory();
    if (size < static_cast<int>(comp.size()) || size > n) return std::nullopt;

    std::vector<int> optional_nodes;
    for (int v = 0; v < n; ++v) {
        if (!inst.is_compulsory(v)) optional_nodes.push_back(v);
    }
    const auto extra = static_cast<std::size_t>(size) - comp.size();
    Rng rng(seed);

    for (int attempt = 0; attempt < opts.attempts; ++attempt) {
        rng.shuffle(optional_nodes);
        NodeSet sample(comp.begin(), comp.end());
        sample.insert(sample.end(), optional_nodes.begin(), optional_nodes.begin() + static_cast<std::ptrdiff_t>(extra));
        std::sort(sample.begin(), sample.end());
        if (seen.contains(sample)) continue;
        if (!is_feasibility_cover(inst, induced_requests(inst, sample))) continue;
        if (!seen.insert(sample)) continue;

        std::vector<int> removable;
        for (int v : sample) {
            if (!inst.is_compulsory(v)) removable.push_back(v);
        }
        rng.shuffle(removable);
        NodeSet current = sample;
        // Keep scanning until a full pass removes nothing.
        bool changed = true;
        while (changed) {
            changed = false;
            for (auto it = removable.begin(); it != removable.end(); ++it) {
                NodeSet trial;
                trial.reserve(current.size() - 1);
                for (int v : current) {
                    if (v != *it) trial.push_back(v);
                }
                if (is_feasibility_cover(inst, induced_requests(inst, trial))) {
                    current = std::move(trial);
                    removable.erase(it);
                    changed = true;
                    break;
                }
            }
        }
        return NodeCover{std::move(current)};
    }
    return std::nullopt;
}

std::optional<RequestSet> explore(const Instance& inst, int size, std::uint64_t seed, SeenRegistry& seen,
                                  const ExploreOptions& opts) {
    auto node_cover = random_minimal_node_cover(inst, size, seed, seen, opts);
    if (!node_cover) return std::nullopt;
    const RequestSet induced = induced_requests(inst, node_cover->nodes);
    return minimal_feasibility_cover(inst, induced);
}

std::optional<RequestSet> local_search(const Instance& inst, const RequestSet& cover, std::uint64_t seed) {
    if (cover.empty()) return std::nullopt;
    Rng rng(seed);
    RequestSet q = cover;
    std::vector<int> removed;
    while (!q.empty() && is_feasibility_cover(inst, q)) {
        const auto pos = static_cast<std::size_t>(rng.below(q.size()));
        removed.push_back(q[pos]);
        q.erase(q.begin() + static_cast<std::ptrdiff_t>(pos));
    }

    auto add = [&q](int r) { q.insert(std::lower_bound(q.begin(), q.end(), r), r); };

    std::vector<int> candidates;
    for (int r = 0; r < inst.num_requests(); ++r) {
        if (std::find(removed.begin(), removed.end(), r) == removed.end() && !std::binary_search(q.begin(), q.end(), r)) {
            candidates.push_back(r);
        }
    }
    rng.shuffle(candidates);
    bool feasible = is_feasibility_cover(inst, q);
    for (int r : candidates) {
        if (feasible) break;
        add(r);
        feasible = is_feasibility_cover(inst, q);
    }
    if (!feasible) {
        rng.shuffle(removed);
        for (int r : removed) {
            add(r);
            if (is_feasibility_cover(inst, q)) {
                feasible = true;
                break;
            }
        }
    }
    if (!feasible) return std::nullopt;
    return minimal_feasibility_cover(inst, q);
}

}  // namespace stspgl
