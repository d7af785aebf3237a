#pragma once

#include <cstdint>
#include <mutex>
#include <optional>
#include <set>
#include <vector>

#include "stspgl/model.hpp"

namespace stspgl {

/// A request subset meeting the chance constraint, with its node set
/// N'(Q) = compulsory stops plus every endpoint of a request in Q.
struct FeasibilityCover {
    RequestSet requests;
    NodeSet nodes;

    /// l_Q(i) for every node.
    std::vector<char> node_incidence(int num_nodes) const;
    /// r_Q^hk for every request.
    std::vector<char> request_incidence(int num_requests) const;

    auto operator<=>(const FeasibilityCover& other) const { return requests <=> other.requests; }
    bool operator==(const FeasibilityCover& other) const { return requests == other.requests; }
};

/// Builds the cover record (node set) for `requests`; does not check
/// feasibility.
FeasibilityCover make_cover(const Instance& inst, RequestSet requests);

/// N'(Q) for a request set.
NodeSet cover_nodes(const Instance& inst, const RequestSet& requests);

enum class RemovalOrder { Canonical, Random };

/// Shrinks a feasibility cover by single removals until no removal keeps it
/// feasible, restarting after every successful removal. Throws
/// StructuralError when the input is not a cover.
RequestSet minimal_feasibility_cover(const Instance& inst, const RequestSet& cover,
                                     RemovalOrder order = RemovalOrder::Canonical, std::uint64_t seed = 0);

/// No single request can be dropped while staying a cover. Monotonicity makes
/// the single-removal test equivalent to checking every proper subset.
bool is_minimal(const Instance& inst, const RequestSet& cover);

/// Node set containing all compulsory stops.
struct NodeCover {
    NodeSet nodes;
    auto operator<=>(const NodeCover&) const = default;
};

/// Thread-safe registry of sampled node sets.
class SeenRegistry {
public:
    /// Inserts `nodes`; false when already present.
    bool insert(const NodeSet& nodes);
    bool contains(const NodeSet& nodes) const;
    std::size_t size() const;

private:
    mutable std::mutex mutex_;
    std::set<NodeSet> seen_;
};

struct ExploreOptions {
    int attempts = 200;
};

/// Draws node sets of size `size` containing the compulsory stops until one
/// induces a feasibility cover and is not yet registered in `seen`; then drops
/// non-compulsory nodes (random order) while the induced set stays a cover.
/// Returns nullopt after `opts.attempts` unsuccessful draws.
std::optional<NodeCover> random_minimal_node_cover(const Instance& inst, int size, std::uint64_t seed,
                                                   SeenRegistry& seen, const ExploreOptions& opts = {});

/// Node cover -> induced request set -> minimal feasibility cover.
std::optional<RequestSet> explore(const Instance& inst, int size, std::uint64_t seed, SeenRegistry& seen,
                                  const ExploreOptions& opts = {});

/// Swap neighbourhood around a minimal cover: remove random requests until
/// infeasible, add random unremoved requests until feasible, otherwise put
/// removed ones back in random order, then minimalize. Returns nullopt only
/// for an empty input.
std::optional<RequestSet> local_search(const Instance& inst, const RequestSet& cover, std::uint64_t seed);

}  // namespace stspgl
