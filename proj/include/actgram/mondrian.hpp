#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace actgram {

/// Axis-aligned random partition tree grown by Mondrian-process extension.
/// Every node keeps the bounding box of the data routed through it, its split
/// time and per-class counts. Leaves carry split time = lifetime.
class MondrianTree {
public:
    struct Node {
        int parent = -1;
        int left = -1;
        int right = -1;
        std::size_t split_dim = 0;
        double split_loc = 0.0;
        double split_time = std::numeric_limits<double>::infinity();
        std::vector<double> lower;
        std::vector<double> upper;
        std::vector<double> counts;

        bool is_leaf() const { return left < 0; }
    };

    MondrianTree() = default;
    MondrianTree(std::size_t n_classes, double lifetime, std::uint64_t seed);

    /// Adds one labeled point, possibly inserting a new split above an existing node.
    void extend(std::span<const double> x, int y);

    /// Replaces the tree by one sampled top-down from all points at once.
    void fit_batch(const std::vector<std::vector<double>>& X, const std::vector<int>& y);

    /// Class distribution for x, mixing in the chance that an unseen split
    /// would separate x from the data at each node on its path.
    std::vector<double> predict_proba(std::span<const double> x) const;

    bool empty() const { return nodes_.empty(); }
    int root() const { return root_; }
    std::size_t dimension() const { return dim_; }
    std::size_t n_classes() const { return n_classes_; }
    double lifetime() const { return lifetime_; }
    const std::vector<Node>& nodes() const { return nodes_; }
    std::size_t depth() const;

    /// Leaf reached by routing x through the split rules.
    int route(std::span<const double> x) const;

    /// Number of structural violations: child boxes outside parent boxes,
    /// split times not increasing root->leaf, child counts not summing to the
    /// parent's, and training points falling outside the boxes on their path.
    std::size_t count_violations(const std::vector<std::vector<double>>& X) const;

    std::mt19937_64& rng() { return rng_; }
    const std::mt19937_64& rng() const { return rng_; }

    // Serialization access.
    std::vector<Node>& mutable_nodes() { return nodes_; }
    void set_root(int r) { root_ = r; }
    void set_dimension(std::size_t d) { dim_ = d; }

private:
    int make_leaf(std::span<const double> x, int y, int parent);
    int sample_block(const std::vector<std::vector<double>>& X, const std::vector<int>& y,
                     std::vector<std::size_t> rows, double parent_time, int parent);
    std::vector<double> smoothed(const Node& n) const;

    std::size_t n_classes_ = 0;
    double lifetime_ = std::numeric_limits<double>::infinity();
    std::size_t dim_ = 0;
    int root_ = -1;
    std::vector<Node> nodes_;
    std::mt19937_64 rng_;
};

struct ForestParams {
    std::size_t n_trees = 100;
    double lifetime = std::numeric_limits<double>::infinity();
    std::size_t n_classes = 4;
    std::uint64_t seed = 0;
};

class MondrianForest {
public:
    explicit MondrianForest(const ForestParams& params = {});

    /// Presents the batch in order; each tree extends with its own rng stream.
    void partial_fit(const std::vector<std::vector<double>>& X, const std::vector<int>& y);

    /// Discards the trees and samples each one from the whole dataset at once.
    void fit_batch(const std::vector<std::vector<double>>& X, const std::vector<int>& y);

    /// Mean of the per-tree distributions.
    std::vector<double> predict_proba(std::span<const double> x) const;
    int predict(std::span<const double> x) const;

    const ForestParams& params() const { return params_; }
    const std::vector<MondrianTree>& trees() const { return trees_; }
    std::vector<MondrianTree>& mutable_trees() { return trees_; }
    std::size_t samples_seen() const { return seen_; }
    void set_samples_seen(std::size_t n) { seen_ = n; }

private:
    void check_batch(const std::vector<std::vector<double>>& X, const std::vector<int>& y) const;

    ForestParams params_;
    std::vector<MondrianTree> trees_;
    std::size_t seen_ = 0;
};

/// Seed of tree `index` derived from the forest seed.
std::uint64_t tree_seed(std::uint64_t forest_seed, std::size_t index);

/// Splits n samples into `batches` contiguous, nearly equal mini-batches
/// (returns the batch end offsets).
std::vector<std::size_t> batch_bounds(std::size_t n, std::size_t batches);

std::string forest_to_json(const MondrianForest& forest);
MondrianForest forest_from_json(const std::string& text);

}  // namespace actgram
