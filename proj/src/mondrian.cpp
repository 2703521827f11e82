#include "actgram/mondrian.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "actgram/error.hpp"

namespace actgram {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

double extension(const MondrianTree::Node& n, std::span<const double> x, std::vector<double>* per_dim = nullptr) {
    double e = 0.0;
    for (std::size_t d = 0; d < x.size(); ++d) {
        const double ed = std::max(x[d] - n.upper[d], 0.0) + std::max(n.lower[d] - x[d], 0.0);
        if (per_dim) (*per_dim)[d] = ed;
        e += ed;
    }
    return e;
}

std::size_t pick_dimension(const std::vector<double>& weights, double total, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, total);
    const double dice = u(rng);
    double acc = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t d = 0; d < weights.size(); ++d) {
        if (weights[d] <= 0.0) continue;
        last_positive = d;
        acc += weights[d];
        if (dice < acc) return d;
    }
    return last_positive;
}

nlohmann::json time_to_json(double t) { return std::isinf(t) ? nlohmann::json(nullptr) : nlohmann::json(t); }
double time_from_json(const nlohmann::json& j) {
    return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

// integral values are written without a fractional part to keep files small
nlohmann::ordered_json values_json(const std::vector<double>& v) {
    auto arr = nlohmann::ordered_json::array();
    for (double x : v) {
        if (x == std::trunc(x) && std::abs(x) < 9.0e15) {
            arr.push_back(static_cast<std::int64_t>(x));
        } else {
            arr.push_back(x);
        }
    }
    return arr;
}

// Internal boxes are the union of their children's boxes, so only leaves are stored.
void rebuild_boxes(std::vector<MondrianTree::Node>& nodes, int j) {
    auto& n = nodes[static_cast<std::size_t>(j)];
    if (n.is_leaf()) return;
    rebuild_boxes(nodes, n.left);
    rebuild_boxes(nodes, n.right);
    const auto& l = nodes[static_cast<std::size_t>(n.left)];
    const auto& r = nodes[static_cast<std::size_t>(n.right)];
    n.lower.resize(l.lower.size());
    n.upper.resize(l.upper.size());
    for (std::size_t d = 0; d < l.lower.size(); ++d) {
        n.lower[d] = std::min(l.lower[d], r.lower[d]);
        n.upper[d] = std::max(l.upper[d], r.upper[d]);
    }
}

}  // namespace

std::uint64_t tree_seed(std::uint64_t forest_seed, std::size_t index) {
    return splitmix64(splitmix64(forest_seed) ^ (0xD1B54A32D192ED03ULL * (index + 1)));
}

std::vector<std::size_t> batch_bounds(std::size_t n, std::size_t batches) {
    batches = std::max<std::size_t>(1, std::min(batches, std::max<std::size_t>(n, 1)));
    std::vector<std::size_t> ends;
    for (std::size_t b = 1; b <= batches; ++b) ends.push_back(n * b / batches);
    return ends;
}

MondrianTree::MondrianTree(std::size_t n_classes, double lifetime, std::uint64_t seed)
    : n_classes_(n_classes), lifetime_(lifetime), rng_(seed) {}

int MondrianTree::make_leaf(std::span<const double> x, int y, int parent) {
    Node leaf;
    leaf.parent = parent;
    leaf.split_time = lifetime_;
    leaf.lower.assign(x.begin(), x.end());
    leaf.upper.assign(x.begin(), x.end());
    leaf.counts.assign(n_classes_, 0.0);
    leaf.counts[static_cast<std::size_t>(y)] = 1.0;
    nodes_.push_back(std::move(leaf));
    return static_cast<int>(nodes_.size() - 1);
}

void MondrianTree::extend(std::span<const double> x, int y) {
    if (y < 0 || static_cast<std::size_t>(y) >= n_classes_) {
        throw Error(ErrorKind::Usage, "class label " + std::to_string(y) + " outside 0.." +
                                          std::to_string(n_classes_ - 1));
    }
    if (nodes_.empty()) {
        dim_ = x.size();
        root_ = make_leaf(x, y, -1);
        return;
    }
    if (x.size() != dim_) {
        throw Error(ErrorKind::DimensionMismatch, "expected " + std::to_string(dim_) + " features, got " +
                                                      std::to_string(x.size()));
    }
    std::vector<double> ext(dim_);
    int j = root_;
    double parent_time = 0.0;
    while (true) {
        const double e = extension(nodes_[static_cast<std::size_t>(j)], x, &ext);
        if (e > 0.0) {
            std::exponential_distribution<double> exp_dist(e);
            const double cost = exp_dist(rng_);
            if (parent_time + cost < nodes_[static_cast<std::size_t>(j)].split_time) {
                const std::size_t dim = pick_dimension(ext, e, rng_);
                const Node& old = nodes_[static_cast<std::size_t>(j)];
                const bool above = x[dim] > old.upper[dim];
                std::uniform_real_distribution<double> loc_dist(above ? old.upper[dim] : x[dim],
                                                                above ? x[dim] : old.lower[dim]);
                Node parent;
                parent.parent = old.parent;
                parent.split_dim = dim;
                parent.split_loc = loc_dist(rng_);
                parent.split_time = parent_time + cost;
                parent.lower = old.lower;
                parent.upper = old.upper;
                for (std::size_t d = 0; d < dim_; ++d) {
                    parent.lower[d] = std::min(parent.lower[d], x[d]);
                    parent.upper[d] = std::max(parent.upper[d], x[d]);
                }
                parent.counts = old.counts;
                parent.counts[static_cast<std::size_t>(y)] += 1.0;
                nodes_.push_back(std::move(parent));
                const int p = static_cast<int>(nodes_.size() - 1);
                const int leaf = make_leaf(x, y, p);
                Node& pn = nodes_[static_cast<std::size_t>(p)];
                pn.left = above ? j : leaf;
                pn.right = above ? leaf : j;
                const int grand = nodes_[static_cast<std::size_t>(j)].parent;
                if (grand < 0) {
                    root_ = p;
                } else {
                    Node& g = nodes_[static_cast<std::size_t>(grand)];
                    (g.left == j ? g.left : g.right) = p;
                }
                nodes_[static_cast<std::size_t>(j)].parent = p;
                return;
            }
        }
        Node& n = nodes_[static_cast<std::size_t>(j)];
        for (std::size_t d = 0; d < dim_; ++d) {
            n.lower[d] = std::min(n.lower[d], x[d]);
            n.upper[d] = std::max(n.upper[d], x[d]);
        }
        n.counts[static_cast<std::size_t>(y)] += 1.0;
        if (n.is_leaf()) return;
        parent_time = n.split_time;
        j = x[n.split_dim] <= n.split_loc ? n.left : n.right;
    }
}

int MondrianTree::sample_block(const std::vector<std::vector<double>>& X, const std::vector<int>& y,
                               std::vector<std::size_t> rows, double parent_time, int parent) {
    Node node;
    node.parent = parent;
    node.lower = X[rows.front()];
    node.upper = X[rows.front()];
    node.counts.assign(n_classes_, 0.0);
    for (auto r : rows) {
        for (std::size_t d = 0; d < dim_; ++d) {
            node.lower[d] = std::min(node.lower[d], X[r][d]);
            node.upper[d] = std::max(node.upper[d], X[r][d]);
        }
        node.counts[static_cast<std::size_t>(y[r])] += 1.0;
    }
    std::vector<double> extent(dim_);
    double total = 0.0;
    for (std::size_t d = 0; d < dim_; ++d) total += extent[d] = node.upper[d] - node.lower[d];

    node.split_time = lifetime_;
    bool split = false;
    if (total > 0.0) {
        std::exponential_distribution<double> exp_dist(total);
        const double t = parent_time + exp_dist(rng_);
        if (t < lifetime_) {
            split = true;
            node.split_time = t;
            node.split_dim = pick_dimension(extent, total, rng_);
            std::uniform_real_distribution<double> loc_dist(node.lower[node.split_dim], node.upper[node.split_dim]);
            node.split_loc = loc_dist(rng_);
        }
    }
    nodes_.push_back(node);
    const int id = static_cast<int>(nodes_.size() - 1);
    if (!split) return id;

    std::vector<std::size_t> left, right;
    for (auto r : rows) (X[r][node.split_dim] <= node.split_loc ? left : right).push_back(r);
    if (left.empty() || right.empty()) {
        // location landed on the box edge; treat as a leaf
        nodes_[static_cast<std::size_t>(id)].split_time = lifetime_;
        return id;
    }
    const int l = sample_block(X, y, std::move(left), node.split_time, id);
    const int r = sample_block(X, y, std::move(right), node.split_time, id);
    nodes_[static_cast<std::size_t>(id)].left = l;
    nodes_[static_cast<std::size_t>(id)].right = r;
    return id;
}

void MondrianTree::fit_batch(const std::vector<std::vector<double>>& X, const std::vector<int>& y) {
    nodes_.clear();
    root_ = -1;
    if (X.empty()) return;
    dim_ = X.front().size();
    std::vector<std::size_t> rows(X.size());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    root_ = sample_block(X, y, std::move(rows), 0.0, -1);
}

std::vector<double> MondrianTree::smoothed(const Node& n) const {
    double total = 0.0;
    for (double c : n.counts) total += c;
    std::vector<double> p(n_classes_);
    for (std::size_t k = 0; k < n_classes_; ++k) p[k] = (n.counts[k] + 1.0) / (total + static_cast<double>(n_classes_));
    return p;
}

std::vector<double> MondrianTree::predict_proba(std::span<const double> x) const {
    if (nodes_.empty()) throw Error(ErrorKind::UnfittedForest, "tree has seen no data");
    if (x.size() != dim_) {
        throw Error(ErrorKind::DimensionMismatch, "expected " + std::to_string(dim_) + " features, got " +
                                                      std::to_string(x.size()));
    }
    std::vector<double> out(n_classes_, 0.0);
    double not_separated = 1.0;
    double parent_time = 0.0;
    int j = root_;
    while (true) {
        const Node& n = nodes_[static_cast<std::size_t>(j)];
        const double eta = extension(n, x);
        double p_split = 0.0;
        if (eta > 0.0) {
            const double delta = n.split_time - parent_time;
            p_split = std::isinf(delta) ? 1.0 : -std::expm1(-delta * eta);
        }
        const auto dist = smoothed(n);
        if (p_split > 0.0) {
            for (std::size_t k = 0; k < n_classes_; ++k) out[k] += not_separated * p_split * dist[k];
            not_separated *= 1.0 - p_split;
        }
        if (n.is_leaf()) {
            for (std::size_t k = 0; k < n_classes_; ++k) out[k] += not_separated * dist[k];
            break;
        }
        parent_time = n.split_time;
        j = x[n.split_dim] <= n.split_loc ? n.left : n.right;
    }
    return out;
}

int MondrianTree::route(std::span<const double> x) const {
    int j = root_;
    while (j >= 0 && !nodes_[static_cast<std::size_t>(j)].is_leaf()) {
        const Node& n = nodes_[static_cast<std::size_t>(j)];
        j = x[n.split_dim] <= n.split_loc ? n.left : n.right;
    }
    return j;
}

std::size_t MondrianTree::depth() const {
    std::size_t best = 0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (!nodes_[i].is_leaf()) continue;
        std::size_t d = 0;
        for (int j = static_cast<int>(i); nodes_[static_cast<std::size_t>(j)].parent >= 0;
             j = nodes_[static_cast<std::size_t>(j)].parent) {
            ++d;
        }
        best = std::max(best, d);
    }
    return best;
}

std::size_t MondrianTree::count_violations(const std::vector<std::vector<double>>& X) const {
    std::size_t bad = 0;
    for (const auto& n : nodes_) {
        if (n.is_leaf()) continue;
        const Node& l = nodes_[static_cast<std::size_t>(n.left)];
        const Node& r = nodes_[static_cast<std::size_t>(n.right)];
        for (const Node* c : {&l, &r}) {
            if (!(c->split_time > n.split_time)) ++bad;
            for (std::size_t d = 0; d < dim_; ++d) {
                if (c->lower[d] < n.lower[d] || c->upper[d] > n.upper[d]) {
                    ++bad;
                    break;
                }
            }
        }
        for (std::size_t k = 0; k < n_classes_; ++k) {
            if (l.counts[k] + r.counts[k] != n.counts[k] || n.counts[k] < 0.0) ++bad;
        }
        if (l.upper[n.split_dim] > n.split_loc || r.lower[n.split_dim] <= n.split_loc) ++bad;
    }
    for (const auto& x : X) {
        for (int j = root_; j >= 0;) {
            const Node& n = nodes_[static_cast<std::size_t>(j)];
            for (std::size_t d = 0; d < dim_; ++d) {
                if (x[d] < n.lower[d] || x[d] > n.upper[d]) {
                    ++bad;
                    break;
                }
            }
            if (n.is_leaf()) break;
            j = x[n.split_dim] <= n.split_loc ? n.left : n.right;
        }
    }
    return bad;
}

MondrianForest::MondrianForest(const ForestParams& params) : params_(params) {
    if (params_.n_trees == 0) throw Error(ErrorKind::Usage, "forest needs at least one tree");
    if (params_.n_classes < 2) throw Error(ErrorKind::Usage, "forest needs at least two classes");
    if (!(params_.lifetime > 0.0)) throw Error(ErrorKind::Usage, "lifetime must be positive");
    trees_.reserve(params_.n_trees);
    for (std::size_t m = 0; m < params_.n_trees; ++m) {
        trees_.emplace_back(params_.n_classes, params_.lifetime, tree_seed(params_.seed, m));
    }
}

void MondrianForest::check_batch(const std::vector<std::vector<double>>& X, const std::vector<int>& y) const {
    if (X.size() != y.size()) throw Error(ErrorKind::DimensionMismatch, "X and y sizes differ");
    if (X.empty()) return;
    const std::size_t d = trees_.front().empty() ? X.front().size() : trees_.front().dimension();
    for (std::size_t i = 0; i < X.size(); ++i) {
        if (X[i].size() != d) {
            throw Error(ErrorKind::DimensionMismatch, "row " + std::to_string(i) + " has " +
                                                          std::to_string(X[i].size()) + " features, expected " +
                                                          std::to_string(d));
        }
        if (y[i] < 0 || static_cast<std::size_t>(y[i]) >= params_.n_classes) {
            throw Error(ErrorKind::Usage, "class label out of range");
        }
    }
}

void MondrianForest::partial_fit(const std::vector<std::vector<double>>& X, const std::vector<int>& y) {
    check_batch(X, y);
    for (auto& tree : trees_) {
        for (std::size_t i = 0; i < X.size(); ++i) tree.extend(X[i], y[i]);
    }
    seen_ += X.size();
}

void MondrianForest::fit_batch(const std::vector<std::vector<double>>& X, const std::vector<int>& y) {
    check_batch(X, y);
    for (std::size_t m = 0; m < trees_.size(); ++m) {
        trees_[m] = MondrianTree(params_.n_classes, params_.lifetime, tree_seed(params_.seed, m));
        trees_[m].fit_batch(X, y);
    }
    seen_ = X.size();
}

std::vector<double> MondrianForest::predict_proba(std::span<const double> x) const {
    if (seen_ == 0) throw Error(ErrorKind::UnfittedForest, "forest has seen no data");
    std::vector<double> out(params_.n_classes, 0.0);
    for (const auto& tree : trees_) {
        const auto p = tree.predict_proba(x);
        for (std::size_t k = 0; k < out.size(); ++k) out[k] += p[k];
    }
    for (double& v : out) v /= static_cast<double>(trees_.size());
    return out;
}

int MondrianForest::predict(std::span<const double> x) const {
    const auto p = predict_proba(x);
    return static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
}

std::string forest_to_json(const MondrianForest& forest) {
    nlohmann::ordered_json j;
    const auto& params = forest.params();
    j["format"] = "actgram-mondrian";
    j["version"] = 1;
    j["n_trees"] = params.n_trees;
    j["n_classes"] = params.n_classes;
    j["lifetime"] = time_to_json(params.lifetime);
    j["seed"] = params.seed;
    j["samples_seen"] = forest.samples_seen();
    auto& trees = j["trees"];
    trees = nlohmann::ordered_json::array();
    for (const auto& tree : forest.trees()) {
        std::ostringstream rng;
        rng << tree.rng();
        nlohmann::ordered_json jt;
        jt["root"] = tree.root();
        jt["dimension"] = tree.dimension();
        jt["rng_state"] = rng.str();
        auto& nodes = jt["nodes"];
        nodes = nlohmann::ordered_json::array();
        for (const auto& n : tree.nodes()) {
            nlohmann::ordered_json jn{{"parent", n.parent},
                                      {"left", n.left},
                                      {"right", n.right},
                                      {"dim", n.split_dim},
                                      {"loc", n.split_loc},
                                      {"time", time_to_json(n.split_time)},
                                      {"counts", values_json(n.counts)}};
            if (n.is_leaf()) {
                if (n.lower == n.upper) {
                    jn["point"] = values_json(n.lower);
                } else {
                    jn["lower"] = values_json(n.lower);
                    jn["upper"] = values_json(n.upper);
                }
            }
            nodes.push_back(std::move(jn));
        }
        trees.push_back(std::move(jt));
    }
    return j.dump() + "\n";
}

MondrianForest forest_from_json(const std::string& text) {
    try {
        auto j = nlohmann::json::parse(text);
        if (j.at("format") != "actgram-mondrian" || j.at("version") != 1) {
            throw Error(ErrorKind::BadFile, "not a version-1 mondrian forest");
        }
        ForestParams params;
        params.n_trees = j.at("n_trees").get<std::size_t>();
        params.n_classes = j.at("n_classes").get<std::size_t>();
        params.lifetime = time_from_json(j.at("lifetime"));
        params.seed = j.at("seed").get<std::uint64_t>();
        MondrianForest forest(params);
        forest.set_samples_seen(j.at("samples_seen").get<std::size_t>());
        auto& trees = forest.mutable_trees();
        const auto& jtrees = j.at("trees");
        if (jtrees.size() != trees.size()) throw Error(ErrorKind::BadFile, "tree count mismatch");
        for (std::size_t m = 0; m < trees.size(); ++m) {
            const auto& jt = jtrees[m];
            auto& tree = trees[m];
            tree.set_root(jt.at("root").get<int>());
            tree.set_dimension(jt.at("dimension").get<std::size_t>());
            std::istringstream rng(jt.at("rng_state").get<std::string>());
            rng >> tree.rng();
            for (const auto& jn : jt.at("nodes")) {
                MondrianTree::Node n;
                n.parent = jn.at("parent").get<int>();
                n.left = jn.at("left").get<int>();
                n.right = jn.at("right").get<int>();
                n.split_dim = jn.at("dim").get<std::size_t>();
                n.split_loc = jn.at("loc").get<double>();
                n.split_time = time_from_json(jn.at("time"));
                if (jn.contains("point")) {
                    n.lower = jn.at("point").get<std::vector<double>>();
                    n.upper = n.lower;
                } else if (n.left < 0) {
                    n.lower = jn.at("lower").get<std::vector<double>>();
                    n.upper = jn.at("upper").get<std::vector<double>>();
                }
                n.counts = jn.at("counts").get<std::vector<double>>();
                tree.mutable_nodes().push_back(std::move(n));
            }
            auto& nodes = tree.mutable_nodes();
            for (const auto& n : nodes) {
                const auto bad = [&](int c) { return c < -1 || c >= static_cast<int>(nodes.size()); };
                if (bad(n.left) || bad(n.right) || bad(n.parent) || (n.left < 0) != (n.right < 0)) {
                    throw Error(ErrorKind::BadFile, "forest json: node links out of range");
                }
            }
            if (!nodes.empty()) {
                if (tree.root() < 0 || tree.root() >= static_cast<int>(nodes.size())) {
                    throw Error(ErrorKind::BadFile, "forest json: root out of range");
                }
                rebuild_boxes(nodes, tree.root());
            }
        }
        return forest;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::BadFile, std::string("forest json: ") + e.what());
    }
}

}  // namespace actgram
