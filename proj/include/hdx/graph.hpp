#pragma once

// Weighted graphs with a stationary measure, plus bipartite graphs, tensor
// products and double covers.
//
// Edge mass is a symmetric distribution over ordered pairs: an undirected
// edge {u,v} carries half of its weight in each direction, a loop keeps all
// of it. mu(v) is the row sum, so the random walk P(v,u) = pi(v,u)/mu(v) is
// reversible and the normalized adjacency operator is self-adjoint under
// <f,g> = E_mu[fg].

#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hdx/budget.hpp"
#include "hdx/rational.hpp"

namespace hdx {

class WeightedGraph {
public:
    WeightedGraph() = default;
    explicit WeightedGraph(std::size_t n) { resize(n); }

    std::size_t size() const { return names_.size(); }
    std::size_t edge_count() const { return edges_.size(); }
    double total_mass() const { return total_; }

    std::size_t add_vertex(std::string name = {}) {
        names_.push_back(name.empty() ? std::to_string(names_.size())
                                      : std::move(name));
        return names_.size() - 1;
    }

    void resize(std::size_t n) {
        while (names_.size() < n) add_vertex();
    }

    const std::string& name(std::size_t v) const { return names_.at(v); }
    void set_name(std::size_t v, std::string s) { names_.at(v) = std::move(s); }

    // Accumulates; weights are raw and every derived view normalizes by the
    // total mass, so graphs stay immutable once handed to a solver.
    void add_edge(std::size_t u, std::size_t v, double w) {
        if (u >= size() || v >= size()) throw std::out_of_range("edge endpoint");
        if (!(w > 0)) throw std::invalid_argument("edge weight must be positive");
        if (u > v) std::swap(u, v);
        edges_[{u, v}] += w;
        total_ += w;
    }
    void add_edge(std::size_t u, std::size_t v, const Rational& w) {
        add_edge(u, v, w.value());
    }

    const std::map<std::pair<std::size_t, std::size_t>, double>& edges() const {
        return edges_;
    }

    // Normalized undirected weight of {u,v}.
    double weight(std::size_t u, std::size_t v) const {
        if (u > v) std::swap(u, v);
        auto it = edges_.find({u, v});
        return it == edges_.end() ? 0.0 : it->second / total_;
    }

    // Stationary measure: half of each incident edge, all of each loop.
    std::vector<double> measure() const {
        std::vector<double> mu(size(), 0.0);
        for (const auto& [e, w] : edges_) {
            const double p = w / total_;
            if (e.first == e.second) {
                mu[e.first] += p;
            } else {
                mu[e.first] += p / 2;
                mu[e.second] += p / 2;
            }
        }
        return mu;
    }

    // Visits the symmetric ordered-pair distribution pi (sums to 1).
    template <typename F>
    void for_each_ordered(F&& f) const {
        for (const auto& [e, w] : edges_) {
            const double p = w / total_;
            if (e.first == e.second) {
                f(e.first, e.second, p);
            } else {
                f(e.first, e.second, p / 2);
                f(e.second, e.first, p / 2);
            }
        }
    }

    bool empty() const { return edges_.empty(); }

    static WeightedGraph complete(std::size_t m) {
        WeightedGraph g(m);
        for (std::size_t u = 0; u < m; ++u)
            for (std::size_t v = u + 1; v < m; ++v) g.add_edge(u, v, 1.0);
        return g;
    }

    // Edge = two independent uniform vertices.
    static WeightedGraph complete_with_loops(std::size_t m) {
        WeightedGraph g(m);
        for (std::size_t u = 0; u < m; ++u) {
            g.add_edge(u, u, 1.0);
            for (std::size_t v = u + 1; v < m; ++v) g.add_edge(u, v, 2.0);
        }
        return g;
    }

    static WeightedGraph cycle(std::size_t m) {
        WeightedGraph g(m);
        for (std::size_t u = 0; u < m; ++u) g.add_edge(u, (u + 1) % m, 1.0);
        return g;
    }

    void dump_tsv(std::ostream& os) const;

private:
    std::vector<std::string> names_;
    std::map<std::pair<std::size_t, std::size_t>, double> edges_;
    double total_ = 0.0;
};

class BipartiteGraph {
public:
    BipartiteGraph() = default;
    BipartiteGraph(std::size_t nl, std::size_t nr) {
        while (left_.size() < nl) add_left();
        while (right_.size() < nr) add_right();
    }

    std::size_t left_size() const { return left_.size(); }
    std::size_t right_size() const { return right_.size(); }
    std::size_t edge_count() const { return edges_.size(); }

    std::size_t add_left(std::string name = {}) {
        left_.push_back(name.empty() ? "L" + std::to_string(left_.size())
                                     : std::move(name));
        return left_.size() - 1;
    }
    std::size_t add_right(std::string name = {}) {
        right_.push_back(name.empty() ? "R" + std::to_string(right_.size())
                                      : std::move(name));
        return right_.size() - 1;
    }

    const std::string& left_name(std::size_t v) const { return left_.at(v); }
    const std::string& right_name(std::size_t v) const { return right_.at(v); }

    void add_edge(std::size_t l, std::size_t r, double w) {
        if (l >= left_.size() || r >= right_.size())
            throw std::out_of_range("edge endpoint");
        if (!(w > 0)) throw std::invalid_argument("edge weight must be positive");
        edges_[{l, r}] += w;
        total_ += w;
    }

    const std::map<std::pair<std::size_t, std::size_t>, double>& edges() const {
        return edges_;
    }
    double total_mass() const { return total_; }

    std::vector<double> left_measure() const {
        std::vector<double> mu(left_.size(), 0.0);
        for (const auto& [e, w] : edges_) mu[e.first] += w / total_;
        return mu;
    }
    std::vector<double> right_measure() const {
        std::vector<double> mu(right_.size(), 0.0);
        for (const auto& [e, w] : edges_) mu[e.second] += w / total_;
        return mu;
    }

    template <typename F>
    void for_each_edge(F&& f) const {
        for (const auto& [e, w] : edges_) f(e.first, e.second, w / total_);
    }

    bool empty() const { return edges_.empty(); }

    void dump_tsv(std::ostream& os) const;

private:
    std::vector<std::string> left_;
    std::vector<std::string> right_;
    std::map<std::pair<std::size_t, std::size_t>, double> edges_;
    double total_ = 0.0;
};

inline WeightedGraph tensor(const WeightedGraph& g1, const WeightedGraph& g2) {
    const std::size_t n1 = g1.size(), n2 = g2.size();
    check_budget(n1 * n2, "tensor product vertices");
    WeightedGraph g(n1 * n2);
    for (std::size_t a = 0; a < n1; ++a)
        for (std::size_t b = 0; b < n2; ++b)
            g.set_name(a * n2 + b, "(" + g1.name(a) + "," + g2.name(b) + ")");
    g1.for_each_ordered([&](std::size_t a1, std::size_t b1, double p1) {
        g2.for_each_ordered([&](std::size_t a2, std::size_t b2, double p2) {
            const std::size_t u = a1 * n2 + a2, v = b1 * n2 + b2;
            // Ordered mass; off-diagonal pairs are visited once per direction
            // and accumulate to twice the one-way mass, loops once.
            g.add_edge(u, v, p1 * p2);
        });
    });
    return g;
}

inline BipartiteGraph double_cover(const WeightedGraph& g) {
    BipartiteGraph b;
    for (std::size_t v = 0; v < g.size(); ++v) b.add_left(g.name(v) + "|0");
    for (std::size_t v = 0; v < g.size(); ++v) b.add_right(g.name(v) + "|1");
    g.for_each_ordered(
        [&](std::size_t u, std::size_t v, double p) { b.add_edge(u, v, p); });
    return b;
}

namespace detail {
inline void tsv_weight(std::ostream& os, double w) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", w);
    os << buf;
}
}  // namespace detail

inline void WeightedGraph::dump_tsv(std::ostream& os) const {
    os << "# graph\tn=" << size() << "\tm=" << edges_.size() << "\n";
    for (std::size_t v = 0; v < size(); ++v)
        os << "# vertex\t" << v << "\t" << names_[v] << "\n";
    for (const auto& [e, w] : edges_) {
        os << e.first << "\t" << e.second << "\t";
        detail::tsv_weight(os, w / total_);
        os << "\n";
    }
}

inline void BipartiteGraph::dump_tsv(std::ostream& os) const {
    os << "# bipartite\tleft=" << left_.size() << "\tright=" << right_.size()
       << "\tm=" << edges_.size() << "\n";
    for (std::size_t v = 0; v < left_.size(); ++v)
        os << "# left\t" << v << "\t" << left_[v] << "\n";
    for (std::size_t v = 0; v < right_.size(); ++v)
        os << "# right\t" << v << "\t" << right_[v] << "\n";
    for (const auto& [e, w] : edges_) {
        os << e.first << "\t" << e.second << "\t";
        detail::tsv_weight(os, w / total_);
        os << "\n";
    }
}

}  // namespace hdx
