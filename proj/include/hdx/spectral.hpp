#pragma once

// Second eigenvalues of weighted graphs, bipartite singular values, and the
// decomposition bound lambda(G) <= gamma + lambda_2^2 (1 - gamma).
//
// All solvers work on the measure-conjugated operator
//   S(u,v) = pi(u,v) / sqrt(mu(u) mu(v)),
// which is symmetric and shares its spectrum with the normalized adjacency
// walk. Its top eigenvector is sqrt(mu) with eigenvalue 1 when the graph is
// connected; lambda is the largest remaining absolute eigenvalue.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hdx/graph.hpp"

namespace hdx {

struct SolveOptions {
    std::size_t dense_limit = 4096;
    double dense_tol = 1e-9;
    double power_tol = 1e-6;
    int restarts = 3;
    std::size_t max_iterations = 500000;
    std::uint64_t seed = 0x5eedf00d;
    bool force_power = false;
};

struct SpectralReport {
    double lambda = 1.0;
    bool connected = true;
    std::string method;
    std::size_t iterations = 0;
    double tolerance = 0.0;
    std::size_t n = 0;
    std::size_t m = 0;
};

namespace detail {

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n) {
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    }
    std::size_t find(std::size_t x) {
        while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }
    bool all_joined() {
        if (parent_.empty()) return true;
        const std::size_t r = find(0);
        for (std::size_t v = 1; v < parent_.size(); ++v)
            if (find(v) != r) return false;
        return true;
    }

private:
    std::vector<std::size_t> parent_;
};

}  // namespace detail

inline bool is_connected(const WeightedGraph& g) {
    if (g.size() == 0 || g.empty()) return false;
    detail::UnionFind uf(g.size());
    for (const auto& [e, w] : g.edges()) uf.unite(e.first, e.second);
    return uf.all_joined();
}

inline bool is_connected(const BipartiteGraph& b) {
    if (b.left_size() == 0 || b.right_size() == 0 || b.empty()) return false;
    detail::UnionFind uf(b.left_size() + b.right_size());
    for (const auto& [e, w] : b.edges())
        uf.unite(e.first, b.left_size() + e.second);
    return uf.all_joined();
}

// Row-stochastic walk matrix P(v,u) = pi(v,u)/mu(v).
inline Eigen::MatrixXd walk_matrix(const WeightedGraph& g) {
    const auto mu = g.measure();
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(g.size(), g.size());
    g.for_each_ordered([&](std::size_t u, std::size_t v, double w) {
        p(u, v) += w / mu[u];
    });
    return p;
}

// Symmetric conjugated operator; requires mu > 0 everywhere.
inline Eigen::MatrixXd normalized_matrix(const WeightedGraph& g) {
    const auto mu = g.measure();
    for (double x : mu)
        if (!(x > 0)) throw std::invalid_argument("vertex with zero measure");
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(g.size(), g.size());
    g.for_each_ordered([&](std::size_t u, std::size_t v, double w) {
        s(u, v) += w / std::sqrt(mu[u] * mu[v]);
    });
    return s;
}

// Eigenvalues of the normalized operator, descending. Connected input.
inline std::vector<double> dense_spectrum(const WeightedGraph& g) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(normalized_matrix(g),
                                                      Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    std::vector<double> out(ev.data(), ev.data() + ev.size());
    std::reverse(out.begin(), out.end());
    return out;
}

namespace detail {

struct OrderedArc {
    std::size_t u, v;
    double s;  // conjugated weight
};

inline std::vector<OrderedArc> conjugated_arcs(const WeightedGraph& g,
                                               const std::vector<double>& mu) {
    std::vector<OrderedArc> arcs;
    arcs.reserve(2 * g.edge_count());
    g.for_each_ordered([&](std::size_t u, std::size_t v, double w) {
        arcs.push_back({u, v, w / std::sqrt(mu[u] * mu[v])});
    });
    return arcs;
}

// Largest |eigenvalue| of S restricted to the complement of u0.
inline std::pair<double, std::size_t> power_lambda(
    const std::vector<OrderedArc>& arcs, const Eigen::VectorXd& u0,
    std::uint64_t seed, double stop_tol, std::size_t max_iter) {
    const auto n = static_cast<Eigen::Index>(u0.size());
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    Eigen::VectorXd x(n), y(n);
    for (Eigen::Index i = 0; i < n; ++i) x[i] = gauss(rng);
    x -= u0.dot(x) * u0;
    if (x.norm() < 1e-12) return {0.0, 0};
    x.normalize();
    double prev = 0.0;
    for (std::size_t it = 1; it <= max_iter; ++it) {
        y.setZero();
        for (const auto& a : arcs) y[a.u] += a.s * x[a.v];
        y -= u0.dot(y) * u0;
        const double est = y.norm();
        if (est < 1e-300) return {0.0, it};
        y /= est;
        if (std::abs(est - prev) < stop_tol) return {est, it};
        prev = est;
        x.swap(y);
    }
    return {prev, max_iter};
}

}  // namespace detail

inline SpectralReport second_eigenvalue(const WeightedGraph& g,
                                        const SolveOptions& opts = {}) {
    if (g.size() == 0 || g.empty())
        throw std::invalid_argument("empty graph has no second eigenvalue");
    SpectralReport rep;
    rep.n = g.size();
    rep.m = g.edge_count();
    if (!is_connected(g)) {
        rep.lambda = 1.0;
        rep.connected = false;
        rep.method = "disconnected";
        rep.tolerance = 0.0;
        return rep;
    }
    if (g.size() <= opts.dense_limit && !opts.force_power) {
        const auto spec = dense_spectrum(g);
        double lam = 0.0;
        for (std::size_t i = 1; i < spec.size(); ++i)
            lam = std::max(lam, std::abs(spec[i]));
        rep.lambda = lam;
        rep.method = "dense";
        rep.iterations = 1;
        rep.tolerance = opts.dense_tol;
        return rep;
    }
    const auto mu = g.measure();
    for (double x : mu)
        if (!(x > 0)) throw std::invalid_argument("vertex with zero measure");
    const auto arcs = detail::conjugated_arcs(g, mu);
    Eigen::VectorXd u0(g.size());
    for (std::size_t v = 0; v < g.size(); ++v)
        u0[static_cast<Eigen::Index>(v)] = std::sqrt(mu[v]);
    u0.normalize();
    double lam = 0.0;
    std::size_t iters = 0;
    const double stop = std::max(1e-12, opts.power_tol * 1e-4);
    for (int r = 0; r < opts.restarts; ++r) {
        auto [est, it] = detail::power_lambda(arcs, u0, opts.seed + r, stop,
                                              opts.max_iterations);
        lam = std::max(lam, est);
        iters += it;
    }
    rep.lambda = lam;
    rep.method = "power";
    rep.iterations = iters;
    rep.tolerance = opts.power_tol;
    return rep;
}

// Largest singular value of the left-to-right Markov operator on mean-zero
// functions; equals the second singular value of the conjugated edge matrix.
inline SpectralReport bipartite_second_singular(const BipartiteGraph& b,
                                                const SolveOptions& opts = {}) {
    if (b.left_size() == 0 || b.right_size() == 0 || b.empty())
        throw std::invalid_argument("empty bipartite graph");
    SpectralReport rep;
    rep.n = b.left_size() + b.right_size();
    rep.m = b.edge_count();
    rep.tolerance = opts.dense_tol;
    if (!is_connected(b)) {
        rep.lambda = 1.0;
        rep.connected = false;
        rep.method = "disconnected";
        return rep;
    }
    const auto mul = b.left_measure();
    const auto mur = b.right_measure();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(b.left_size(), b.right_size());
    b.for_each_edge([&](std::size_t l, std::size_t r, double w) {
        m(l, r) += w / std::sqrt(mul[l] * mur[r]);
    });
    Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
    const auto& sv = svd.singularValues();
    rep.lambda = sv.size() > 1 ? sv[1] : 0.0;
    rep.method = "dense";
    rep.iterations = 1;
    return rep;
}

struct ClosenessReport {
    double epsilon = 0.0;
    double lambda_a = 0.0;
    double lambda_b = 0.0;
    bool holds = false;
};

// epsilon = max_v ||A_v - B_v||_1 over walk rows; checks
// lambda(A) <= lambda(B) + epsilon.
inline ClosenessReport l1_closeness_bound(const WeightedGraph& a,
                                          const WeightedGraph& b,
                                          double tol = 1e-9) {
    if (a.size() != b.size())
        throw std::invalid_argument("vertex sets differ");
    const auto mua = a.measure();
    const auto mub = b.measure();
    for (std::size_t v = 0; v < a.size(); ++v)
        if (std::abs(mua[v] - mub[v]) > tol)
            throw std::invalid_argument("stationary measures differ");
    const Eigen::MatrixXd pa = walk_matrix(a);
    const Eigen::MatrixXd pb = walk_matrix(b);
    ClosenessReport rep;
    for (Eigen::Index v = 0; v < pa.rows(); ++v)
        rep.epsilon =
            std::max(rep.epsilon, (pa.row(v) - pb.row(v)).cwiseAbs().sum());
    rep.lambda_a = second_eigenvalue(a).lambda;
    rep.lambda_b = second_eigenvalue(b).lambda;
    rep.holds = rep.lambda_a <= rep.lambda_b + rep.epsilon + tol;
    return rep;
}

// One block of a decomposition: a graph on its own vertex set plus the map
// into the ambient vertex set.
struct DecompositionPart {
    WeightedGraph graph;
    std::vector<std::size_t> to_ambient;
};

struct LocalDecomposition {
    std::vector<DecompositionPart> parts;
    std::vector<double> part_weight;  // nu_T, normalized on use
};

struct LocalToGlobalReport {
    bool valid_decomposition = false;
    double mixture_error = 0.0;
    double gamma = 0.0;
    double lambda2 = 0.0;
    double bound = 0.0;
    double actual = 0.0;
    bool holds = false;
};

namespace detail {

inline double decomposition_mixture_error(const WeightedGraph& g,
                                          const LocalDecomposition& tau,
                                          const std::vector<double>& nu) {
    std::map<std::pair<std::size_t, std::size_t>, double> mix;
    for (std::size_t t = 0; t < tau.parts.size(); ++t) {
        const auto& part = tau.parts[t];
        const double total = part.graph.total_mass();
        for (const auto& [e, w] : part.graph.edges()) {
            std::size_t u = part.to_ambient.at(e.first);
            std::size_t v = part.to_ambient.at(e.second);
            if (u > v) std::swap(u, v);
            mix[{u, v}] += nu[t] * (w / total);
        }
    }
    double err = 0.0;
    for (const auto& [e, w] : g.edges())
        err = std::max(err, std::abs(mix[e] - w / g.total_mass()));
    for (const auto& [e, w] : mix)
        err = std::max(err, std::abs(w - g.weight(e.first, e.second)));
    return err;
}

}  // namespace detail

// Bipartite graph between ambient vertices and decomposition parts; the edge
// mass of (v, t) is nu(t) times the stationary measure of v inside part t.
inline BipartiteGraph decomposition_graph(const WeightedGraph& g,
                                          const LocalDecomposition& tau,
                                          const std::vector<double>& nu) {
    BipartiteGraph h;
    for (std::size_t v = 0; v < g.size(); ++v) h.add_left(g.name(v));
    for (std::size_t t = 0; t < tau.parts.size(); ++t)
        h.add_right("part" + std::to_string(t));
    for (std::size_t t = 0; t < tau.parts.size(); ++t) {
        const auto& part = tau.parts[t];
        const auto mu = part.graph.measure();
        for (std::size_t v = 0; v < part.graph.size(); ++v)
            if (mu[v] > 0) h.add_edge(part.to_ambient.at(v), t, nu[t] * mu[v]);
    }
    return h;
}

inline LocalToGlobalReport local_to_global_check(const WeightedGraph& g,
                                                 const LocalDecomposition& tau,
                                                 const SolveOptions& opts = {},
                                                 double tol = 1e-9) {
    if (tau.parts.empty() || tau.parts.size() != tau.part_weight.size())
        throw std::invalid_argument("malformed decomposition");
    std::vector<double> nu = tau.part_weight;
    const double nu_total = std::accumulate(nu.begin(), nu.end(), 0.0);
    if (!(nu_total > 0)) throw std::invalid_argument("part weights vanish");
    for (double& x : nu) x /= nu_total;

    LocalToGlobalReport rep;
    rep.mixture_error = detail::decomposition_mixture_error(g, tau, nu);
    rep.valid_decomposition = rep.mixture_error <= tol;
    for (const auto& part : tau.parts)
        rep.gamma = std::max(rep.gamma,
                             second_eigenvalue(part.graph, opts).lambda);
    rep.lambda2 =
        bipartite_second_singular(decomposition_graph(g, tau, nu), opts).lambda;
    rep.bound = rep.gamma + rep.lambda2 * rep.lambda2 * (1.0 - rep.gamma);
    rep.actual = second_eigenvalue(g, opts).lambda;
    rep.holds = rep.valid_decomposition && rep.actual <= rep.bound + tol;
    return rep;
}

// Bipartite version: parts are bipartite subgraphs, the bound multiplies the
// two side-to-part singular values.
struct BipartiteDecompositionPart {
    BipartiteGraph graph;
    std::vector<std::size_t> left_to_ambient;
    std::vector<std::size_t> right_to_ambient;
};

struct BipartiteLocalDecomposition {
    std::vector<BipartiteDecompositionPart> parts;
    std::vector<double> part_weight;
};

inline LocalToGlobalReport bipartite_local_to_global_check(
    const BipartiteGraph& g, const BipartiteLocalDecomposition& tau,
    const SolveOptions& opts = {}, double tol = 1e-9) {
    if (tau.parts.empty() || tau.parts.size() != tau.part_weight.size())
        throw std::invalid_argument("malformed decomposition");
    std::vector<double> nu = tau.part_weight;
    const double nu_total = std::accumulate(nu.begin(), nu.end(), 0.0);
    if (!(nu_total > 0)) throw std::invalid_argument("part weights vanish");
    for (double& x : nu) x /= nu_total;

    LocalToGlobalReport rep;
    std::map<std::pair<std::size_t, std::size_t>, double> mix;
    for (std::size_t t = 0; t < tau.parts.size(); ++t) {
        const auto& part = tau.parts[t];
        part.graph.for_each_edge([&](std::size_t l, std::size_t r, double w) {
            mix[{part.left_to_ambient.at(l), part.right_to_ambient.at(r)}] +=
                nu[t] * w;
        });
    }
    for (const auto& [e, w] : g.edges())
        rep.mixture_error = std::max(
            rep.mixture_error, std::abs(mix[e] - w / g.total_mass()));
    for (const auto& [e, w] : mix) {
        auto it = g.edges().find(e);
        const double gw = it == g.edges().end() ? 0.0
                                                : it->second / g.total_mass();
        rep.mixture_error = std::max(rep.mixture_error, std::abs(w - gw));
    }
    rep.valid_decomposition = rep.mixture_error <= tol;

    for (const auto& part : tau.parts)
        rep.gamma = std::max(
            rep.gamma, bipartite_second_singular(part.graph, opts).lambda);

    BipartiteGraph btl, btr;
    for (std::size_t t = 0; t < tau.parts.size(); ++t) {
        btl.add_right("part" + std::to_string(t));
        btr.add_right("part" + std::to_string(t));
    }
    for (std::size_t v = 0; v < g.left_size(); ++v) btl.add_left(g.left_name(v));
    for (std::size_t v = 0; v < g.right_size(); ++v)
        btr.add_left(g.right_name(v));
    for (std::size_t t = 0; t < tau.parts.size(); ++t) {
        const auto& part = tau.parts[t];
        const auto mul = part.graph.left_measure();
        const auto mur = part.graph.right_measure();
        for (std::size_t v = 0; v < part.graph.left_size(); ++v)
            if (mul[v] > 0)
                btl.add_edge(part.left_to_ambient.at(v), t, nu[t] * mul[v]);
        for (std::size_t v = 0; v < part.graph.right_size(); ++v)
            if (mur[v] > 0)
                btr.add_edge(part.right_to_ambient.at(v), t, nu[t] * mur[v]);
    }
    const double l2l = bipartite_second_singular(btl, opts).lambda;
    const double l2r = bipartite_second_singular(btr, opts).lambda;
    rep.lambda2 = l2l * l2r;
    rep.bound = rep.gamma + rep.lambda2;
    rep.actual = bipartite_second_singular(g, opts).lambda;
    rep.holds = rep.valid_decomposition && rep.actual <= rep.bound + tol;
    return rep;
}

}  // namespace hdx
