#pragma once

// Grassmann subposets of F_2^n: downward-closed families of subspaces with a
// measured top level, their link graphs, containment graphs, and expansion
// certification.
//
// The top measure extends to flags by sampling a top space and then a
// uniform maximal chain inside it. Every level marginal conditioned on
// passing through a fixed subspace w is then proportional to the up-set
// mass up(E) = sum of top weights over tops containing E, which is the only
// derived quantity the graph builders need.

#include <algorithm>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "hdx/budget.hpp"
#include "hdx/f2.hpp"
#include "hdx/graph.hpp"
#include "hdx/spectral.hpp"

namespace hdx {

// levels[k] holds subspaces of dimension base_dim + k, each level sorted.
// base_dim is 0 for ordinary posets and positive for superspace filters.
struct GrassmannPoset {
    int n = 0;         // ambient dimension
    int d = 0;         // levels above the bottom
    int base_dim = 0;  // dimension of the bottom level's spaces
    std::vector<std::vector<Subspace>> levels;
    std::vector<double> top_weight;  // aligned with levels[d]
    std::unordered_map<std::string, double> up_mass;  // key -> up-set mass
    int spanned_dim = 0;  // dim of span of the first level's spaces

    bool contains(const Subspace& s) const {
        return up_mass.count(s.key()) > 0;
    }
    double up(const Subspace& s) const {
        auto it = up_mass.find(s.key());
        return it == up_mass.end() ? 0.0 : it->second;
    }
    const std::vector<Subspace>& level(int i) const { return levels.at(i); }
};

namespace detail {

// All subspaces of s with dimension <= max_dim, grouped by dimension.
inline std::vector<std::vector<Subspace>> subspaces_below(const Subspace& s,
                                                          int max_dim) {
    std::vector<std::vector<Subspace>> levels(
        std::min(max_dim, s.dim()) + 1);
    levels[0].push_back(Subspace(s.ambient()));
    const auto elems = s.elements();
    for (int k = 0; k + 1 < (int)levels.size(); ++k) {
        std::unordered_set<std::string> seen;
        for (const auto& u : levels[k])
            for (const auto& v : elems) {
                if (v.is_zero() || u.contains(v)) continue;
                Subspace bigger = u;
                bigger.insert(v);
                if (seen.insert(bigger.key()).second)
                    levels[k + 1].push_back(std::move(bigger));
            }
        std::sort(levels[k + 1].begin(), levels[k + 1].end());
    }
    return levels;
}

inline void accumulate_poset(GrassmannPoset& y,
                             const std::vector<Subspace>& tops,
                             const std::vector<double>& weights) {
    std::unordered_set<std::string> placed;
    y.levels.assign(y.d + 1, {});
    for (std::size_t t = 0; t < tops.size(); ++t) {
        auto below = subspaces_below(tops[t], y.d);
        for (int k = 0; k < (int)below.size(); ++k)
            for (auto& u : below[k]) {
                y.up_mass[u.key()] += weights[t];
                if (placed.insert(u.key()).second)
                    y.levels[k].push_back(std::move(u));
            }
    }
    for (auto& level : y.levels) std::sort(level.begin(), level.end());
    y.top_weight.clear();
    for (const auto& top : y.levels[y.d])
        y.top_weight.push_back(y.up_mass.at(top.key()));
    Subspace span(y.n);
    if (y.levels.size() > 1)
        for (const auto& line : y.levels[1])
            for (const auto& b : line.basis()) span.insert(b);
    y.spanned_dim = span.dim();
}

}  // namespace detail

// Downward closure of weighted top spaces. Every top must have dimension d;
// duplicate tops accumulate weight.
inline GrassmannPoset poset_from_tops(int n, const std::vector<Subspace>& tops,
                                      const std::vector<double>& weights) {
    if (tops.empty()) throw std::invalid_argument("poset needs a top space");
    if (weights.size() != tops.size())
        throw std::invalid_argument("one weight per top space");
    GrassmannPoset y;
    y.n = n;
    y.d = tops[0].dim();
    for (const auto& t : tops) {
        if (t.ambient() != n) throw std::invalid_argument("ambient mismatch");
        if (t.dim() != y.d)
            throw std::invalid_argument("maximal spaces must share dimension");
    }
    for (double w : weights)
        if (!(w > 0)) throw std::invalid_argument("top weights must be positive");
    detail::accumulate_poset(y, tops, weights);
    return y;
}

inline GrassmannPoset poset_from_tops(int n,
                                      const std::vector<Subspace>& tops) {
    return poset_from_tops(n, tops, std::vector<double>(tops.size(), 1.0));
}

// Every subspace of dimension <= d, uniform on the top level.
inline GrassmannPoset complete_grassmann(int n, int d) {
    if (d > n || n > 6 || n < 1 || d < 0)
        throw std::invalid_argument(
            "full materialization supports 0 <= d <= n <= 6");
    auto all = detail::subspaces_below(Subspace::full(n), d);
    return poset_from_tops(n, all[d]);
}

inline bool downward_closed(const GrassmannPoset& y) {
    if (y.base_dim != 0) return false;
    for (int k = 1; k < (int)y.levels.size(); ++k)
        for (const auto& u : y.levels[k]) {
            auto subs = detail::subspaces_below(u, u.dim() - 1);
            for (const auto& level : subs)
                for (const auto& s : level)
                    if (!y.contains(s)) return false;
        }
    return true;
}

// ------------------------------------------------------------------- links

// Vector-vertex link graph at w: vertices are vectors v with span(v) + w in
// the level above w, edges pairs whose joint span with w lands two levels
// up. Each such space spreads its conditional mass uniformly over the
// ordered vector pairs inside it; the pair count is the same for every
// space at a fixed level.
struct LinkGraph {
    Subspace base;
    std::vector<BitVector> vertices;
    WeightedGraph graph;
};

inline LinkGraph link(const GrassmannPoset& y, const Subspace& w) {
    if (!y.contains(w)) throw std::invalid_argument("base space not in poset");
    const int rel = w.dim() - y.base_dim;
    if (rel < 0 || rel + 2 > y.d)
        throw std::invalid_argument("link needs two levels above the base");
    LinkGraph out;
    out.base = w;
    std::unordered_map<std::string, std::size_t> index;
    for (const auto& u : y.level(rel + 1)) {
        if (!u.contains(w)) continue;
        for (const auto& v : u.elements()) {
            if (w.contains(v)) continue;
            index[v.to_string()] = out.vertices.size();
            out.vertices.push_back(v);
            out.graph.add_vertex(v.to_string());
        }
    }
    for (const auto& e : y.level(rel + 2)) {
        if (!e.contains(w)) continue;
        const double mass = y.up(e);
        std::vector<std::size_t> members;
        for (const auto& v : e.elements())
            if (!w.contains(v)) members.push_back(index.at(v.to_string()));
        std::size_t pairs = 0;
        std::vector<std::pair<std::size_t, std::size_t>> edges;
        for (std::size_t a = 0; a < members.size(); ++a) {
            Subspace s = w;
            s.insert(out.vertices[members[a]]);
            for (std::size_t b = a + 1; b < members.size(); ++b) {
                if (s.contains(out.vertices[members[b]])) continue;
                pairs += 2;
                edges.emplace_back(members[a], members[b]);
            }
        }
        const double per_pair = mass / double(pairs);
        for (const auto& [a, b] : edges)
            out.graph.add_edge(a, b, 2.0 * per_pair);
    }
    return out;
}

// Alternate link graph whose vertices are the subspaces one level above w;
// spectrally equal to the vector version.
inline WeightedGraph alt_link_graph(const GrassmannPoset& y,
                                    const Subspace& w) {
    if (!y.contains(w)) throw std::invalid_argument("base space not in poset");
    const int rel = w.dim() - y.base_dim;
    if (rel < 0 || rel + 2 > y.d)
        throw std::invalid_argument("link needs two levels above the base");
    WeightedGraph g;
    std::vector<Subspace> verts;
    for (const auto& u : y.level(rel + 1))
        if (u.contains(w)) {
            verts.push_back(u);
            g.add_vertex(u.key());
        }
    for (const auto& e : y.level(rel + 2)) {
        if (!e.contains(w)) continue;
        std::vector<std::size_t> mids;
        for (std::size_t k = 0; k < verts.size(); ++k)
            if (e.contains(verts[k])) mids.push_back(k);
        const double per_pair =
            y.up(e) / double(mids.size() * (mids.size() - 1) / 2);
        for (std::size_t a = 0; a < mids.size(); ++a)
            for (std::size_t b = a + 1; b < mids.size(); ++b)
                g.add_edge(mids[a], mids[b], per_pair);
    }
    return g;
}

// ---------------------------------------------------------- containment

// Bipartite graph between levels i and j (restricted above w when given);
// each j-space spreads its conditional mass uniformly over the contained
// i-spaces, whose count per j-space depends only on the dimensions.
inline BipartiteGraph containment_graph(const GrassmannPoset& y, int i, int j,
                                        const Subspace* w = nullptr) {
    if (!(0 <= i && i < j && j <= y.d))
        throw std::invalid_argument("containment graph needs levels i < j");
    BipartiteGraph b;
    std::unordered_map<std::string, std::size_t> left;
    std::vector<const Subspace*> lower;
    for (const auto& u : y.level(i)) {
        if (w && !u.contains(*w)) continue;
        left[u.key()] = b.add_left(u.key());
        lower.push_back(&u);
    }
    std::size_t right = 0;
    for (const auto& v : y.level(j)) {
        if (w && !v.contains(*w)) continue;
        const std::size_t rv = b.add_right(v.key());
        ++right;
        for (const Subspace* u : lower)
            if (v.contains(*u)) b.add_edge(left.at(u->key()), rv, y.up(v));
    }
    if (lower.empty() || right == 0)
        throw std::invalid_argument("empty containment level");
    return b;
}

// ---------------------------------------------------------- certification

struct LinkRecord {
    int level = 0;
    std::string base_key;
    double lambda = 0.0;
};

struct ExpansionReport {
    bool any_links = false;
    double worst_lambda = 0.0;
    LinkRecord worst;
    std::vector<LinkRecord> per_link;
};

// Read-mostly cache of materialized links keyed by the canonical basis key.
class LinkCache {
public:
    std::shared_ptr<const LinkGraph> get_or_build(const GrassmannPoset& y,
                                                  const Subspace& w) {
        const std::string key = w.key();
        {
            std::lock_guard<std::mutex> lock(mutex_);
            auto it = map_.find(key);
            if (it != map_.end()) return it->second;
        }
        auto built = std::make_shared<const LinkGraph>(link(y, w));
        std::lock_guard<std::mutex> lock(mutex_);
        return map_.emplace(key, std::move(built)).first->second;
    }

    std::size_t size() {
        std::lock_guard<std::mutex> lock(mutex_);
        return map_.size();
    }

private:
    std::mutex mutex_;
    std::unordered_map<std::string, std::shared_ptr<const LinkGraph>> map_;
};

inline ExpansionReport certify_expansion(const GrassmannPoset& y,
                                         LinkCache* cache = nullptr,
                                         const SolveOptions& opts = {}) {
    ExpansionReport rep;
    for (int i = 0; i + 2 <= y.d; ++i)
        for (const auto& w : y.level(i)) {
            std::shared_ptr<const LinkGraph> lk;
            if (cache) lk = cache->get_or_build(y, w);
            else lk = std::make_shared<const LinkGraph>(link(y, w));
            const double lambda = second_eigenvalue(lk->graph, opts).lambda;
            LinkRecord rec{i + y.base_dim, w.key(), lambda};
            rep.per_link.push_back(rec);
            if (!rep.any_links || lambda > rep.worst_lambda) {
                rep.worst_lambda = lambda;
                rep.worst = rec;
            }
            rep.any_links = true;
        }
    return rep;
}

// ------------------------------------------------------------- quotients

// Coordinates of the canonical coset representative on the non-pivot
// positions of w; linear, with kernel exactly w.
inline BitMatrix quotient_map(const Subspace& w) {
    const int n = w.ambient();
    std::vector<int> pivots;
    for (const auto& b : w.basis())
        for (int j = 0; j < n; ++j)
            if (b.get(j)) { pivots.push_back(j); break; }
    std::vector<bool> is_pivot(n, false);
    for (int p : pivots) is_pivot[p] = true;
    BitMatrix q(n - w.dim(), n);
    int row = 0;
    for (int j = 0; j < n; ++j) {
        if (is_pivot[j]) continue;
        q.set(row, j, true);
        ++row;
    }
    // Reduction sends e_p for a pivot position p to e_p minus that basis
    // row, which keeps only the basis row's non-pivot tail.
    for (std::size_t k = 0; k < w.basis().size(); ++k) {
        const auto& b = w.basis()[k];
        int r = 0;
        for (int j = 0; j < n; ++j) {
            if (is_pivot[j]) continue;
            if (b.get(j)) q.set(r, pivots[k], true);
            ++r;
        }
    }
    return q;
}

// The link poset of w, realized in the quotient space of dimension
// n - dim(w) with the conditional top measure.
inline GrassmannPoset quotient_link_poset(const GrassmannPoset& y,
                                          const Subspace& w) {
    if (!y.contains(w)) throw std::invalid_argument("base space not in poset");
    const BitMatrix q = quotient_map(w);
    std::vector<Subspace> tops;
    std::vector<double> weights;
    const auto& top_level = y.level(y.d);
    for (std::size_t t = 0; t < top_level.size(); ++t) {
        if (!top_level[t].contains(w)) continue;
        Subspace image(y.n - w.dim());
        for (const auto& b : top_level[t].basis()) image.insert(q.apply(b));
        tops.push_back(std::move(image));
        weights.push_back(y.top_weight[t]);
    }
    if (tops.empty()) throw std::invalid_argument("no top space above base");
    return poset_from_tops(y.n - w.dim(), tops, weights);
}

// Superspace filter: the sub-poset of spaces containing w, kept in ambient
// coordinates with the conditional (unnormalized) measure.
inline GrassmannPoset superspace_link(const GrassmannPoset& y,
                                      const Subspace& w) {
    if (!y.contains(w)) throw std::invalid_argument("base space not in poset");
    GrassmannPoset out;
    out.n = y.n;
    out.base_dim = w.dim();
    out.d = y.base_dim + y.d - w.dim();
    out.levels.assign(out.d + 1, {});
    const int shift = w.dim() - y.base_dim;
    for (int k = shift; k < (int)y.levels.size(); ++k)
        for (const auto& u : y.level(k))
            if (u.contains(w)) {
                out.levels[k - shift].push_back(u);
                out.up_mass[u.key()] = y.up(u);
            }
    for (const auto& top : out.levels[out.d])
        out.top_weight.push_back(out.up_mass.at(top.key()));
    out.spanned_dim = y.spanned_dim;
    return out;
}

// ------------------------------------------------------------------ dump

inline nlohmann::ordered_json poset_json(const GrassmannPoset& y) {
    nlohmann::ordered_json j;
    j["n"] = y.n;
    j["d"] = y.d;
    auto levels = nlohmann::ordered_json::array();
    for (const auto& level : y.levels) {
        auto jl = nlohmann::ordered_json::array();
        for (const auto& u : level) {
            auto ju = nlohmann::ordered_json::array();
            for (const auto& b : u.basis()) ju.push_back(b.to_string());
            jl.push_back(ju);
        }
        levels.push_back(jl);
    }
    j["levels"] = levels;
    return j;
}

}  // namespace hdx
