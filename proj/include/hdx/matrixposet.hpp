#pragma once

// Graphs carved out of the rank-domination order on F_2 matrices.
//
// Vertices are matrices of a fixed rank inside a universe (everything, the
// interval below an upper matrix U, or the matrices meeting a fixed D
// trivially). Two matrices of rank 2m are adjacent in the witness graph when
// some rank-m C splits both of them as C (+) (A-C) and C (+) (B-C) with the
// triple sum still inside the universe; the edge weight is the number of
// such witnesses, which is exactly the count behind uniform decomposition
// sampling. Bipartite variants relate ranks i and j either by domination
// (relation graphs) or through a shared rank-k witness (sum graphs).
//
// Also here: an explicit twelve-edge path construction between any two
// vertices of T^U, built from biorthogonal certificates and kernel
// intersections rather than search.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hdx/budget.hpp"
#include "hdx/f2.hpp"
#include "hdx/graph.hpp"

namespace hdx {

// ------------------------------------------------------------- universes

// Rank-r matrices whose row and column spaces meet those of d trivially.
inline std::vector<BitMatrix> enumerate_disjoint(const BitMatrix& d, int n, int r) {
    std::vector<BitMatrix> out;
    for (auto& m : enumerate_rank_r(n, n, r))
        if (is_direct_sum({m, d})) out.push_back(std::move(m));
    return out;
}

// Optional side condition on a graph's universe: below an upper matrix, or
// in direct sum with a disjointness matrix. At most one is set.
struct Bound {
    std::optional<BitMatrix> upper;
    std::optional<BitMatrix> disjoint;

    static Bound none() { return {}; }
    static Bound below(BitMatrix u) {
        Bound b;
        b.upper = std::move(u);
        return b;
    }
    static Bound avoiding(BitMatrix d) {
        Bound b;
        b.disjoint = std::move(d);
        return b;
    }
};

namespace detail {

inline std::vector<BitMatrix> bounded_universe(const Bound& bound, int n, int r) {
    if (bound.upper) {
        if (n && bound.upper->rows() != n)
            throw std::invalid_argument("bounded_universe: upper matrix shape disagrees with n");
        return enumerate_dominated(*bound.upper, r);
    }
    if (bound.disjoint) return enumerate_disjoint(*bound.disjoint, n, r);
    return enumerate_rank_r(n, n, r);
}

// Witness test with c <= a already known (candidates are enumerated below
// a). c witnesses the pair when c <= b, the triple c (+) (a-c) (+) (b-c)
// sums directly, and the triple satisfies the active bound. All conditions
// reduce to rank counts; ab is the precomputed a + b.
inline bool witness_ok(const BitMatrix& c, const BitMatrix& b, const BitMatrix& ab,
                       int rank_a, int rank_b, int rank_c, const BitMatrix* upper,
                       const BitMatrix* disjoint, int rank_bound) {
    if (rank(b + c) != rank_b - rank_c) return false;
    const int rt = rank_a + rank_b - rank_c;
    if (upper) {
        const BitMatrix triple = ab + c;
        if (rank(triple) != rt) return false;
        return rank(*upper + triple) == rank_bound - rt;
    }
    // With part ranks pinned, a direct 4-way sum with the disjoint matrix is
    // exactly rank additivity of the total, and it subsumes the bare triple.
    if (disjoint) return rank(*disjoint + ab + c) == rank_bound + rt;
    return rank(ab + c) == rt;
}

// Witness candidates per left vertex: every rank-w matrix below a.
inline u64 witness_candidate_count(int vertex_rank, int w) {
    if (w < 0 || w > vertex_rank) return 0;
    return gaussian_binomial(vertex_rank, w) << (u64(w) * (vertex_rank - w));
}

} // namespace detail

// ------------------------------------------------------------ built graphs

struct PosetGraph {
    WeightedGraph graph;
    std::vector<BitMatrix> vertices;
    // False when the witness scan was over budget and uniform edge weights
    // were substituted; spectra then describe the unweighted variant.
    bool witness_weighted = true;
};

struct PosetBipartite {
    BipartiteGraph graph;
    std::vector<BitMatrix> left, right;
    bool witness_weighted = true;
};

struct BuildOptions {
    u64 max_witness_work = enumeration_cap();
};

namespace detail {

inline PosetGraph witness_graph(std::vector<BitMatrix> verts, int wit_rank,
                                const BitMatrix* upper, const BitMatrix* disjoint,
                                u64 max_work) {
    PosetGraph out;
    out.vertices = std::move(verts);
    const std::size_t n = out.vertices.size();
    out.graph.resize(n);
    for (std::size_t v = 0; v < n; ++v) out.graph.set_name(v, out.vertices[v].to_hex());
    if (n < 2) return out;
    const int vr = rank(out.vertices[0]);
    const int rank_bound = upper ? rank(*upper) : (disjoint ? rank(*disjoint) : 0);
    const u64 cand = witness_candidate_count(vr, wit_rank);
    out.witness_weighted = n * (n - 1) / 2 <= max_work / std::max<u64>(cand, 1);
    for (std::size_t a = 0; a < n; ++a) {
        const auto cands = enumerate_dominated(out.vertices[a], wit_rank);
        for (std::size_t b = a + 1; b < n; ++b) {
            const BitMatrix ab = out.vertices[a] + out.vertices[b];
            int count = 0;
            for (const auto& c : cands)
                if (witness_ok(c, out.vertices[b], ab, vr, vr, wit_rank, upper, disjoint,
                               rank_bound)) {
                    ++count;
                    if (!out.witness_weighted) break;
                }
            if (count) out.graph.add_edge(a, b, out.witness_weighted ? double(count) : 1.0);
        }
    }
    return out;
}

inline PosetBipartite witness_bipartite(std::vector<BitMatrix> left,
                                        std::vector<BitMatrix> right, int wit_rank,
                                        const BitMatrix* upper, const BitMatrix* disjoint,
                                        u64 max_work) {
    PosetBipartite out;
    out.left = std::move(left);
    out.right = std::move(right);
    for (const auto& m : out.left) out.graph.add_left(m.to_hex());
    for (const auto& m : out.right) out.graph.add_right(m.to_hex());
    if (out.left.empty() || out.right.empty()) return out;
    const int rl = rank(out.left[0]), rr = rank(out.right[0]);
    const int rank_bound = upper ? rank(*upper) : (disjoint ? rank(*disjoint) : 0);
    const u64 cand = witness_candidate_count(rl, wit_rank);
    out.witness_weighted =
        u64(out.left.size()) * out.right.size() <= max_work / std::max<u64>(cand, 1);
    for (std::size_t a = 0; a < out.left.size(); ++a) {
        const auto cands = enumerate_dominated(out.left[a], wit_rank);
        for (std::size_t b = 0; b < out.right.size(); ++b) {
            const BitMatrix ab = out.left[a] + out.right[b];
            int count = 0;
            for (const auto& c : cands)
                if (witness_ok(c, out.right[b], ab, rl, rr, wit_rank, upper, disjoint,
                               rank_bound)) {
                    ++count;
                    if (!out.witness_weighted) break;
                }
            if (count) out.graph.add_edge(a, b, out.witness_weighted ? double(count) : 1.0);
        }
    }
    return out;
}

} // namespace detail

// Witness graph below u: vertices of rank 2m dominated by u (which must have
// rank 4m), edges weighted by the number of rank-m witnesses.
inline PosetGraph build_T(const BitMatrix& u, int m, const BuildOptions& opt = {}) {
    if (m < 1) throw std::invalid_argument("build_T: m must be positive");
    if (rank(u) != 4 * m) throw std::invalid_argument("build_T: rank of the upper matrix must be 4m");
    return detail::witness_graph(enumerate_dominated(u, 2 * m), m, &u, nullptr,
                                 opt.max_witness_work);
}

// Witness graph clear of d: vertices of rank 2m in direct sum with d, edges
// through rank-m witnesses whose triple sum still avoids d.
inline PosetGraph build_H(const BitMatrix& d, int m, int n, const BuildOptions& opt = {}) {
    if (m < 1) throw std::invalid_argument("build_H: m must be positive");
    if (2 * m + rank(d) > n)
        throw std::invalid_argument("build_H: 2m + rank(d) exceeds the ambient dimension");
    if (d.rows() != n || d.cols() != n)
        throw std::invalid_argument("build_H: d must be n x n");
    return detail::witness_graph(enumerate_disjoint(d, n, 2 * m), m, nullptr, &d,
                                 opt.max_witness_work);
}

// Bipartite domination graph: rank-i matrices against rank-j matrices in the
// chosen universe, an edge whenever the left dominates into the right.
inline PosetBipartite build_R(int i, int j, const Bound& bound, int n,
                              const BuildOptions& = {}) {
    if (i < 0 || i >= j) throw std::invalid_argument("build_R: need 0 <= i < j");
    PosetBipartite out;
    out.left = detail::bounded_universe(bound, n, i);
    out.right = detail::bounded_universe(bound, n, j);
    for (const auto& m : out.left) out.graph.add_left(m.to_hex());
    for (const auto& m : out.right) out.graph.add_right(m.to_hex());
    for (std::size_t a = 0; a < out.left.size(); ++a)
        for (std::size_t b = 0; b < out.right.size(); ++b)
            if (dominates(out.left[a], out.right[b])) out.graph.add_edge(a, b, 1.0);
    return out;
}

// Bipartite sum graph: rank-i against rank-j, an edge when a rank-k witness
// splits both sides into a direct triple inside the universe. k = 0
// degenerates to "the two sides sum directly".
inline PosetBipartite build_S(int i, int j, int k, const Bound& bound, int n,
                              const BuildOptions& opt = {}) {
    if (k < 0 || k > i || k > j)
        throw std::invalid_argument("build_S: need 0 <= k <= min(i, j)");
    if (bound.upper && i + j - k > rank(*bound.upper))
        throw std::invalid_argument("build_S: i + j - k exceeds the upper matrix rank");
    if (!bound.upper && i + j - k + (bound.disjoint ? rank(*bound.disjoint) : 0) > n)
        throw std::invalid_argument("build_S: i + j - k exceeds the ambient dimension");
    const BitMatrix* upper = bound.upper ? &*bound.upper : nullptr;
    const BitMatrix* disjoint = bound.disjoint ? &*bound.disjoint : nullptr;
    return detail::witness_bipartite(detail::bounded_universe(bound, n, i),
                                     detail::bounded_universe(bound, n, j), k, upper,
                                     disjoint, opt.max_witness_work);
}

// S with k = 0: edges are exactly the directly-summing pairs.
inline PosetBipartite build_DS(int i, int j, const Bound& bound, int n,
                               const BuildOptions& opt = {}) {
    return build_S(i, j, 0, bound, n, opt);
}

// --------------------------------------------------------- spec addressing

// Parsed form of a graph address like "T:U=I4,m=1" or "DS:l=3,i=1,j=1".
struct PosetGraphSpec {
    std::string kind; // T, H, R, S, DS
    int i = -1, j = -1, k = -1, m = -1, n = -1;
    Bound bound;
};

namespace detail {

inline BitMatrix corner_identity(int r, int n) {
    BitMatrix m(n, n);
    for (int i = 0; i < r; ++i) m.set(i, i, true);
    return m;
}

// "I4" -> I_4; "I1@3" -> rank-1 corner of a 3x3; "0@3" -> 3x3 zero.
inline BitMatrix parse_matrix_token(const std::string& tok) {
    std::string head = tok;
    int ambient = -1;
    if (auto at = tok.find('@'); at != std::string::npos) {
        head = tok.substr(0, at);
        ambient = std::stoi(tok.substr(at + 1));
    }
    if (head == "0") {
        if (ambient < 1) throw std::invalid_argument("matrix token 0 needs @n");
        return BitMatrix(ambient, ambient);
    }
    if (head.size() > 1 && head[0] == 'I') {
        int r = std::stoi(head.substr(1));
        if (ambient < 0) ambient = r;
        if (r > ambient) throw std::invalid_argument("matrix token rank exceeds ambient");
        return corner_identity(r, ambient);
    }
    throw std::invalid_argument("unrecognized matrix token: " + tok);
}

} // namespace detail

inline PosetGraphSpec parse_graph_spec(const std::string& text) {
    auto colon = text.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("graph spec needs KIND:params, got: " + text);
    PosetGraphSpec spec;
    spec.kind = text.substr(0, colon);
    if (spec.kind != "T" && spec.kind != "H" && spec.kind != "R" && spec.kind != "S" &&
        spec.kind != "DS")
        throw std::invalid_argument("unknown graph kind: " + spec.kind);
    std::stringstream ss(text.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("graph spec item needs key=value: " + item);
        std::string key = item.substr(0, eq), val = item.substr(eq + 1);
        if (key == "U")
            spec.bound = Bound::below(detail::parse_matrix_token(val));
        else if (key == "D")
            spec.bound = Bound::avoiding(detail::parse_matrix_token(val));
        else if (key == "l")
            spec.bound = Bound::below(BitMatrix::identity(std::stoi(val)));
        else if (key == "i")
            spec.i = std::stoi(val);
        else if (key == "j")
            spec.j = std::stoi(val);
        else if (key == "k")
            spec.k = std::stoi(val);
        else if (key == "m")
            spec.m = std::stoi(val);
        else if (key == "n")
            spec.n = std::stoi(val);
        else
            throw std::invalid_argument("unknown graph spec key: " + key);
    }
    return spec;
}

// A built graph is either undirected (T, H) or bipartite (R, S, DS).
struct BuiltPosetGraph {
    std::optional<PosetGraph> undirected;
    std::optional<PosetBipartite> bipartite;
};

inline BuiltPosetGraph build_from_spec(const PosetGraphSpec& spec,
                                       const BuildOptions& opt = {}) {
    BuiltPosetGraph out;
    const int n = spec.n > 0 ? spec.n
                  : spec.bound.upper
                      ? spec.bound.upper->rows()
                      : (spec.bound.disjoint ? spec.bound.disjoint->rows() : -1);
    if (spec.kind == "T") {
        if (!spec.bound.upper || spec.m < 1)
            throw std::invalid_argument("T needs U and m");
        out.undirected = build_T(*spec.bound.upper, spec.m, opt);
    } else if (spec.kind == "H") {
        if (!spec.bound.disjoint || spec.m < 1 || n < 1)
            throw std::invalid_argument("H needs D, m and an ambient dimension");
        out.undirected = build_H(*spec.bound.disjoint, spec.m, n, opt);
    } else if (spec.kind == "R") {
        if (spec.i < 0 || spec.j < 0 || n < 1)
            throw std::invalid_argument("R needs i, j and an ambient dimension");
        out.bipartite = build_R(spec.i, spec.j, spec.bound, n, opt);
    } else {
        if (spec.i < 0 || spec.j < 0 || n < 1)
            throw std::invalid_argument("S needs i, j and an ambient dimension");
        const int k = spec.kind == "DS" ? 0 : spec.k;
        if (k < 0) throw std::invalid_argument("S needs k");
        out.bipartite = build_S(spec.i, spec.j, k, spec.bound, n, opt);
    }
    return out;
}

// --------------------------------------------------------------- edges

// Whether {a, b} is an edge of the witness graph below u.
inline bool t_edge(const BitMatrix& a, const BitMatrix& b, const BitMatrix& u, int m) {
    if (a == b) return false;
    const int ra = rank(a), rb = rank(b), ru = rank(u);
    const BitMatrix ab = a + b;
    for (const auto& c : enumerate_dominated(a, m))
        if (detail::witness_ok(c, b, ab, ra, rb, m, &u, nullptr, ru)) return true;
    return false;
}

// ---------------------------------------------------- identity coordinates

// Invertible P, Q with u = P * diag(I_ell, 0) * Q, so the interval below u
// becomes the interval below I_ell: x <= u iff P^{-1} x Q^{-1} is supported
// on the leading ell x ell block and that block is a projection.
class IdentityCoords {
public:
    explicit IdentityCoords(const BitMatrix& u)
        : rows_(u.rows()), cols_(u.cols()), ell_(rank(u)) {
        BitMatrix p(rows_, rows_);
        {
            const BitMatrix f = rank_factor_left(u); // rows x ell, independent columns
            Subspace grown(rows_);
            for (int j = 0; j < ell_; ++j) {
                for (int i = 0; i < rows_; ++i) p.set(i, j, f.get(i, j));
                grown.insert(f.column(j));
            }
            int col = ell_;
            for (int j = 0; j < rows_ && col < rows_; ++j) {
                BitVector e = BitVector::unit(rows_, j);
                if (grown.insert(e)) {
                    for (int i = 0; i < rows_; ++i) p.set(i, col, e.get(i));
                    ++col;
                }
            }
        }
        BitMatrix q(cols_, cols_);
        {
            const BitMatrix g = rank_factor_right(u); // cols x ell, independent columns
            Subspace grown(cols_);
            for (int i = 0; i < ell_; ++i) {
                q.set_row(i, g.column(i));
                grown.insert(g.column(i));
            }
            int row = ell_;
            for (int j = 0; j < cols_ && row < cols_; ++j) {
                BitVector e = BitVector::unit(cols_, j);
                if (grown.insert(e)) {
                    q.set_row(row, e);
                    ++row;
                }
            }
        }
        p_ = p;
        q_ = q;
        pinv_ = *inverse(p);
        qinv_ = *inverse(q);
    }

    int ell() const { return ell_; }

    // Leading block of P^{-1} x Q^{-1}; nullopt when x leaks outside the
    // interval's support (x was not below u).
    std::optional<BitMatrix> compress(const BitMatrix& x) const {
        const BitMatrix y = pinv_ * x * qinv_;
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j)
                if ((i >= ell_ || j >= ell_) && y.get(i, j)) return std::nullopt;
        BitMatrix s(ell_, ell_);
        for (int i = 0; i < ell_; ++i)
            for (int j = 0; j < ell_; ++j) s.set(i, j, y.get(i, j));
        return s;
    }

    BitMatrix expand(const BitMatrix& s) const {
        BitMatrix pad(rows_, cols_);
        for (int i = 0; i < ell_; ++i)
            for (int j = 0; j < ell_; ++j) pad.set(i, j, s.get(i, j));
        return p_ * pad * q_;
    }

private:
    int rows_, cols_, ell_;
    BitMatrix p_, q_, pinv_, qinv_;
};

// ------------------------------------------------------------ short paths

// Raised when an intermediate of the path construction fails to
// materialize; stage names the missing piece. Always a bug, never an
// expected outcome.
struct path_construction_error : std::runtime_error {
    std::string stage;
    path_construction_error(std::string st, const std::string& what)
        : std::runtime_error(st + ": " + what), stage(std::move(st)) {}
};

namespace detail {

using VecPairs = std::vector<std::pair<BitVector, BitVector>>;

inline BitMatrix pairs_to_matrix(const VecPairs& pairs, int n) {
    BitMatrix m(n, n);
    for (const auto& [e, f] : pairs) m ^= BitMatrix::outer(e, f);
    return m;
}

// Sum of unit_i (x) f_i where every f_i kills all the given vectors and is
// biorthogonal to the units. Solvable whenever span(units) meets
// span(kill) trivially.
inline BitMatrix biorthogonal_solve(const std::vector<BitVector>& kill,
                                    const std::vector<BitVector>& units, int n,
                                    const char* stage) {
    BitMatrix system(int(kill.size() + units.size()), n);
    for (std::size_t r = 0; r < kill.size(); ++r) system.set_row(int(r), kill[r]);
    for (std::size_t r = 0; r < units.size(); ++r)
        system.set_row(int(kill.size() + r), units[r]);
    BitMatrix out(n, n);
    for (std::size_t j = 0; j < units.size(); ++j) {
        BitVector rhs(int(kill.size() + units.size()));
        rhs.set(int(kill.size() + j), true);
        auto f = solve_linear(system, rhs);
        if (!f) throw path_construction_error(stage, "biorthogonal system inconsistent");
        out ^= BitMatrix::outer(units[j], *f);
    }
    return out;
}

// Common kernel of the second components of two certificate halves.
inline Subspace common_row_kernel(const VecPairs& a, const VecPairs& b, int n) {
    BitMatrix rows(int(a.size() + b.size()), n);
    for (std::size_t r = 0; r < a.size(); ++r) rows.set_row(int(r), a[r].second);
    for (std::size_t r = 0; r < b.size(); ++r) rows.set_row(int(a.size() + r), b[r].second);
    return kernel(rows);
}

// Rank-m T whose columns avoid both column spaces and whose rows kill both
// row spaces, so that a (+) T and b (+) T stay below the identity.
inline BitMatrix find_mediator(const VecPairs& a, const VecPairs& b, int n) {
    const int m = int(a.size());
    const Subspace w = common_row_kernel(a, b, n);
    Subspace grown(n);
    for (const auto& [e, f] : a) grown.insert(e);
    for (const auto& [e, f] : b) grown.insert(e);
    std::vector<BitVector> kill;
    for (const auto& v : grown.basis()) kill.push_back(v);
    std::vector<BitVector> units;
    for (const auto& v : w.elements()) {
        if (v.is_zero()) continue;
        if (int(units.size()) == m) break;
        if (grown.insert(v)) units.push_back(v);
    }
    if (int(units.size()) < m)
        throw path_construction_error("mediator", "kernel avoidance exhausted");
    return biorthogonal_solve(kill, units, n, "mediator");
}

// Three middles M1, M2, M3 of rank m inside the interval below z (rank 3m)
// with a (+) M1, M1 (+) M2, M2 (+) M3, M3 (+) b all below z.
inline std::array<BitMatrix, 3> bridge(const BitMatrix& z, const BitMatrix& a,
                                       const BitMatrix& b, int m, const char* stage) {
    IdentityCoords coords(z);
    const int n = coords.ell(); // 3m
    auto ca = coords.compress(a), cb = coords.compress(b);
    if (!ca || !cb) throw path_construction_error(stage, "endpoint escapes the interval");
    auto certa = under_identity_certificate(*ca);
    auto certb = under_identity_certificate(*cb);
    if (!certa || !certb)
        throw path_construction_error(stage, "endpoint is not below the interval");

    const Subspace w1 = common_row_kernel(certa->pairs, certb->pairs, n);
    if (w1.dim() < m) throw path_construction_error(stage, "first kernel too small");
    std::vector<BitVector> u1(w1.basis().begin(), w1.basis().begin() + m);

    std::vector<BitVector> kill_a, kill_b;
    for (const auto& [e, f] : certa->pairs) kill_a.push_back(e);
    for (const auto& [e, f] : certb->pairs) kill_b.push_back(e);
    const BitMatrix m1 = biorthogonal_solve(kill_a, u1, n, stage);
    const BitMatrix m3 = biorthogonal_solve(kill_b, u1, n, stage);

    // Vectors killing every row of m1 and m3 at once.
    const Subspace w2 = [&] {
        Subspace rs = row_space(m1) + row_space(m3);
        BitMatrix stacked(int(rs.basis().size()), n);
        for (std::size_t r = 0; r < rs.basis().size(); ++r)
            stacked.set_row(int(r), rs.basis()[r]);
        return kernel(stacked);
    }();
    if (w2.dim() < m) throw path_construction_error(stage, "second kernel too small");
    std::vector<BitVector> u2;
    for (const auto& v : w2.basis()) {
        if (int(u2.size()) == m) break;
        u2.push_back(v);
    }
    const BitMatrix m2 = biorthogonal_solve(u1, u2, n, stage);

    const std::array<BitMatrix, 3> mids_c{m1, m2, m3};
    // Validate the four interval conditions before expanding.
    const std::array<std::pair<const BitMatrix*, const BitMatrix*>, 4> legs{
        std::pair{&*ca, &m1}, std::pair{&m1, &m2}, std::pair{&m2, &m3},
        std::pair{&m3, &*cb}};
    for (const auto& [x, y] : legs) {
        if (!is_direct_sum({*x, *y}) || !(((*x + *y) * (*x + *y)) == (*x + *y)))
            throw path_construction_error(stage, "a leg leaves the interval");
    }
    return {coords.expand(mids_c[0]), coords.expand(mids_c[1]), coords.expand(mids_c[2])};
}

} // namespace detail

// Path from c to d inside the witness graph below u: at most 13 vertices
// (12 edges), every consecutive pair validated as an edge. The route pins
// the first half of c, crosses to a mediator, swaps the pinned half, and
// descends into d, each crossing using three solved middles.
inline std::vector<BitMatrix> short_path_T(const BitMatrix& c0, const BitMatrix& d0,
                                           const BitMatrix& u) {
    const int rc = rank(c0);
    if (rc % 2 || rc == 0)
        throw std::invalid_argument("short_path_T: endpoint rank must be even and positive");
    const int m = rc / 2;
    if (rank(d0) != rc) throw std::invalid_argument("short_path_T: endpoint ranks differ");
    if (rank(u) != 4 * m) throw std::invalid_argument("short_path_T: rank(u) must be 4m");
    if (!dominates(c0, u) || !dominates(d0, u))
        throw std::invalid_argument("short_path_T: endpoints must sit below u");
    if (c0 == d0) return {c0};
    if (t_edge(c0, d0, u, m)) return {c0, d0};

    IdentityCoords coords(u);
    const int ell = coords.ell(); // 4m
    const BitMatrix c = *coords.compress(c0), d = *coords.compress(d0);
    const auto certc = under_identity_certificate(c);
    const auto certd = under_identity_certificate(d);
    if (!certc || !certd)
        throw path_construction_error("input", "endpoint certificate missing");

    const detail::VecPairs c1p(certc->pairs.begin(), certc->pairs.begin() + m);
    const detail::VecPairs d1p(certd->pairs.begin(), certd->pairs.begin() + m);
    const BitMatrix c1 = detail::pairs_to_matrix(c1p, ell);
    const BitMatrix c2 = c + c1;
    const BitMatrix d1 = detail::pairs_to_matrix(d1p, ell);
    const BitMatrix d2 = d + d1;
    const BitMatrix eye = BitMatrix::identity(ell);

    const BitMatrix t = detail::find_mediator(c1p, d1p, ell);
    const BitMatrix ct = c1 + t, dt = d1 + t;
    if (!is_direct_sum({c1, t}) || !(ct * ct == ct) || !is_direct_sum({d1, t}) ||
        !(dt * dt == dt))
        throw path_construction_error("mediator", "mediator collides with a pinned half");

    const auto seg1 = detail::bridge(eye + c1, c2, t, m, "first crossing");
    const auto seg2 = detail::bridge(eye + t, c1, d1, m, "middle crossing");
    const auto seg3 = detail::bridge(eye + d1, t, d2, m, "final crossing");

    std::vector<BitMatrix> path;
    path.push_back(c);
    for (const auto& mid : seg1) path.push_back(c1 + mid);
    path.push_back(c1 + t);
    for (const auto& mid : seg2) path.push_back(t + mid);
    path.push_back(t + d1);
    for (const auto& mid : seg3) path.push_back(d1 + mid);
    path.push_back(d);

    std::vector<BitMatrix> out;
    out.reserve(path.size());
    for (const auto& v : path) out.push_back(coords.expand(v));
    for (std::size_t i = 0; i + 1 < out.size(); ++i)
        if (!t_edge(out[i], out[i + 1], u, m))
            throw path_construction_error("validation",
                                          "constructed pair is not an edge at step " +
                                              std::to_string(i));
    return out;
}

// ---------------------------------------------------- interval isomorphism

// Verifies that subtracting m1 maps the interval {a : m1 <= a <= m2} onto
// the full interval below m2 - m1, shifting every rank down by rank(m1) and
// preserving order in both directions.
inline bool interval_isomorphism_check(const BitMatrix& m1, const BitMatrix& m2,
                                       const std::vector<BitMatrix>& universe) {
    if (!dominates(m1, m2)) return false;
    const int r1 = rank(m1);
    const BitMatrix diff = m2 - m1;
    std::vector<BitMatrix> interval;
    for (const auto& a : universe)
        if (dominates(m1, a) && dominates(a, m2)) interval.push_back(a);

    std::set<BitMatrix> image;
    for (const auto& a : interval) {
        const BitMatrix shifted = a - m1;
        if (rank(shifted) != rank(a) - r1) return false;
        if (!dominates(shifted, diff)) return false;
        if (!image.insert(shifted).second) return false; // not injective
    }
    std::set<BitMatrix> expected;
    for (int r = 0; r <= rank(diff); ++r)
        for (const auto& x : enumerate_dominated(diff, r)) expected.insert(x);
    if (image != expected) return false;

    for (const auto& a : interval)
        for (const auto& b : interval)
            if (dominates(a, b) != dominates(a - m1, b - m1)) return false;
    return true;
}

} // namespace hdx
