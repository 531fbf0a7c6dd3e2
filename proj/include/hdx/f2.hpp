#pragma once

// Bit-packed linear algebra over F_2: vectors, matrices, subspaces in
// reduced row echelon form, the rank-based domination order and direct
// sums, projection certificates, and brute-force meets.

#include <algorithm>
#include <array>
#include <bit>
#include <cassert>
#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hdx/budget.hpp"

namespace hdx {

using u64 = std::uint64_t;

inline int popcount64(u64 x) { return std::popcount(x); }

// ---------------------------------------------------------------- BitVector

// Coordinate j lives at bit j of word j/64; column 0 is least significant.
class BitVector {
  public:
    BitVector() = default;
    explicit BitVector(int n) : n_(n), w_((n + 63) / 64, 0) {}
    static BitVector from_mask(int n, u64 mask) {
        BitVector v(n);
        if (!v.w_.empty()) v.w_[0] = mask;
        return v;
    }
    static BitVector unit(int n, int j) {
        BitVector v(n);
        v.set(j, true);
        return v;
    }

    int size() const { return n_; }
    bool get(int j) const { return (w_[j >> 6] >> (j & 63)) & 1; }
    void set(int j, bool b) {
        u64 m = u64{1} << (j & 63);
        if (b) w_[j >> 6] |= m; else w_[j >> 6] &= ~m;
    }
    void flip(int j) { w_[j >> 6] ^= u64{1} << (j & 63); }

    int weight() const {
        int s = 0;
        for (u64 w : w_) s += popcount64(w);
        return s;
    }
    bool is_zero() const {
        for (u64 w : w_) if (w) return false;
        return true;
    }
    u64 low_word() const { return w_.empty() ? 0 : w_[0]; }

    BitVector& operator^=(const BitVector& o) {
        for (size_t i = 0; i < w_.size(); ++i) w_[i] ^= o.w_[i];
        return *this;
    }
    friend BitVector operator^(BitVector a, const BitVector& b) { return a ^= b; }

    BitVector& operator&=(const BitVector& o) {
        for (size_t i = 0; i < w_.size(); ++i) w_[i] &= o.w_[i];
        return *this;
    }
    friend BitVector operator&(BitVector a, const BitVector& b) { return a &= b; }

    // Standard bilinear form sum_j x_j y_j over F_2.
    friend bool dot(const BitVector& a, const BitVector& b) {
        u64 acc = 0;
        for (size_t i = 0; i < a.w_.size(); ++i) acc ^= a.w_[i] & b.w_[i];
        return popcount64(acc) & 1;
    }

    friend bool operator==(const BitVector& a, const BitVector& b) = default;
    friend std::strong_ordering operator<=>(const BitVector& a, const BitVector& b) {
        if (auto c = a.n_ <=> b.n_; c != 0) return c;
        for (size_t i = a.w_.size(); i-- > 0;)
            if (auto c = a.w_[i] <=> b.w_[i]; c != 0) return c;
        return std::strong_ordering::equal;
    }

    std::string to_string() const {
        std::string s(n_, '0');
        for (int j = 0; j < n_; ++j) if (get(j)) s[j] = '1';
        return s;
    }
    size_t hash() const {
        size_t h = std::hash<int>{}(n_);
        for (u64 w : w_) h = h * 1099511628211ULL + std::hash<u64>{}(w);
        return h;
    }
    const std::vector<u64>& words() const { return w_; }
    u64* word_data() { return w_.data(); }

  private:
    int n_ = 0;
    std::vector<u64> w_;
};

struct BitVectorHash {
    size_t operator()(const BitVector& v) const { return v.hash(); }
};

// ---------------------------------------------------------------- BitMatrix

// Row-major, one or more words per row.
class BitMatrix {
  public:
    BitMatrix() = default;
    BitMatrix(int rows, int cols)
        : r_(rows), c_(cols), wpr_((cols + 63) / 64), w_(size_t(rows) * wpr_, 0) {}

    static BitMatrix identity(int n) {
        BitMatrix m(n, n);
        for (int i = 0; i < n; ++i) m.set(i, i, true);
        return m;
    }
    static BitMatrix zero(int rows, int cols) { return BitMatrix(rows, cols); }
    // Rank-one product u v^T (u indexes rows, v columns).
    static BitMatrix outer(const BitVector& u, const BitVector& v) {
        BitMatrix m(u.size(), v.size());
        for (int i = 0; i < u.size(); ++i)
            if (u.get(i)) m.set_row(i, v);
        return m;
    }
    // Square matrix at n <= 8 from a packed 64-bit value, row i in byte i.
    static BitMatrix from_packed(int n, u64 packed) {
        assert(n <= 8);
        BitMatrix m(n, n);
        for (int i = 0; i < n; ++i)
            m.w_[size_t(i) * m.wpr_] = (packed >> (8 * i)) & ((u64{1} << n) - 1);
        return m;
    }
    u64 to_packed() const {
        assert(r_ <= 8 && c_ <= 8);
        u64 p = 0;
        for (int i = 0; i < r_; ++i) p |= w_[size_t(i) * wpr_] << (8 * i);
        return p;
    }

    int rows() const { return r_; }
    int cols() const { return c_; }
    bool get(int i, int j) const { return (w_[size_t(i) * wpr_ + (j >> 6)] >> (j & 63)) & 1; }
    void set(int i, int j, bool b) {
        u64 m = u64{1} << (j & 63);
        u64& word = w_[size_t(i) * wpr_ + (j >> 6)];
        if (b) word |= m; else word &= ~m;
    }
    BitVector row(int i) const {
        BitVector v(c_);
        u64* out = v.word_data();
        for (int k = 0; k < wpr_; ++k) out[k] = w_[size_t(i) * wpr_ + k];
        return v;
    }
    void set_row(int i, const BitVector& v) {
        for (int k = 0; k < wpr_; ++k) w_[size_t(i) * wpr_ + k] = v.words()[k];
    }
    void xor_row(int i, const BitVector& v) {
        for (int k = 0; k < wpr_; ++k) w_[size_t(i) * wpr_ + k] ^= v.words()[k];
    }
    BitVector column(int j) const {
        BitVector v(r_);
        for (int i = 0; i < r_; ++i) if (get(i, j)) v.set(i, true);
        return v;
    }
    bool is_zero() const {
        for (u64 w : w_) if (w) return false;
        return true;
    }

    BitMatrix& operator^=(const BitMatrix& o) {
        for (size_t i = 0; i < w_.size(); ++i) w_[i] ^= o.w_[i];
        return *this;
    }
    friend BitMatrix operator^(BitMatrix a, const BitMatrix& b) { return a ^= b; }
    // Over F_2 addition and subtraction coincide; keep + for readability.
    friend BitMatrix operator+(const BitMatrix& a, const BitMatrix& b) { return a ^ b; }
    friend BitMatrix operator-(const BitMatrix& a, const BitMatrix& b) { return a ^ b; }

    friend BitMatrix operator*(const BitMatrix& a, const BitMatrix& b) {
        assert(a.c_ == b.r_);
        BitMatrix out(a.r_, b.c_);
        for (int i = 0; i < a.r_; ++i) {
            BitVector acc(b.c_);
            for (int k = 0; k < a.c_; ++k)
                if (a.get(i, k)) acc ^= b.row(k);
            out.set_row(i, acc);
        }
        return out;
    }
    BitVector apply(const BitVector& x) const { // M x
        BitVector out(r_);
        for (int i = 0; i < r_; ++i) if (dot(row(i), x)) out.set(i, true);
        return out;
    }
    BitMatrix transposed() const {
        BitMatrix t(c_, r_);
        for (int i = 0; i < r_; ++i)
            for (int k = 0; k < wpr_; ++k) {
                u64 w = w_[size_t(i) * wpr_ + k];
                while (w) {
                    int j = std::countr_zero(w);
                    t.set(64 * k + j, i, true);
                    w &= w - 1;
                }
            }
        return t;
    }

    friend bool operator==(const BitMatrix& a, const BitMatrix& b) = default;
    friend std::strong_ordering operator<=>(const BitMatrix& a, const BitMatrix& b) {
        if (auto c = a.r_ <=> b.r_; c != 0) return c;
        if (auto c = a.c_ <=> b.c_; c != 0) return c;
        for (size_t i = 0; i < a.w_.size(); ++i)
            if (auto c = a.w_[i] <=> b.w_[i]; c != 0) return c;
        return std::strong_ordering::equal;
    }

    size_t hash() const {
        size_t h = std::hash<int>{}(r_ * 131 + c_);
        for (u64 w : w_) h = h * 1099511628211ULL + std::hash<u64>{}(w);
        return h;
    }

    // Text format: dimension line, then one '0'/'1' string per row.
    std::string to_text() const {
        std::ostringstream os;
        os << r_;
        if (c_ != r_) os << ' ' << c_;
        os << '\n';
        for (int i = 0; i < r_; ++i) os << row(i).to_string() << '\n';
        return os.str();
    }
    static BitMatrix from_text(std::istream& is) {
        std::string header;
        if (!std::getline(is, header)) throw std::runtime_error("matrix text: missing header");
        std::istringstream hs(header);
        int rows = 0, cols = 0;
        hs >> rows;
        if (!(hs >> cols)) cols = rows;
        if (rows <= 0 || cols <= 0) throw std::runtime_error("matrix text: bad dimensions");
        BitMatrix m(rows, cols);
        for (int i = 0; i < rows; ++i) {
            std::string line;
            if (!std::getline(is, line)) throw std::runtime_error("matrix text: missing row");
            if ((int)line.size() < cols) throw std::runtime_error("matrix text: short row");
            for (int j = 0; j < cols; ++j) m.set(i, j, line[j] == '1');
        }
        return m;
    }
    // Row-per-line hex dump, low nibble first.
    std::string to_hex() const {
        static const char* digits = "0123456789abcdef";
        std::string s;
        for (int i = 0; i < r_; ++i) {
            for (int j = 0; j < c_; j += 4) {
                int nib = 0;
                for (int b = 0; b < 4 && j + b < c_; ++b) nib |= get(i, j + b) << b;
                s += digits[nib];
            }
            s += '\n';
        }
        return s;
    }

    const std::vector<u64>& words() const { return w_; }
    int words_per_row() const { return wpr_; }

  private:
    int r_ = 0, c_ = 0, wpr_ = 0;
    std::vector<u64> w_;
};

struct BitMatrixHash {
    size_t operator()(const BitMatrix& m) const { return m.hash(); }
};

// ------------------------------------------------------------------- rank

// Word-parallel Gaussian elimination; destroys its scratch copy.
inline int rank(BitMatrix m) {
    int r = 0;
    const int rows = m.rows(), cols = m.cols();
    for (int c = 0; c < cols && r < rows; ++c) {
        int pivot = -1;
        for (int i = r; i < rows; ++i)
            if (m.get(i, c)) { pivot = i; break; }
        if (pivot < 0) continue;
        if (pivot != r) {
            BitVector tmp = m.row(pivot);
            m.set_row(pivot, m.row(r));
            m.set_row(r, tmp);
        }
        BitVector pr = m.row(r);
        for (int i = r + 1; i < rows; ++i)
            if (m.get(i, c)) m.xor_row(i, pr);
        ++r;
    }
    return r;
}

// Rank of a packed square matrix, n <= 8. Hot path for small posets.
inline int rank_packed(u64 m, int n) {
    int r = 0;
    std::array<u64, 8> rows;
    for (int i = 0; i < n; ++i) rows[i] = (m >> (8 * i)) & 0xffu;
    for (int c = 0; c < n; ++c) {
        int pivot = -1;
        for (int i = r; i < n; ++i)
            if ((rows[i] >> c) & 1) { pivot = i; break; }
        if (pivot < 0) continue;
        std::swap(rows[pivot], rows[r]);
        for (int i = r + 1; i < n; ++i)
            if ((rows[i] >> c) & 1) rows[i] ^= rows[r];
        ++r;
    }
    return r;
}

// --------------------------------------------------------------- Subspace

// Canonical basis: reduced row echelon form, pivots ascending.
class Subspace {
  public:
    Subspace() = default;
    explicit Subspace(int ambient) : n_(ambient) {}
    static Subspace span(int ambient, const std::vector<BitVector>& gens) {
        Subspace s(ambient);
        for (const auto& g : gens) s.insert(g);
        return s;
    }
    static Subspace full(int ambient) {
        Subspace s(ambient);
        for (int i = 0; i < ambient; ++i) s.insert(BitVector::unit(ambient, i));
        return s;
    }

    int ambient() const { return n_; }
    int dim() const { return (int)basis_.size(); }
    const std::vector<BitVector>& basis() const { return basis_; }

    // Insert a generator, keeping RREF; returns true if dim grew.
    bool insert(BitVector v) {
        for (size_t i = 0; i < basis_.size(); ++i)
            if (v.get(pivots_[i])) v ^= basis_[i];
        int p = -1;
        for (int j = 0; j < n_; ++j)
            if (v.get(j)) { p = j; break; }
        if (p < 0) return false;
        // Clear column p above.
        for (size_t i = 0; i < basis_.size(); ++i)
            if (basis_[i].get(p)) basis_[i] ^= v;
        size_t pos = 0;
        while (pos < pivots_.size() && pivots_[pos] < p) ++pos;
        basis_.insert(basis_.begin() + pos, v);
        pivots_.insert(pivots_.begin() + pos, p);
        return true;
    }

    bool contains(BitVector v) const {
        for (size_t i = 0; i < basis_.size(); ++i)
            if (v.get(pivots_[i])) v ^= basis_[i];
        return v.is_zero();
    }
    bool contains(const Subspace& other) const {
        for (const auto& b : other.basis_)
            if (!contains(b)) return false;
        return true;
    }

    friend Subspace operator+(const Subspace& a, const Subspace& b) {
        Subspace s = a;
        for (const auto& v : b.basis_) s.insert(v);
        return s;
    }
    friend Subspace intersect(const Subspace& a, const Subspace& b) {
        // Zassenhaus: eliminate [v | v] for v in a, [w | 0] for w in b;
        // rows with zero left half carry an intersection basis on the right.
        int n = a.n_;
        std::vector<std::pair<BitVector, BitVector>> rows;
        for (const auto& v : a.basis_) rows.push_back({v, v});
        for (const auto& w : b.basis_) rows.push_back({w, BitVector(n)});
        Subspace out(n);
        size_t r = 0;
        for (int c = 0; c < n && r < rows.size(); ++c) {
            size_t pivot = r;
            while (pivot < rows.size() && !rows[pivot].first.get(c)) ++pivot;
            if (pivot == rows.size()) continue;
            std::swap(rows[pivot], rows[r]);
            for (size_t i = 0; i < rows.size(); ++i)
                if (i != r && rows[i].first.get(c)) {
                    rows[i].first ^= rows[r].first;
                    rows[i].second ^= rows[r].second;
                }
            ++r;
        }
        for (size_t i = r; i < rows.size(); ++i)
            if (!rows[i].second.is_zero()) out.insert(rows[i].second);
        return out;
    }

    // All 2^dim elements, zero first. Guarded by budget.
    std::vector<BitVector> elements() const {
        check_budget(u64{1} << dim(), "Subspace::elements");
        std::vector<BitVector> out;
        out.reserve(size_t{1} << dim());
        out.push_back(BitVector(n_));
        for (const auto& b : basis_) {
            size_t sz = out.size();
            for (size_t i = 0; i < sz; ++i) out.push_back(out[i] ^ b);
        }
        return out;
    }

    friend bool operator==(const Subspace& a, const Subspace& b) = default;
    friend std::strong_ordering operator<=>(const Subspace& a, const Subspace& b) {
        if (auto c = a.n_ <=> b.n_; c != 0) return c;
        if (auto c = a.basis_.size() <=> b.basis_.size(); c != 0) return c;
        for (size_t i = 0; i < a.basis_.size(); ++i)
            if (auto c = a.basis_[i] <=> b.basis_[i]; c != 0) return c;
        return std::strong_ordering::equal;
    }
    size_t hash() const {
        size_t h = std::hash<int>{}(n_);
        for (const auto& b : basis_) h = h * 1000003 + b.hash();
        return h;
    }
    // Stable text key (basis rows joined), used for caching links.
    std::string key() const {
        std::string s;
        for (const auto& b : basis_) { s += b.to_string(); s += ';'; }
        return s;
    }

  private:
    int n_ = 0;
    std::vector<BitVector> basis_;
    std::vector<int> pivots_;
};

struct SubspaceHash {
    size_t operator()(const Subspace& s) const { return s.hash(); }
};

inline Subspace row_space(const BitMatrix& m) {
    Subspace s(m.cols());
    for (int i = 0; i < m.rows(); ++i) s.insert(m.row(i));
    return s;
}
inline Subspace column_space(const BitMatrix& m) {
    Subspace s(m.rows());
    for (int j = 0; j < m.cols(); ++j) s.insert(m.column(j));
    return s;
}
inline Subspace kernel(const BitMatrix& m) {
    // Solve M x = 0 from the RREF of M.
    int rows = m.rows(), cols = m.cols();
    BitMatrix a = m;
    std::vector<int> pivot_col;
    int r = 0;
    for (int c = 0; c < cols && r < rows; ++c) {
        int pivot = -1;
        for (int i = r; i < rows; ++i)
            if (a.get(i, c)) { pivot = i; break; }
        if (pivot < 0) continue;
        if (pivot != r) {
            BitVector tmp = a.row(pivot);
            a.set_row(pivot, a.row(r));
            a.set_row(r, tmp);
        }
        BitVector pr = a.row(r);
        for (int i = 0; i < rows; ++i)
            if (i != r && a.get(i, c)) a.xor_row(i, pr);
        pivot_col.push_back(c);
        ++r;
    }
    Subspace ker(cols);
    std::vector<bool> is_pivot(cols, false);
    for (int c : pivot_col) is_pivot[c] = true;
    for (int c = 0; c < cols; ++c) {
        if (is_pivot[c]) continue;
        BitVector v(cols);
        v.set(c, true);
        for (int i = 0; i < (int)pivot_col.size(); ++i)
            if (a.get(i, c)) v.set(pivot_col[i], true);
        ker.insert(v);
    }
    return ker;
}

// Invert a square matrix; nullopt when singular.
inline std::optional<BitMatrix> inverse(const BitMatrix& m) {
    assert(m.rows() == m.cols());
    int n = m.rows();
    BitMatrix a = m, inv = BitMatrix::identity(n);
    for (int c = 0; c < n; ++c) {
        int pivot = -1;
        for (int i = c; i < n; ++i)
            if (a.get(i, c)) { pivot = i; break; }
        if (pivot < 0) return std::nullopt;
        if (pivot != c) {
            BitVector t1 = a.row(pivot), t2 = inv.row(pivot);
            a.set_row(pivot, a.row(c));    inv.set_row(pivot, inv.row(c));
            a.set_row(c, t1);              inv.set_row(c, t2);
        }
        BitVector ar = a.row(c), ir = inv.row(c);
        for (int i = 0; i < n; ++i)
            if (i != c && a.get(i, c)) { a.xor_row(i, ar); inv.xor_row(i, ir); }
    }
    return inv;
}

// One solution of a x = b if the system is consistent; free coordinates are
// left at zero. Rows of a may be dependent.
inline std::optional<BitVector> solve_linear(const BitMatrix& a, const BitVector& b) {
    assert(a.rows() == b.size());
    int rows = a.rows(), cols = a.cols();
    BitMatrix m = a;
    BitVector rhs = b;
    std::vector<int> pivot_col;
    int r = 0;
    for (int c = 0; c < cols && r < rows; ++c) {
        int pivot = -1;
        for (int i = r; i < rows; ++i)
            if (m.get(i, c)) { pivot = i; break; }
        if (pivot < 0) continue;
        if (pivot != r) {
            BitVector tmp = m.row(pivot);
            m.set_row(pivot, m.row(r));
            m.set_row(r, tmp);
            bool t = rhs.get(pivot);
            rhs.set(pivot, rhs.get(r));
            rhs.set(r, t);
        }
        BitVector pr = m.row(r);
        bool pb = rhs.get(r);
        for (int i = 0; i < rows; ++i)
            if (i != r && m.get(i, c)) {
                m.xor_row(i, pr);
                rhs.set(i, rhs.get(i) ^ pb);
            }
        pivot_col.push_back(c);
        ++r;
    }
    for (int i = r; i < rows; ++i)
        if (rhs.get(i)) return std::nullopt;
    BitVector x(cols);
    for (int i = 0; i < r; ++i) x.set(pivot_col[i], rhs.get(i));
    return x;
}

// --------------------------------------------------- domination & direct sum

// A <= M in the rank order: rank(M) = rank(A) + rank(M - A).
inline bool dominates(const BitMatrix& inner, const BitMatrix& outer) {
    return rank(outer) == rank(inner) + rank(outer - inner);
}

inline bool is_direct_sum(const std::vector<BitMatrix>& parts) {
    if (parts.empty()) return true;
    BitMatrix total = parts[0];
    int rank_sum = rank(parts[0]);
    for (size_t i = 1; i < parts.size(); ++i) {
        total ^= parts[i];
        rank_sum += rank(parts[i]);
    }
    return rank(total) == rank_sum;
}

// Greedy rank-one peeling A = sum_i x_i y_i^T; the x_i are independent and
// so are the y_i.
inline std::vector<std::pair<BitVector, BitVector>> rank_one_decomposition(BitMatrix a) {
    std::vector<std::pair<BitVector, BitVector>> out;
    while (!a.is_zero()) {
        int pr = -1, pc = -1;
        for (int i = 0; i < a.rows() && pr < 0; ++i)
            for (int j = 0; j < a.cols(); ++j)
                if (a.get(i, j)) { pr = i; pc = j; break; }
        BitVector x = a.column(pc), y = a.row(pr);
        out.push_back({x, y});
        a ^= BitMatrix::outer(x, y);
    }
    return out;
}

// The four equivalent faces of A (+) B, each computed independently.
struct DirectSumEquivalences {
    bool rank_additive = false;        // rank(A+B) = rank(A) + rank(B)
    bool trivial_intersections = false; // row(A) cap row(B) = col(A) cap col(B) = 0
    bool space_decomposition = false;  // row/col spaces of A+B split as direct sums
    bool joint_rank_one = false;       // merged rank-one decompositions stay independent
    bool all_agree() const {
        return rank_additive == trivial_intersections &&
               rank_additive == space_decomposition &&
               rank_additive == joint_rank_one;
    }
    bool holds() const { return rank_additive; }
};

inline DirectSumEquivalences direct_sum_equivalences(const BitMatrix& a, const BitMatrix& b) {
    DirectSumEquivalences eq;
    int ra = rank(a), rb = rank(b);
    eq.rank_additive = rank(a + b) == ra + rb;

    Subspace rowa = row_space(a), rowb = row_space(b);
    Subspace cola = column_space(a), colb = column_space(b);
    eq.trivial_intersections =
        intersect(rowa, rowb).dim() == 0 && intersect(cola, colb).dim() == 0;

    Subspace rowsum = row_space(a + b), colsum = column_space(a + b);
    eq.space_decomposition =
        rowsum == rowa + rowb && rowsum.dim() == rowa.dim() + rowb.dim() &&
        colsum == cola + colb && colsum.dim() == cola.dim() + colb.dim();

    auto da = rank_one_decomposition(a), db = rank_one_decomposition(b);
    Subspace xs(a.rows()), ys(a.cols());
    int inserted = 0;
    for (const auto& [x, y] : da) { inserted += xs.insert(x); inserted += ys.insert(y); }
    for (const auto& [x, y] : db) { inserted += xs.insert(x); inserted += ys.insert(y); }
    eq.joint_rank_one = inserted == 2 * (int)(da.size() + db.size());
    return eq;
}

// --------------------------------------------- projections & the identity

// A is dominated by the identity exactly when it is a projection; the
// certificate lists pairs (e_i, f_i) with A = sum e_i f_i^T and
// <e_i, f_j> = [i = j].
struct UnderIdentityCertificate {
    std::vector<std::pair<BitVector, BitVector>> pairs;
};

inline std::optional<UnderIdentityCertificate> under_identity_certificate(const BitMatrix& a) {
    assert(a.rows() == a.cols());
    int n = a.rows();
    if (!(a * a == a)) return std::nullopt; // not a projection, so not below I
    int r = rank(a);
    // Columns of E: image basis then kernel basis; E is invertible because
    // a projection splits the space as image (+) kernel.
    BitMatrix e(n, n);
    Subspace seen(n);
    int col = 0;
    for (int j = 0; j < n && col < r; ++j) {
        BitVector c = a.column(j);
        if (seen.insert(c)) {
            for (int i = 0; i < n; ++i) e.set(i, col, c.get(i));
            ++col;
        }
    }
    const Subspace ker = kernel(a);
    for (const auto& k : ker.basis()) {
        for (int i = 0; i < n; ++i) e.set(i, col, k.get(i));
        ++col;
    }
    assert(col == n);
    auto einv = inverse(e);
    if (!einv) return std::nullopt;
    UnderIdentityCertificate cert;
    for (int i = 0; i < r; ++i)
        cert.pairs.push_back({e.column(i), einv->row(i)});
    return cert;
}

inline bool certificate_checks(const BitMatrix& a, const UnderIdentityCertificate& cert) {
    BitMatrix sum(a.rows(), a.cols());
    for (const auto& [e, f] : cert.pairs) sum ^= BitMatrix::outer(e, f);
    if (!(sum == a)) return false;
    for (size_t i = 0; i < cert.pairs.size(); ++i)
        for (size_t j = 0; j < cert.pairs.size(); ++j)
            if (dot(cert.pairs[i].first, cert.pairs[j].second) != (i == j)) return false;
    return true;
}

// ----------------------------------------------------------------- meets

// Greatest lower bound with respect to domination, by literal check over a
// finite universe: C <= A, C <= B, and every common lower bound is <= C.
// Meets need not exist; absence is a valid answer.
inline std::optional<BitMatrix> brute_force_meet(const BitMatrix& a, const BitMatrix& b,
                                                 const std::vector<BitMatrix>& universe) {
    std::vector<const BitMatrix*> lower;
    for (const auto& d : universe)
        if (dominates(d, a) && dominates(d, b)) lower.push_back(&d);
    for (const BitMatrix* c : lower) {
        bool greatest = true;
        for (const BitMatrix* d : lower)
            if (!dominates(*d, *c)) { greatest = false; break; }
        if (greatest) return *c;
    }
    return std::nullopt;
}

// ------------------------------------------------------------- enumeration

// All rows x cols matrices of the given rank, by scan. Guarded by budget.
inline std::vector<BitMatrix> enumerate_rank_r(int rows, int cols, int r) {
    if (rows * cols > 62) throw budget_error("enumerate_rank_r: universe exceeds 2^62");
    u64 total = u64{1} << (rows * cols);
    check_budget(total, "enumerate_rank_r");
    std::vector<BitMatrix> out;
    for (u64 bits = 0; bits < total; ++bits) {
        BitMatrix m(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j)
                if ((bits >> (i * cols + j)) & 1) m.set(i, j, true);
        if (rank(m) == r) out.push_back(std::move(m));
    }
    return out;
}

// All matrices dominated by U with a given rank. Uses the interval
// isomorphism [0, U] ~ projections: with U = P Q^T a rank factorization,
// A <= U iff A = P S Q^T for a projection S (then rank A = rank S).
inline BitMatrix rank_factor_left(const BitMatrix& u) { // P: rows x rank
    auto dec = rank_one_decomposition(u);
    BitMatrix p(u.rows(), (int)dec.size());
    for (int j = 0; j < (int)dec.size(); ++j)
        for (int i = 0; i < u.rows(); ++i) p.set(i, j, dec[j].first.get(i));
    return p;
}
inline BitMatrix rank_factor_right(const BitMatrix& u) { // Q: cols x rank
    auto dec = rank_one_decomposition(u);
    BitMatrix q(u.cols(), (int)dec.size());
    for (int j = 0; j < (int)dec.size(); ++j)
        for (int i = 0; i < u.cols(); ++i) q.set(i, j, dec[j].second.get(i));
    return q;
}

inline std::vector<BitMatrix> enumerate_projections(int n, int r) {
    if (n * n > 62) throw budget_error("enumerate_projections: universe exceeds 2^62");
    u64 total = u64{1} << (n * n);
    check_budget(total, "enumerate_projections");
    std::vector<BitMatrix> out;
    for (u64 bits = 0; bits < total; ++bits) {
        BitMatrix s = BitMatrix::from_packed(n, [&] {
            u64 p = 0;
            for (int i = 0; i < n; ++i)
                p |= ((bits >> (i * n)) & ((u64{1} << n) - 1)) << (8 * i);
            return p;
        }());
        if (!(s * s == s)) continue;
        if (rank(s) == r) out.push_back(std::move(s));
    }
    return out;
}

// Number of k-dimensional subspaces of F_2^n (Gaussian binomial), via the
// Pascal-style recurrence [n k] = [n-1 k-1] + 2^k [n-1 k].
inline u64 gaussian_binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    std::vector<u64> row{1}; // n = 0
    for (int m = 1; m <= n; ++m) {
        std::vector<u64> next(m + 1, 1);
        for (int j = 1; j < m; ++j) next[j] = row[j - 1] + (u64{1} << j) * row[j];
        row = std::move(next);
    }
    return row[k];
}

// All d-dimensional subspaces of F_2^n, grown one dimension at a time.
inline std::vector<Subspace> enumerate_subspaces(int n, int d) {
    check_budget(gaussian_binomial(n, d), "enumerate_subspaces");
    std::vector<Subspace> cur{Subspace(n)};
    for (int k = 0; k < d; ++k) {
        std::map<std::string, Subspace> next;
        for (const auto& s : cur) {
            for (u64 mask = 1; mask < (u64{1} << n); ++mask) {
                BitVector v = BitVector::from_mask(n, mask);
                if (s.contains(v)) continue;
                Subspace t = s;
                t.insert(v);
                next.emplace(t.key(), t);
            }
        }
        cur.clear();
        for (auto& [key, s] : next) cur.push_back(std::move(s));
    }
    return cur;
}

// All n x n projections of rank r, built from their image/kernel splittings
// rather than by matrix scan: choose the image V, then every complement of V
// is the graph of a linear map from a fixed complement into V. Count is
// [n r]_2 * 2^{r(n-r)}, budget-checked up front.
inline std::vector<BitMatrix> enumerate_idempotents(int n, int r) {
    if (r < 0 || r > n) return {};
    if (r == 0) return {BitMatrix(n, n)};
    u64 images = gaussian_binomial(n, r);
    int shift = r * (n - r);
    if (shift > 62 || images > (u64{1} << (62 - shift)))
        throw budget_error("enumerate_idempotents: count exceeds 2^62");
    check_budget(images << shift, "enumerate_idempotents");
    std::vector<BitMatrix> out;
    out.reserve(size_t(images << shift));
    for (const auto& v : enumerate_subspaces(n, r)) {
        const auto& vb = v.basis();
        Subspace grown = v;
        std::vector<BitVector> w0; // one fixed complement of the image
        for (int j = 0; j < n && (int)w0.size() < n - r; ++j) {
            BitVector u = BitVector::unit(n, j);
            if (grown.insert(u)) w0.push_back(u);
        }
        for (u64 phi = 0; phi < (u64{1} << shift); ++phi) {
            BitMatrix e(n, n);
            for (int j = 0; j < r; ++j)
                for (int i = 0; i < n; ++i) e.set(i, j, vb[j].get(i));
            for (int j = 0; j < n - r; ++j) {
                BitVector w = w0[j];
                for (int i = 0; i < r; ++i)
                    if ((phi >> (size_t(j) * r + i)) & 1) w ^= vb[i];
                for (int i = 0; i < n; ++i) e.set(i, r + j, w.get(i));
            }
            auto einv = inverse(e); // invertible: image (+) complement
            assert(einv);
            BitMatrix p(n, n);
            for (int i = 0; i < r; ++i) p ^= BitMatrix::outer(e.column(i), einv->row(i));
            out.push_back(std::move(p));
        }
    }
    return out;
}

inline std::vector<BitMatrix> enumerate_dominated(const BitMatrix& u, int r) {
    int ell = rank(u);
    if (r > ell) return {};
    auto dec = rank_one_decomposition(u);
    BitMatrix p(u.rows(), ell), qt(ell, u.cols());
    for (int i = 0; i < ell; ++i) {
        for (int j = 0; j < u.rows(); ++j) p.set(j, i, dec[i].first.get(j));
        qt.set_row(i, dec[i].second);
    }
    std::vector<BitMatrix> out;
    for (const auto& s : enumerate_idempotents(ell, r))
        out.push_back(p * s * qt);
    return out;
}

} // namespace hdx
