#pragma once

#include <algorithm>
#include <compare>
#include <cstdlib>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace bnf {

// Fourier slot (k, σ): σ = +1 stands for z_k, σ = -1 for z̄_k.
struct Slot {
    int mode = 1;
    int sign = 1;
    auto operator<=>(const Slot&) const = default;
    Slot conj() const { return {mode, -sign}; }
    Slot paired() const { return {-mode, sign}; }
};

// Truncation box [-J, J] \ {0}; slots are numbered densely.
struct Box {
    int J = 1;

    int modes() const { return 2 * J; }
    int size() const { return 4 * J; }

    bool contains(int j) const { return j != 0 && std::abs(j) <= J; }

    int mode_pos(int j) const { return j < 0 ? j + J : j + J - 1; }
    int mode_at(int pos) const { return pos < J ? pos - J : pos - J + 1; }

    int id(Slot s) const { return 2 * mode_pos(s.mode) + (s.sign > 0 ? 0 : 1); }
    Slot slot(int id) const { return {mode_at(id / 2), id % 2 == 0 ? 1 : -1}; }
    int paired(int id) const { return this->id(slot(id).paired()); }
    int conj(int id) const { return id ^ 1; }

    std::vector<int> mode_list() const {
        std::vector<int> out;
        for (int p = 0; p < modes(); ++p) out.push_back(mode_at(p));
        return out;
    }

    bool operator==(const Box&) const = default;
};

class MultiIndex {
public:
    struct Entry {
        int mode;
        int alpha;
        int beta;
        auto operator<=>(const Entry&) const = default;
    };

    MultiIndex() = default;

    static MultiIndex from_monomial(const std::vector<Slot>& slots) {
        MultiIndex m;
        for (const auto& s : slots) m.multiply(s);
        return m;
    }

    static MultiIndex from_entries(std::vector<Entry> es) {
        MultiIndex m;
        for (const auto& e : es) {
            if (e.mode == 0) throw std::invalid_argument("mode 0 in multi-index");
            if (e.alpha < 0 || e.beta < 0) throw std::invalid_argument("negative exponent");
            for (int a = 0; a < e.alpha; ++a) m.multiply({e.mode, 1});
            for (int b = 0; b < e.beta; ++b) m.multiply({e.mode, -1});
        }
        return m;
    }

    const std::vector<Entry>& entries() const { return e_; }
    bool empty() const { return e_.empty(); }

    int alpha(int j) const {
        auto it = find(j);
        return it == e_.end() ? 0 : it->alpha;
    }
    int beta(int j) const {
        auto it = find(j);
        return it == e_.end() ? 0 : it->beta;
    }
    int exponent(Slot s) const { return s.sign > 0 ? alpha(s.mode) : beta(s.mode); }

    int length() const {
        int n = 0;
        for (const auto& e : e_) n += e.alpha + e.beta;
        return n;
    }
    int alpha_length() const {
        int n = 0;
        for (const auto& e : e_) n += e.alpha;
        return n;
    }
    int beta_length() const { return length() - alpha_length(); }

    int momentum() const {
        int m = 0;
        for (const auto& e : e_) m += e.mode * (e.alpha - e.beta);
        return m;
    }
    int maxmode() const {
        int m = 0;
        for (const auto& e : e_) m = std::max(m, std::abs(e.mode));
        return m;
    }
    std::vector<int> support() const {
        std::vector<int> s;
        for (const auto& e : e_) s.push_back(e.mode);
        return s;
    }

    void multiply(Slot s, int times = 1) {
        if (s.mode == 0) throw std::invalid_argument("mode 0 in multi-index");
        if (times <= 0) return;
        auto it = std::lower_bound(e_.begin(), e_.end(), s.mode,
                                   [](const Entry& e, int j) { return e.mode < j; });
        if (it == e_.end() || it->mode != s.mode) it = e_.insert(it, Entry{s.mode, 0, 0});
        (s.sign > 0 ? it->alpha : it->beta) += times;
    }

    MultiIndex times(Slot s) const {
        MultiIndex m = *this;
        m.multiply(s);
        return m;
    }

    // removes one power of the slot; nullopt when absent
    std::optional<MultiIndex> divided(Slot s) const {
        auto it = find(s.mode);
        if (it == e_.end()) return std::nullopt;
        int have = s.sign > 0 ? it->alpha : it->beta;
        if (have == 0) return std::nullopt;
        MultiIndex m = *this;
        auto jt = m.e_.begin() + (it - e_.begin());
        (s.sign > 0 ? jt->alpha : jt->beta) -= 1;
        if (jt->alpha == 0 && jt->beta == 0) m.e_.erase(jt);
        return m;
    }

    MultiIndex operator*(const MultiIndex& o) const {
        MultiIndex m;
        m.e_.reserve(e_.size() + o.e_.size());
        auto a = e_.begin();
        auto b = o.e_.begin();
        while (a != e_.end() || b != o.e_.end()) {
            if (b == o.e_.end() || (a != e_.end() && a->mode < b->mode)) {
                m.e_.push_back(*a++);
            } else if (a == e_.end() || b->mode < a->mode) {
                m.e_.push_back(*b++);
            } else {
                m.e_.push_back({a->mode, a->alpha + b->alpha, a->beta + b->beta});
                ++a;
                ++b;
            }
        }
        return m;
    }

    MultiIndex conj() const {
        MultiIndex m = *this;
        for (auto& e : m.e_) std::swap(e.alpha, e.beta);
        return m;
    }

    // net super-action charge α_n + α_{-n} - β_n - β_{-n} at n ≥ 1
    int charge(int n) const {
        n = std::abs(n);
        return alpha(n) + alpha(-n) - beta(n) - beta(-n);
    }

    bool is_sap() const {
        for (const auto& e : e_)
            if (charge(e.mode) != 0) return false;
        return true;
    }

    // 𝔑(α, β): the n ≥ 1 with nonzero charge
    std::vector<int> unbalanced() const {
        std::set<int> ns;
        for (const auto& e : e_)
            if (charge(e.mode) != 0) ns.insert(std::abs(e.mode));
        return {ns.begin(), ns.end()};
    }

    // (j, sign) list with multiplicity, ordered by (j, +, -)
    std::vector<Slot> slots() const {
        std::vector<Slot> out;
        for (const auto& e : e_) {
            for (int a = 0; a < e.alpha; ++a) out.push_back({e.mode, 1});
            for (int b = 0; b < e.beta; ++b) out.push_back({e.mode, -1});
        }
        return out;
    }

    // "j:side:exp" tokens separated by spaces
    std::string encode() const {
        std::ostringstream os;
        bool first = true;
        for (const auto& e : e_) {
            if (e.alpha) {
                os << (first ? "" : " ") << e.mode << ":+:" << e.alpha;
                first = false;
            }
            if (e.beta) {
                os << (first ? "" : " ") << e.mode << ":-:" << e.beta;
                first = false;
            }
        }
        return os.str();
    }

    static MultiIndex decode(const std::string& text) {
        MultiIndex m;
        std::istringstream is(text);
        std::string tok;
        while (is >> tok) {
            auto c1 = tok.find(':');
            auto c2 = tok.find(':', c1 + 1);
            if (c1 == std::string::npos || c2 == std::string::npos)
                throw std::invalid_argument("bad monomial token: " + tok);
            int j = std::stoi(tok.substr(0, c1));
            std::string side = tok.substr(c1 + 1, c2 - c1 - 1);
            int ex = std::stoi(tok.substr(c2 + 1));
            if (side != "+" && side != "-") throw std::invalid_argument("bad side: " + tok);
            if (ex <= 0) throw std::invalid_argument("bad exponent: " + tok);
            m.multiply({j, side == "+" ? 1 : -1}, ex);
        }
        return m;
    }

    auto operator<=>(const MultiIndex&) const = default;
    bool operator==(const MultiIndex&) const = default;

private:
    std::vector<Entry>::const_iterator find(int j) const {
        auto it = std::lower_bound(e_.begin(), e_.end(), j,
                                   [](const Entry& e, int k) { return e.mode < k; });
        return (it != e_.end() && it->mode == j) ? it : e_.end();
    }

    std::vector<Entry> e_;
};

inline MultiIndex from_monomial(const std::vector<Slot>& slots) { return MultiIndex::from_monomial(slots); }
inline bool is_sap(const MultiIndex& m) { return m.is_sap(); }

}  // namespace bnf
