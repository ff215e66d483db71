#include "lpdyn/laurent.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <map>
#include <queue>
#include <unordered_map>

namespace lpdyn {

namespace {

using u128 = unsigned __int128;

// Lexicographic comparison of raw exponent spans.
inline int lex_cmp(const Exp* a, const Exp* b, int nv) {
    for (int j = 0; j < nv; ++j) {
        if (a[j] != b[j]) return a[j] < b[j] ? -1 : 1;
    }
    return 0;
}

struct Hash128 {
    size_t operator()(u128 k) const {
        uint64_t x = static_cast<uint64_t>(k) ^ (static_cast<uint64_t>(k >> 64) * 0x9e3779b97f4a7c15ULL);
        x ^= x >> 30;
        x *= 0xbf58476d1ce4e5b9ULL;
        x ^= x >> 27;
        x *= 0x94d049bb133111ebULL;
        x ^= x >> 31;
        return static_cast<size_t>(x);
    }
};

// Fixed-width bit packing of exponent vectors into an unsigned 128-bit key.
// Fields are biased per variable so that all values of interest are
// nonnegative, and variable 1 occupies the most significant field, making
// unsigned key order coincide with descending-storage lex order.
struct Packing {
    int nv = 0;
    int width = 0;            // bits per field
    std::vector<Exp> bias;    // value stored = e[j] - bias[j]
    bool ok = false;

    static Packing make(int nv, const ExpVec& lo, const ExpVec& hi) {
        Packing p;
        p.nv = nv;
        p.bias.assign(lo.begin(), lo.end());
        int need = 1;
        for (int j = 0; j < nv; ++j) {
            long range = static_cast<long>(hi[j]) - lo[j];
            int bits = 1;
            while ((1L << bits) <= range) ++bits;
            need = std::max(need, bits + 1); // one spare bit of headroom
        }
        if (need * nv <= 128) {
            p.width = need;
            p.ok = true;
        }
        return p;
    }

    u128 pack(const Exp* e) const {
        u128 k = 0;
        for (int j = 0; j < nv; ++j) {
            k = (k << width) | static_cast<u128>(static_cast<uint64_t>(e[j] - bias[j]));
        }
        return k;
    }

    // Packs raw (unbiased) nonnegative exponents; adding such a key to a
    // biased key yields the biased key of the exponent sum.
    u128 pack_raw(const Exp* e) const {
        u128 k = 0;
        for (int j = 0; j < nv; ++j) {
            k = (k << width) | static_cast<u128>(static_cast<uint64_t>(e[j]));
        }
        return k;
    }

    void unpack(u128 k, Exp* out) const {
        u128 mask = (static_cast<u128>(1) << width) - 1;
        for (int j = nv - 1; j >= 0; --j) {
            out[j] = static_cast<Exp>(static_cast<int64_t>(k & mask)) + bias[j];
            k >>= width;
        }
    }
};

thread_local size_t g_term_guard = static_cast<size_t>(-1);

inline void check_guard(size_t terms) {
    if (terms > g_term_guard) {
        throw BudgetExceededError("term budget exceeded during polynomial arithmetic (" +
                                  std::to_string(terms) + " terms)");
    }
}

} // namespace

TermBudgetGuard::TermBudgetGuard(size_t max_terms) : prev_(g_term_guard) {
    g_term_guard = max_terms;
}
TermBudgetGuard::~TermBudgetGuard() { g_term_guard = prev_; }

void LaurentPoly::check_same_space(const LaurentPoly& o) const {
    if (nv_ != o.nv_) {
        throw DimensionMismatchError("operands have " + std::to_string(nv_) + " and " +
                                     std::to_string(o.nv_) + " variables");
    }
}

LaurentPoly LaurentPoly::constant(int num_vars, Int c) {
    LaurentPoly p(num_vars);
    if (sgn(c) != 0) {
        p.ex_.assign(static_cast<size_t>(num_vars), 0);
        p.cf_.push_back(std::move(c));
    }
    return p;
}

LaurentPoly LaurentPoly::variable(int num_vars, int index) {
    if (index < 0 || index >= num_vars) throw Error("variable index out of range");
    LaurentPoly p(num_vars);
    p.ex_.assign(static_cast<size_t>(num_vars), 0);
    p.ex_[static_cast<size_t>(index)] = 1;
    p.cf_.emplace_back(1);
    return p;
}

LaurentPoly LaurentPoly::monomial(int num_vars, const ExpVec& exps, Int c) {
    if (static_cast<int>(exps.size()) != num_vars) {
        throw DimensionMismatchError("monomial exponent vector has wrong length");
    }
    LaurentPoly p(num_vars);
    if (sgn(c) != 0) {
        p.ex_ = exps;
        p.cf_.push_back(std::move(c));
    }
    return p;
}

LaurentPoly LaurentPoly::from_terms(int num_vars, std::vector<std::pair<ExpVec, Int>> terms) {
    for (auto& t : terms) {
        if (static_cast<int>(t.first.size()) != num_vars) {
            throw DimensionMismatchError("term exponent vector has wrong length");
        }
    }
    std::sort(terms.begin(), terms.end(), [num_vars](const auto& a, const auto& b) {
        return lex_cmp(a.first.data(), b.first.data(), num_vars) > 0;
    });
    LaurentPoly p(num_vars);
    for (auto& t : terms) {
        if (!p.cf_.empty() &&
            lex_cmp(p.ex_.data() + (p.cf_.size() - 1) * num_vars, t.first.data(), num_vars) == 0) {
            p.cf_.back() += t.second;
            if (sgn(p.cf_.back()) == 0) {
                p.cf_.pop_back();
                p.ex_.resize(p.ex_.size() - static_cast<size_t>(num_vars));
            }
        } else if (sgn(t.second) != 0) {
            p.ex_.insert(p.ex_.end(), t.first.begin(), t.first.end());
            p.cf_.push_back(std::move(t.second));
        }
    }
    return p;
}

bool LaurentPoly::is_one() const {
    if (cf_.size() != 1 || cf_[0] != 1) return false;
    for (int j = 0; j < nv_; ++j) {
        if (ex_[static_cast<size_t>(j)] != 0) return false;
    }
    return true;
}

bool LaurentPoly::operator==(const LaurentPoly& o) const {
    return nv_ == o.nv_ && ex_ == o.ex_ && cf_ == o.cf_;
}

LaurentPoly LaurentPoly::operator-() const {
    LaurentPoly r(*this);
    for (auto& c : r.cf_) c = -c;
    return r;
}

LaurentPoly operator+(const LaurentPoly& a, const LaurentPoly& b) {
    a.check_same_space(b);
    const int nv = a.nv_;
    LaurentPoly r(nv);
    r.ex_.reserve(a.ex_.size() + b.ex_.size());
    r.cf_.reserve(a.cf_.size() + b.cf_.size());
    size_t i = 0, j = 0;
    while (i < a.cf_.size() || j < b.cf_.size()) {
        int c;
        if (i >= a.cf_.size()) {
            c = -1;
        } else if (j >= b.cf_.size()) {
            c = 1;
        } else {
            c = lex_cmp(a.exps(i), b.exps(j), nv);
        }
        if (c > 0) {
            r.ex_.insert(r.ex_.end(), a.exps(i), a.exps(i) + nv);
            r.cf_.push_back(a.cf_[i]);
            ++i;
        } else if (c < 0) {
            r.ex_.insert(r.ex_.end(), b.exps(j), b.exps(j) + nv);
            r.cf_.push_back(b.cf_[j]);
            ++j;
        } else {
            Int s = a.cf_[i] + b.cf_[j];
            if (sgn(s) != 0) {
                r.ex_.insert(r.ex_.end(), a.exps(i), a.exps(i) + nv);
                r.cf_.push_back(std::move(s));
            }
            ++i;
            ++j;
        }
    }
    return r;
}

LaurentPoly operator-(const LaurentPoly& a, const LaurentPoly& b) { return a + (-b); }

LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b) {
    a.check_same_space(b);
    const int nv = a.nv_;
    if (a.is_zero() || b.is_zero()) return LaurentPoly::zero(nv);

    // Monomial fast paths.
    if (a.is_monomial() || b.is_monomial()) {
        const LaurentPoly& m = a.is_monomial() ? a : b;
        const LaurentPoly& p = a.is_monomial() ? b : a;
        LaurentPoly r(p);
        const Exp* me = m.exps(0);
        for (size_t t = 0; t < r.cf_.size(); ++t) {
            Exp* e = r.ex_.data() + t * nv;
            for (int j = 0; j < nv; ++j) e[j] += me[j];
            r.cf_[t] *= m.cf_[0];
        }
        return r;
    }

    ExpVec alo = a.min_exps(), ahi = a.max_exps();
    ExpVec blo = b.min_exps(), bhi = b.max_exps();
    ExpVec lo(nv), hi(nv);
    for (int j = 0; j < nv; ++j) {
        lo[j] = alo[j] + blo[j];
        hi[j] = ahi[j] + bhi[j];
    }
    Packing pk = Packing::make(nv, lo, hi);

    std::vector<std::pair<u128, Int>> items;
    if (pk.ok) {
        // Pack each operand biased by its own minimum; biased keys add.
        std::vector<u128> ka(a.size()), kb(b.size());
        {
            Packing pa = pk;
            pa.bias = alo;
            for (size_t t = 0; t < a.size(); ++t) ka[t] = pa.pack(a.exps(t));
            Packing pb = pk;
            pb.bias = blo;
            for (size_t t = 0; t < b.size(); ++t) kb[t] = pb.pack(b.exps(t));
        }
        std::unordered_map<u128, Int, Hash128> acc;
        acc.reserve(a.size() + b.size());
        const LaurentPoly& outer = a.size() >= b.size() ? a : b;
        const std::vector<u128>& kout = a.size() >= b.size() ? ka : kb;
        const LaurentPoly& inner = a.size() >= b.size() ? b : a;
        const std::vector<u128>& kin = a.size() >= b.size() ? kb : ka;
        for (size_t i = 0; i < outer.size(); ++i) {
            const Int& ci = outer.coeff(i);
            const u128 ki = kout[i];
            for (size_t j = 0; j < inner.size(); ++j) {
                Int& slot = acc[ki + kin[j]];
                mpz_addmul(slot.get_mpz_t(), ci.get_mpz_t(), inner.coeff(j).get_mpz_t());
            }
            check_guard(acc.size());
        }
        items.reserve(acc.size());
        for (auto& kv : acc) {
            if (sgn(kv.second) != 0) items.emplace_back(kv.first, std::move(kv.second));
        }
        std::sort(items.begin(), items.end(),
                  [](const auto& x, const auto& y) { return x.first > y.first; });
        LaurentPoly r(nv);
        r.cf_.reserve(items.size());
        r.ex_.resize(items.size() * static_cast<size_t>(nv));
        for (size_t t = 0; t < items.size(); ++t) {
            pk.unpack(items[t].first, r.ex_.data() + t * nv);
            r.cf_.push_back(std::move(items[t].second));
        }
        return r;
    }

    // Generic fallback for exponent ranges that do not pack into 128 bits.
    std::vector<std::pair<ExpVec, Int>> terms;
    terms.reserve(a.size() * b.size());
    ExpVec e(nv);
    for (size_t i = 0; i < a.size(); ++i) {
        for (size_t j = 0; j < b.size(); ++j) {
            for (int v = 0; v < nv; ++v) e[v] = a.exps(i)[v] + b.exps(j)[v];
            terms.emplace_back(e, a.cf_[i] * b.cf_[j]);
        }
        check_guard(terms.size());
    }
    return LaurentPoly::from_terms(nv, std::move(terms));
}

LaurentPoly LaurentPoly::pow(unsigned long n) const {
    if (n == 0) return constant(nv_, 1);
    if (is_monomial()) {
        LaurentPoly r(nv_);
        r.ex_.resize(static_cast<size_t>(nv_));
        for (int j = 0; j < nv_; ++j) {
            long e = static_cast<long>(ex_[static_cast<size_t>(j)]) * static_cast<long>(n);
            if (e > INT32_MAX || e < INT32_MIN) throw Error("monomial power exponent overflow");
            r.ex_[static_cast<size_t>(j)] = static_cast<Exp>(e);
        }
        Int c;
        mpz_pow_ui(c.get_mpz_t(), cf_[0].get_mpz_t(), n);
        r.cf_.push_back(std::move(c));
        return r;
    }
    LaurentPoly base(*this), acc = constant(nv_, 1);
    while (n > 0) {
        if (n & 1UL) acc = acc * base;
        n >>= 1UL;
        if (n > 0) base = base * base;
    }
    return acc;
}

LaurentPoly LaurentPoly::shifted(const ExpVec& shift) const {
    if (static_cast<int>(shift.size()) != nv_) {
        throw DimensionMismatchError("shift vector has wrong length");
    }
    LaurentPoly r(*this);
    for (size_t t = 0; t < r.cf_.size(); ++t) {
        Exp* e = r.ex_.data() + t * nv_;
        for (int j = 0; j < nv_; ++j) e[j] += shift[j];
    }
    return r;
}

ExpVec LaurentPoly::min_exps() const {
    ExpVec m(static_cast<size_t>(nv_), 0);
    if (is_zero()) return m;
    for (int j = 0; j < nv_; ++j) m[static_cast<size_t>(j)] = exps(0)[j];
    for (size_t t = 1; t < cf_.size(); ++t) {
        const Exp* e = exps(t);
        for (int j = 0; j < nv_; ++j) {
            m[static_cast<size_t>(j)] = std::min(m[static_cast<size_t>(j)], e[j]);
        }
    }
    return m;
}

ExpVec LaurentPoly::max_exps() const {
    ExpVec m(static_cast<size_t>(nv_), 0);
    if (is_zero()) return m;
    for (int j = 0; j < nv_; ++j) m[static_cast<size_t>(j)] = exps(0)[j];
    for (size_t t = 1; t < cf_.size(); ++t) {
        const Exp* e = exps(t);
        for (int j = 0; j < nv_; ++j) {
            m[static_cast<size_t>(j)] = std::max(m[static_cast<size_t>(j)], e[j]);
        }
    }
    return m;
}

namespace {

// Exact polynomial division over Z (all exponents nonnegative, packed keys).
// Returns false iff num is not exactly divisible.  Implements the classical
// leading-term loop with a hash-map remainder and a lazy max-heap.
bool packed_poly_div(const Packing& pk, int nv,
                     const std::vector<std::pair<u128, Int>>& num_terms,
                     const std::vector<std::pair<u128, Int>>& den_terms, // sorted desc
                     std::vector<std::pair<u128, Int>>& quotient) {
    std::unordered_map<u128, Int, Hash128> rem;
    rem.reserve(num_terms.size() * 2);
    std::priority_queue<u128> heap;
    for (const auto& t : num_terms) {
        rem.emplace(t.first, t.second);
        heap.push(t.first);
    }
    const u128 dlead_key = den_terms[0].first;
    const Int& dlead_c = den_terms[0].second;
    ExpVec dlead(static_cast<size_t>(nv)), rex(static_cast<size_t>(nv));
    pk.unpack(dlead_key, dlead.data());

    size_t guard_counter = 0;
    quotient.clear();
    while (!rem.empty()) {
        // Fresh maximum key.
        u128 rk;
        std::unordered_map<u128, Int, Hash128>::iterator it;
        for (;;) {
            if (heap.empty()) return rem.empty();
            rk = heap.top();
            heap.pop();
            it = rem.find(rk);
            if (it != rem.end()) break;
        }
        // Candidate quotient exponent q = rexp - dlead (componentwise >= 0).
        pk.unpack(rk, rex.data());
        ExpVec q(static_cast<size_t>(nv));
        for (int j = 0; j < nv; ++j) {
            q[static_cast<size_t>(j)] = rex[static_cast<size_t>(j)] - dlead[static_cast<size_t>(j)];
            if (q[static_cast<size_t>(j)] < 0) return false;
        }
        if (!mpz_divisible_p(it->second.get_mpz_t(), dlead_c.get_mpz_t())) return false;
        Int qc;
        mpz_divexact(qc.get_mpz_t(), it->second.get_mpz_t(), dlead_c.get_mpz_t());
        const u128 qraw = pk.pack_raw(q.data());
        rem.erase(it);
        // Subtract qc * (den - lead) from the remainder.  Division packs with
        // zero bias, so the product key q + den_i is a plain field-wise add.
        for (size_t i = 1; i < den_terms.size(); ++i) {
            const u128 key = qraw + den_terms[i].first;
            auto [slot, inserted] = rem.try_emplace(key);
            mpz_submul(slot->second.get_mpz_t(), qc.get_mpz_t(), den_terms[i].second.get_mpz_t());
            if (sgn(slot->second) == 0) {
                rem.erase(slot);
            } else if (inserted) {
                heap.push(key);
            }
            if (((++guard_counter) & 1023u) == 0) check_guard(rem.size());
        }
        quotient.emplace_back(qraw, std::move(qc));
        check_guard(quotient.size());
        // Keep the lazy heap from outgrowing the remainder unreasonably.
        if (heap.size() > 8 * rem.size() + 1024) {
            std::priority_queue<u128> fresh;
            for (const auto& kv : rem) fresh.push(kv.first);
            heap.swap(fresh);
        }
    }
    return true;
}

} // namespace

std::optional<LaurentPoly> try_div_exact(const LaurentPoly& num, const LaurentPoly& den) {
    num.check_same_space(den);
    const int nv = num.nv_;
    if (den.is_zero()) throw ZeroDivisionError("division by the zero polynomial");
    if (num.is_zero()) return LaurentPoly::zero(nv);

    // Clear monomial denominators: num = x^nmin * N, den = x^dmin * D with
    // N, D ordinary polynomials; num/den = x^(nmin-dmin) * N/D.
    ExpVec nmin = num.min_exps(), dmin = den.min_exps();
    ExpVec neg_nmin(nmin), neg_dmin(dmin), back(static_cast<size_t>(nv));
    for (int j = 0; j < nv; ++j) {
        neg_nmin[static_cast<size_t>(j)] = -nmin[static_cast<size_t>(j)];
        neg_dmin[static_cast<size_t>(j)] = -dmin[static_cast<size_t>(j)];
        back[static_cast<size_t>(j)] = nmin[static_cast<size_t>(j)] - dmin[static_cast<size_t>(j)];
    }
    LaurentPoly N = num.shifted(neg_nmin);
    LaurentPoly D = den.shifted(neg_dmin);

    // Monomial divisor: per-term coefficient division.
    if (D.is_monomial()) {
        LaurentPoly r(nv);
        r.ex_.reserve(N.ex_.size());
        r.cf_.reserve(N.cf_.size());
        for (size_t t = 0; t < N.size(); ++t) {
            if (!mpz_divisible_p(N.cf_[t].get_mpz_t(), D.cf_[0].get_mpz_t())) return std::nullopt;
            Int c;
            mpz_divexact(c.get_mpz_t(), N.cf_[t].get_mpz_t(), D.cf_[0].get_mpz_t());
            r.ex_.insert(r.ex_.end(), N.exps(t), N.exps(t) + nv);
            r.cf_.push_back(std::move(c));
        }
        return r.shifted(back);
    }

    ExpVec lo(static_cast<size_t>(nv), 0), hi = N.max_exps();
    Packing pk = Packing::make(nv, lo, hi);
    if (!pk.ok) {
        // Generic path: map-based division with vector keys (rare sizes).
        auto cmp = [nv](const ExpVec& a, const ExpVec& b) {
            return lex_cmp(a.data(), b.data(), nv) > 0;
        };
        std::map<ExpVec, Int, decltype(cmp)> rem(cmp);
        for (size_t t = 0; t < N.size(); ++t) {
            rem.emplace(ExpVec(N.exps(t), N.exps(t) + nv), N.cf_[t]);
        }
        ExpVec dlead(D.exps(0), D.exps(0) + nv);
        std::vector<std::pair<ExpVec, Int>> quot;
        while (!rem.empty()) {
            auto lead = rem.begin();
            ExpVec q(static_cast<size_t>(nv));
            for (int j = 0; j < nv; ++j) {
                q[static_cast<size_t>(j)] = lead->first[static_cast<size_t>(j)] - dlead[static_cast<size_t>(j)];
                if (q[static_cast<size_t>(j)] < 0) return std::nullopt;
            }
            if (!mpz_divisible_p(lead->second.get_mpz_t(), D.cf_[0].get_mpz_t())) return std::nullopt;
            Int qc;
            mpz_divexact(qc.get_mpz_t(), lead->second.get_mpz_t(), D.cf_[0].get_mpz_t());
            rem.erase(lead);
            ExpVec key(static_cast<size_t>(nv));
            for (size_t i = 1; i < D.size(); ++i) {
                for (int j = 0; j < nv; ++j) key[static_cast<size_t>(j)] = q[static_cast<size_t>(j)] + D.exps(i)[j];
                Int& slot = rem[key];
                mpz_submul(slot.get_mpz_t(), qc.get_mpz_t(), D.cf_[i].get_mpz_t());
                if (sgn(slot) == 0) rem.erase(key);
            }
            quot.emplace_back(std::move(q), std::move(qc));
            check_guard(quot.size());
        }
        LaurentPoly r = LaurentPoly::from_terms(nv, std::move(quot));
        return r.shifted(back);
    }

    std::vector<std::pair<u128, Int>> nt(N.size()), dt(D.size()), qt;
    for (size_t t = 0; t < N.size(); ++t) nt[t] = {pk.pack(N.exps(t)), N.cf_[t]};
    for (size_t t = 0; t < D.size(); ++t) dt[t] = {pk.pack(D.exps(t)), D.cf_[t]};
    // D's terms are already lex-desc, and packing is order-preserving.
    if (!packed_poly_div(pk, nv, nt, dt, qt)) return std::nullopt;

    // Quotient keys are raw (unbiased) nonnegative exponent packs.
    Packing rawpk = pk;
    rawpk.bias.assign(static_cast<size_t>(nv), 0);
    std::sort(qt.begin(), qt.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
    LaurentPoly r(nv);
    r.cf_.reserve(qt.size());
    r.ex_.resize(qt.size() * static_cast<size_t>(nv));
    for (size_t t = 0; t < qt.size(); ++t) {
        rawpk.unpack(qt[t].first, r.ex_.data() + t * nv);
        r.cf_.push_back(std::move(qt[t].second));
    }
    return r.shifted(back);
}

LaurentPoly div_exact(const LaurentPoly& num, const LaurentPoly& den) {
    auto q = try_div_exact(num, den);
    if (!q) {
        throw NotLaurentError("exact division failed: quotient is not an integer Laurent polynomial");
    }
    return *q;
}

LaurentPoly LaurentPoly::substitute(const std::vector<LaurentPoly>& images) const {
    if (static_cast<int>(images.size()) != nv_) {
        throw DimensionMismatchError("substitute needs one image per variable");
    }
    if (images.empty()) return *this;
    const int out_nv = images[0].num_vars();
    for (const auto& im : images) {
        if (im.num_vars() != out_nv) {
            throw DimensionMismatchError("images live in different variable spaces");
        }
    }
    // Largest negative power needed per variable.
    ExpVec B(static_cast<size_t>(nv_), 0);
    for (size_t t = 0; t < size(); ++t) {
        for (int j = 0; j < nv_; ++j) {
            B[static_cast<size_t>(j)] = std::max(B[static_cast<size_t>(j)], Exp(-exps(t)[j]));
        }
    }
    // S = sum_t c_t prod_j img_j^(e_tj + B_j)  (all exponents nonnegative).
    LaurentPoly S = LaurentPoly::zero(out_nv);
    for (size_t t = 0; t < size(); ++t) {
        LaurentPoly term = LaurentPoly::constant(out_nv, cf_[t]);
        for (int j = 0; j < nv_; ++j) {
            unsigned long e = static_cast<unsigned long>(exps(t)[j] + B[static_cast<size_t>(j)]);
            if (e == 0) continue;
            if (images[static_cast<size_t>(j)].is_zero()) {
                term = LaurentPoly::zero(out_nv);
                break;
            }
            term = term * images[static_cast<size_t>(j)].pow(e);
        }
        S = S + term;
    }
    LaurentPoly denom = LaurentPoly::constant(out_nv, 1);
    for (int j = 0; j < nv_; ++j) {
        unsigned long b = static_cast<unsigned long>(B[static_cast<size_t>(j)]);
        if (b == 0) continue;
        if (images[static_cast<size_t>(j)].is_zero()) {
            throw ZeroDivisionError("negative power of a zero image in substitute");
        }
        denom = denom * images[static_cast<size_t>(j)].pow(b);
    }
    auto q = try_div_exact(S, denom);
    if (!q) throw NotLaurentError("substituted expression is not a Laurent polynomial");
    return *q;
}

ExtComplex LaurentPoly::eval_complex(const std::vector<ExtComplex>& point) const {
    if (static_cast<int>(point.size()) != nv_) {
        throw DimensionMismatchError("evaluation point has wrong dimension");
    }
    ExpVec lo = min_exps(), hi = max_exps();
    // Per-variable power tables covering [min, max].
    std::vector<std::vector<ExtComplex>> pos(static_cast<size_t>(nv_)), neg(static_cast<size_t>(nv_));
    std::vector<bool> zero_coord(static_cast<size_t>(nv_), false);
    for (int j = 0; j < nv_; ++j) {
        const ExtComplex& x = point[static_cast<size_t>(j)];
        zero_coord[static_cast<size_t>(j)] = x.is_zero();
        if (x.is_zero()) {
            if (lo[static_cast<size_t>(j)] < 0) {
                throw ZeroDivisionError("zero coordinate raised to a negative power");
            }
            continue;
        }
        int up = std::max<Exp>(hi[static_cast<size_t>(j)], 0);
        int down = std::max<Exp>(-lo[static_cast<size_t>(j)], 0);
        auto& P = pos[static_cast<size_t>(j)];
        P.resize(static_cast<size_t>(up) + 1, ExtComplex::one());
        for (int e = 1; e <= up; ++e) P[static_cast<size_t>(e)] = P[static_cast<size_t>(e - 1)] * x;
        auto& Ng = neg[static_cast<size_t>(j)];
        Ng.resize(static_cast<size_t>(down) + 1, ExtComplex::one());
        if (down > 0) {
            ExtComplex inv = ExtComplex::one() / x;
            for (int e = 1; e <= down; ++e) Ng[static_cast<size_t>(e)] = Ng[static_cast<size_t>(e - 1)] * inv;
        }
    }
    ExtComplex sum = ExtComplex::zero();
    for (size_t t = 0; t < size(); ++t) {
        const Exp* e = exps(t);
        bool vanishes = false;
        for (int j = 0; j < nv_; ++j) {
            if (zero_coord[static_cast<size_t>(j)] && e[j] > 0) {
                vanishes = true;
                break;
            }
        }
        if (vanishes) continue;
        ExtComplex term = ExtComplex::from_int(cf_[t]);
        for (int j = 0; j < nv_; ++j) {
            if (e[j] > 0) {
                term *= pos[static_cast<size_t>(j)][static_cast<size_t>(e[j])];
            } else if (e[j] < 0) {
                term *= neg[static_cast<size_t>(j)][static_cast<size_t>(-e[j])];
            }
        }
        sum += term;
    }
    return sum;
}

Rat LaurentPoly::eval_rational(const std::vector<Rat>& point) const {
    if (static_cast<int>(point.size()) != nv_) {
        throw DimensionMismatchError("evaluation point has wrong dimension");
    }
    ExpVec lo = min_exps();
    for (int j = 0; j < nv_; ++j) {
        if (sgn(point[static_cast<size_t>(j)]) == 0 && lo[static_cast<size_t>(j)] < 0) {
            throw ZeroDivisionError("zero coordinate raised to a negative power");
        }
    }
    Rat sum = 0;
    for (size_t t = 0; t < size(); ++t) {
        Rat term(cf_[t]);
        const Exp* e = exps(t);
        for (int j = 0; j < nv_; ++j) {
            if (e[j] == 0) continue;
            const Rat& x = point[static_cast<size_t>(j)];
            if (sgn(x) == 0) {
                term = 0;
                break;
            }
            Rat p;
            mpz_pow_ui(p.get_num_mpz_t(), x.get_num().get_mpz_t(), static_cast<unsigned long>(std::abs(e[j])));
            mpz_pow_ui(p.get_den_mpz_t(), x.get_den().get_mpz_t(), static_cast<unsigned long>(std::abs(e[j])));
            p.canonicalize();
            if (e[j] < 0) p = 1 / p;
            term *= p;
        }
        sum += term;
    }
    return sum;
}

Int LaurentPoly::value_at_ones() const {
    Int s = 0;
    for (const auto& c : cf_) s += c;
    return s;
}

Int LaurentPoly::length() const {
    Int s = 0;
    for (const auto& c : cf_) s += abs(c);
    return s;
}

DegreeProfile LaurentPoly::degree_profile() const {
    DegreeProfile d;
    d.dvector.assign(static_cast<size_t>(nv_), 0);
    d.numerator_degrees.assign(static_cast<size_t>(nv_), 0);
    if (is_zero()) return d;
    ExpVec lo = min_exps(), hi = max_exps();
    // den holds the reduced-fraction denominator exponents (clamped at zero);
    // dvector keeps the unclamped cluster convention, so a pure monomial with
    // positive exponents gets a negative entry (initial variables are -e_j).
    ExpVec den(static_cast<size_t>(nv_), 0);
    for (int j = 0; j < nv_; ++j) {
        den[static_cast<size_t>(j)] = std::max<Exp>(0, -lo[static_cast<size_t>(j)]);
        d.dvector[static_cast<size_t>(j)] = -lo[static_cast<size_t>(j)];
        d.numerator_degrees[static_cast<size_t>(j)] =
            hi[static_cast<size_t>(j)] + den[static_cast<size_t>(j)];
        d.denominator_total += den[static_cast<size_t>(j)];
    }
    int best = 0;
    for (size_t t = 0; t < size(); ++t) {
        int tot = 0;
        for (int j = 0; j < nv_; ++j) {
            tot += exps(t)[j] + den[static_cast<size_t>(j)];
        }
        best = std::max(best, tot);
    }
    d.numerator_total = best;
    d.rational_degree = std::max(d.numerator_total, d.denominator_total);
    return d;
}

std::string LaurentPoly::to_string() const {
    std::vector<std::string> names(static_cast<size_t>(nv_));
    for (int j = 0; j < nv_; ++j) names[static_cast<size_t>(j)] = "x" + std::to_string(j + 1);
    return to_string(names);
}

std::string LaurentPoly::to_string(const std::vector<std::string>& var_names) const {
    if (static_cast<int>(var_names.size()) != nv_) {
        throw DimensionMismatchError("need one name per variable");
    }
    if (is_zero()) return "0";
    std::string out;
    for (size_t t = 0; t < size(); ++t) {
        const Int& c = cf_[t];
        const bool negative = sgn(c) < 0;
        if (t == 0) {
            if (negative) out += "-";
        } else {
            out += negative ? " - " : " + ";
        }
        Int a = abs(c);
        const Exp* e = exps(t);
        bool any_var = false;
        for (int j = 0; j < nv_; ++j) any_var = any_var || e[j] != 0;
        std::string vars;
        for (int j = 0; j < nv_; ++j) {
            if (e[j] == 0) continue;
            if (!vars.empty()) vars += "*";
            vars += var_names[static_cast<size_t>(j)];
            if (e[j] != 1) vars += "^" + std::to_string(e[j]);
        }
        if (!any_var) {
            out += a.get_str();
        } else if (a == 1) {
            out += vars;
        } else {
            out += a.get_str() + "*" + vars;
        }
    }
    return out;
}

namespace {

struct PolyParser {
    const std::string& s;
    size_t pos = 0;
    const std::vector<std::string>& names;

    explicit PolyParser(const std::string& text, const std::vector<std::string>& var_names)
        : s(text), names(var_names) {}

    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }

    bool eof() {
        skip_ws();
        return pos >= s.size();
    }

    char peek() {
        skip_ws();
        return pos < s.size() ? s[pos] : '\0';
    }

    std::string read_integer() {
        skip_ws();
        size_t start = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos == start) throw SyntaxError("expected an integer", pos);
        return s.substr(start, pos - start);
    }

    int read_variable() {
        skip_ws();
        size_t start = pos;
        while (pos < s.size() &&
               (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_')) {
            ++pos;
        }
        if (pos == start) throw SyntaxError("expected a variable name", pos);
        std::string name = s.substr(start, pos - start);
        for (size_t j = 0; j < names.size(); ++j) {
            if (names[j] == name) return static_cast<int>(j);
        }
        throw SyntaxError("unknown variable '" + name + "'", start);
    }

    // term := factor ('*' factor)*
    std::pair<ExpVec, Int> read_term() {
        ExpVec e(names.size(), 0);
        Int c(1);
        bool first = true;
        for (;;) {
            skip_ws();
            if (pos >= s.size()) {
                if (first) throw SyntaxError("expected a term", pos);
                break;
            }
            char ch = s[pos];
            if (std::isdigit(static_cast<unsigned char>(ch))) {
                c *= Int(read_integer());
            } else if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
                int v = read_variable();
                long exp = 1;
                skip_ws();
                if (pos < s.size() && s[pos] == '^') {
                    ++pos;
                    skip_ws();
                    bool negexp = false;
                    if (pos < s.size() && (s[pos] == '-' || s[pos] == '+')) {
                        negexp = s[pos] == '-';
                        ++pos;
                    }
                    exp = std::stol(read_integer());
                    if (negexp) exp = -exp;
                }
                e[static_cast<size_t>(v)] += static_cast<Exp>(exp);
            } else {
                throw SyntaxError("unexpected character '" + std::string(1, ch) + "'", pos);
            }
            first = false;
            skip_ws();
            if (pos < s.size() && s[pos] == '*') {
                ++pos;
                continue;
            }
            break;
        }
        return {std::move(e), std::move(c)};
    }

    LaurentPoly parse() {
        std::vector<std::pair<ExpVec, Int>> terms;
        bool neg = false;
        skip_ws();
        if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
            neg = s[pos] == '-';
            ++pos;
        }
        for (;;) {
            auto t = read_term();
            if (neg) t.second = -t.second;
            terms.push_back(std::move(t));
            if (eof()) break;
            char ch = peek();
            if (ch == '+' || ch == '-') {
                neg = ch == '-';
                ++pos;
            } else {
                throw SyntaxError("expected '+' or '-' between terms", pos);
            }
        }
        return LaurentPoly::from_terms(static_cast<int>(names.size()), std::move(terms));
    }
};

} // namespace

LaurentPoly parse_poly(const std::string& text, const std::vector<std::string>& var_names) {
    PolyParser p(text, var_names);
    return p.parse();
}

LaurentPoly parse_poly(const std::string& text, int num_vars) {
    std::vector<std::string> names(static_cast<size_t>(num_vars));
    for (int j = 0; j < num_vars; ++j) names[static_cast<size_t>(j)] = "x" + std::to_string(j + 1);
    return parse_poly(text, names);
}

} // namespace lpdyn
