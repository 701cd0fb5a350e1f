#include "keyagree/codes.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>

namespace keyagree {
namespace {

std::string dims(int n, int m) { return "n=" + std::to_string(n) + " m=" + std::to_string(m); }

void require_positive_dims(int n, int m) {
    if (n < 1) throw ParameterError("link count n must be >= 1, got " + std::to_string(n));
    if (m < 1 || m > 31) throw ParameterError("bits per message m must be in [1, 31], got " + std::to_string(m));
}

void require_same_shape(const Codebook& cb, const LinkTuple& word) {
    if (word.n() != cb.n() || word.m() != cb.m()) {
        throw ParameterError("tuple shape " + dims(word.n(), word.m()) + " does not match codebook " +
                             dims(cb.n(), cb.m()));
    }
}

// Evaluate the polynomial with the given coefficients (coeffs[j] multiplies
// x^j) at the first n field elements 0, 1, ..., n-1.
LinkTuple evaluate_poly(const Gf2m& field, int n, std::span<const std::uint32_t> coeffs) {
    std::vector<std::uint32_t> values(static_cast<std::size_t>(n));
    for (int p = 0; p < n; ++p) {
        const auto x = static_cast<std::uint32_t>(p);
        std::uint32_t acc = 0;
        for (std::size_t j = coeffs.size(); j-- > 0;) acc = Gf2m::add(field.mul(acc, x), coeffs[j]);
        values[static_cast<std::size_t>(p)] = acc;
    }
    return LinkTuple(field.m(), values);
}

std::vector<std::uint32_t> index_to_coeffs(std::uint64_t index, int k, int m) {
    std::vector<std::uint32_t> coeffs(static_cast<std::size_t>(k));
    const std::uint64_t mask = (std::uint64_t{1} << m) - 1;
    for (int j = 0; j < k; ++j) {
        coeffs[static_cast<std::size_t>(j)] = static_cast<std::uint32_t>(index & mask);
        index >>= m;
    }
    return coeffs;
}

// Interpolate the unique degree-<k polynomial through the given (point,
// value) pairs and return its evaluation on all n points. Points are the
// canonical 0..n-1 field elements.
LinkTuple interpolate_and_extend(const Gf2m& field, int n, std::span<const int> points,
                                 std::span<const std::uint32_t> values) {
    const int k = static_cast<int>(points.size());
    // Lagrange basis, evaluated symbolically into coefficient form.
    std::vector<std::uint32_t> coeffs(static_cast<std::size_t>(k), 0);
    std::vector<std::uint32_t> basis;
    for (int i = 0; i < k; ++i) {
        // numerator = prod_{j != i} (x - x_j), denominator = prod (x_i - x_j)
        basis.assign(1, 1u);
        std::uint32_t denom = 1;
        const auto xi = static_cast<std::uint32_t>(points[static_cast<std::size_t>(i)]);
        for (int j = 0; j < k; ++j) {
            if (j == i) continue;
            const auto xj = static_cast<std::uint32_t>(points[static_cast<std::size_t>(j)]);
            basis.push_back(0);
            for (std::size_t c = basis.size(); c-- > 1;) {
                basis[c] = Gf2m::add(field.mul(basis[c], xj), basis[c - 1]);
            }
            basis[0] = field.mul(basis[0], xj);
            denom = field.mul(denom, Gf2m::add(xi, xj));
        }
        const std::uint32_t scale = field.mul(values[static_cast<std::size_t>(i)], field.inv(denom));
        for (std::size_t c = 0; c < basis.size(); ++c) {
            coeffs[c] = Gf2m::add(coeffs[c], field.mul(basis[c], scale));
        }
    }
    return evaluate_poly(field, n, coeffs);
}

}  // namespace

// ---------------------------------------------------------------- Message

Message::Message(int m_bits, std::uint32_t v) : m(m_bits), value(v) {
    if (m < 1 || m > 31) throw ParameterError("message width must be in [1, 31], got " + std::to_string(m));
    if (v >> m != 0) throw ParameterError("message value does not fit in " + std::to_string(m) + " bits");
}

Message Message::with_prefix(int l, std::uint32_t pre, const Message& suf) {
    return Message(l + suf.m, (pre << suf.m) | suf.value);
}

// -------------------------------------------------------------- LinkTuple

LinkTuple::LinkTuple(int m, std::span<const std::uint32_t> values) : m_(m) {
    messages_.reserve(values.size());
    for (auto v : values) messages_.emplace_back(m, v);
    if (messages_.empty()) throw ParameterError("link tuple must hold at least one message");
}

LinkTuple::LinkTuple(int m, std::initializer_list<std::uint32_t> values)
    : LinkTuple(m, std::span<const std::uint32_t>(values.begin(), values.size())) {}

LinkTuple::LinkTuple(std::vector<Message> messages) : messages_(std::move(messages)) {
    if (messages_.empty()) throw ParameterError("link tuple must hold at least one message");
    m_ = messages_.front().m;
    for (const auto& msg : messages_) {
        if (msg.m != m_) throw ParameterError("all messages in a tuple must share the same width");
    }
}

LinkTuple LinkTuple::with_message(int link, Message replacement) const {
    if (link < 0 || link >= n()) throw ParameterError("link index out of range");
    if (replacement.m != m_) throw ParameterError("replacement width does not match tuple");
    auto msgs = messages_;
    msgs[static_cast<std::size_t>(link)] = replacement;
    return LinkTuple(std::move(msgs));
}

std::string LinkTuple::to_hex() const {
    static const char* digits = "0123456789abcdef";
    const int bits = n() * m_;
    std::vector<int> nibbles((static_cast<std::size_t>(bits) + 3) / 4, 0);
    int pos = 0;
    for (const auto& msg : messages_) {
        for (int i = 0; i < m_; ++i, ++pos) {
            if (msg.bit(i)) nibbles[static_cast<std::size_t>(pos / 4)] |= 8 >> (pos % 4);
        }
    }
    std::string out;
    out.reserve(nibbles.size());
    for (int v : nibbles) out.push_back(digits[v]);
    return out;
}

LinkTuple LinkTuple::from_hex(int n, int m, std::string_view hex) {
    require_positive_dims(n, m);
    const int bits = n * m;
    if (static_cast<int>(hex.size()) != (bits + 3) / 4) {
        throw ParameterError("hex string length does not match tuple of " + std::to_string(bits) + " bits");
    }
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw ParameterError(std::string("invalid hex digit '") + c + "'");
    };
    std::vector<std::uint32_t> values(static_cast<std::size_t>(n), 0);
    for (int pos = 0; pos < bits; ++pos) {
        const int bit = (nibble(hex[static_cast<std::size_t>(pos / 4)]) >> (3 - pos % 4)) & 1;
        if (bit != 0) values[static_cast<std::size_t>(pos / m)] |= std::uint32_t{1} << (m - 1 - pos % m);
    }
    const int tail = (4 - bits % 4) % 4;
    for (int pos = bits; pos < bits + tail; ++pos) {
        if (((nibble(hex.back()) >> (3 - pos % 4)) & 1) != 0) throw ParameterError("nonzero padding bits in hex tuple");
    }
    return LinkTuple(m, values);
}

int link_distance(const LinkTuple& a, const LinkTuple& b) {
    if (a.n() != b.n() || a.m() != b.m()) {
        throw ParameterError("link_distance requires matching shapes, got " + dims(a.n(), a.m()) + " vs " +
                             dims(b.n(), b.m()));
    }
    int d = 0;
    for (int i = 0; i < a.n(); ++i) {
        if (a.value(i) != b.value(i)) ++d;
    }
    return d;
}

const char* construction_name(Construction c) {
    switch (c) {
        case Construction::repetition: return "repetition";
        case Construction::full: return "full";
        case Construction::mds: return "mds";
        case Construction::explicit_list: return "explicit";
    }
    return "unknown";
}

std::optional<Construction> construction_from_name(std::string_view name) {
    if (name == "repetition") return Construction::repetition;
    if (name == "full") return Construction::full;
    if (name == "mds") return Construction::mds;
    if (name == "explicit") return Construction::explicit_list;
    return std::nullopt;
}

// --------------------------------------------------------------- Codebook

std::uint64_t Codebook::size() const {
    if (tag_ == Construction::explicit_list) return words_.size();
    if (!log2_size_ || *log2_size_ > 63) throw CapacityError("codebook size exceeds 2^63");
    return std::uint64_t{1} << *log2_size_;
}

const std::vector<LinkTuple>& Codebook::codewords() const {
    if (!materialized_) {
        throw CapacityError("codebook with log2 size " + std::to_string(log2_size_.value_or(-1)) +
                            " is not materialized");
    }
    return words_;
}

bool Codebook::contains(const LinkTuple& word) const {
    require_same_shape(*this, word);
    switch (tag_) {
        case Construction::full:
            return true;
        case Construction::repetition: {
            for (int i = 1; i < n_; ++i) {
                if (word.value(i) != word.value(0)) return false;
            }
            return true;
        }
        case Construction::mds: {
            std::vector<int> points(static_cast<std::size_t>(k_));
            std::vector<std::uint32_t> values(static_cast<std::size_t>(k_));
            for (int i = 0; i < k_; ++i) {
                points[static_cast<std::size_t>(i)] = i;
                values[static_cast<std::size_t>(i)] = word.value(i);
            }
            return interpolate_and_extend(*field_, n_, points, values) == word;
        }
        case Construction::explicit_list:
            return std::binary_search(words_.begin(), words_.end(), word);
    }
    return false;
}

LinkTuple Codebook::sample(Rng& rng) const {
    switch (tag_) {
        case Construction::repetition: {
            const auto v = static_cast<std::uint32_t>(rng.below(std::uint64_t{1} << m_));
            return LinkTuple(m_, std::vector<std::uint32_t>(static_cast<std::size_t>(n_), v));
        }
        case Construction::full: {
            std::vector<std::uint32_t> values(static_cast<std::size_t>(n_));
            for (auto& v : values) v = static_cast<std::uint32_t>(rng.below(std::uint64_t{1} << m_));
            return LinkTuple(m_, values);
        }
        case Construction::mds: {
            std::vector<std::uint32_t> coeffs(static_cast<std::size_t>(k_));
            for (auto& c : coeffs) c = static_cast<std::uint32_t>(rng.below(std::uint64_t{1} << m_));
            return evaluate_poly(*field_, n_, coeffs);
        }
        case Construction::explicit_list:
            return words_[rng.below(words_.size())];
    }
    throw ParameterError("unreachable construction");
}

// ------------------------------------------------------------ constructors

Codebook build_repetition(int n, int m) {
    require_positive_dims(n, m);
    Codebook cb;
    cb.n_ = n;
    cb.m_ = m;
    cb.d_ = n;
    cb.tag_ = Construction::repetition;
    cb.log2_size_ = m;
    cb.materialized_ = m <= default_caps().materialize_log2;
    if (cb.materialized_) {
        cb.words_.reserve(std::size_t{1} << m);
        for (std::uint32_t v = 0; v < (std::uint32_t{1} << m); ++v) {
            cb.words_.emplace_back(m, std::vector<std::uint32_t>(static_cast<std::size_t>(n), v));
        }
    }
    return cb;
}

Codebook build_full(int n, int m, const Caps& caps) {
    require_positive_dims(n, m);
    Codebook cb;
    cb.n_ = n;
    cb.m_ = m;
    cb.d_ = 1;
    cb.tag_ = Construction::full;
    cb.log2_size_ = static_cast<std::int64_t>(n) * m;
    cb.materialized_ = *cb.log2_size_ <= caps.materialize_log2;
    if (cb.materialized_) {
        const std::uint64_t total = std::uint64_t{1} << *cb.log2_size_;
        cb.words_.reserve(total);
        std::vector<std::uint32_t> values(static_cast<std::size_t>(n), 0);
        const std::uint64_t mask = (std::uint64_t{1} << m) - 1;
        for (std::uint64_t idx = 0; idx < total; ++idx) {
            std::uint64_t rest = idx;
            for (int i = n - 1; i >= 0; --i) {
                values[static_cast<std::size_t>(i)] = static_cast<std::uint32_t>(rest & mask);
                rest >>= m;
            }
            cb.words_.emplace_back(m, values);
        }
    }
    return cb;
}

Codebook build_mds(int n, int d, int m, const Caps& caps) {
    require_positive_dims(n, m);
    if (d < 1 || d > n) throw ParameterError("mds distance d must satisfy 1 <= d <= n");
    if (m > 16) throw UnsupportedParameters("mds codes are built over fields with m <= 16");
    Gf2m field(m);
    if (field.order() < static_cast<std::uint32_t>(n)) {
        throw UnsupportedParameters("mds code needs 2^m >= n (" + dims(n, m) + ")");
    }
    const int k = n - d + 1;
    Codebook cb;
    cb.n_ = n;
    cb.m_ = m;
    cb.d_ = d;
    cb.tag_ = Construction::mds;
    cb.field_ = field;
    cb.k_ = k;
    cb.log2_size_ = static_cast<std::int64_t>(m) * k;
    cb.materialized_ = *cb.log2_size_ <= caps.materialize_log2;
    if (cb.materialized_) {
        const std::uint64_t total = std::uint64_t{1} << *cb.log2_size_;
        cb.words_.reserve(total);
        for (std::uint64_t idx = 0; idx < total; ++idx) {
            cb.words_.push_back(evaluate_poly(field, n, index_to_coeffs(idx, k, m)));
        }
    }
    return cb;
}

Codebook build_a_code(int n, int d, int m, const Caps& caps) {
    if (d == n) return build_repetition(n, m);
    if (d == 1) return build_full(n, m, caps);
    return build_mds(n, d, m, caps);
}

Codebook make_explicit(int n, int m, int declared_d, std::vector<LinkTuple> words) {
    require_positive_dims(n, m);
    if (declared_d < 1 || declared_d > n) throw ParameterError("declared distance out of range");
    if (words.empty()) throw ParameterError("explicit codebook must not be empty");
    for (const auto& w : words) {
        if (w.n() != n || w.m() != m) throw ParameterError("explicit codeword shape mismatch");
    }
    std::sort(words.begin(), words.end());
    if (std::adjacent_find(words.begin(), words.end()) != words.end()) {
        throw ParameterError("explicit codebook has duplicate codewords");
    }
    Codebook cb;
    cb.n_ = n;
    cb.m_ = m;
    cb.d_ = declared_d;
    cb.tag_ = Construction::explicit_list;
    cb.materialized_ = true;
    const std::uint64_t count = words.size();
    if ((count & (count - 1)) == 0) {
        std::int64_t lg = 0;
        while ((std::uint64_t{1} << lg) < count) ++lg;
        cb.log2_size_ = lg;
    }
    cb.words_ = std::move(words);
    return cb;
}

// ------------------------------------------------------------- operations

int min_distance(const Codebook& cb, const Caps& caps) {
    const auto& words = cb.codewords();
    if (words.size() < 2) throw ParameterError("min_distance needs at least two codewords");
    const std::uint64_t pairs = words.size() * (words.size() - 1) / 2;
    if (pairs > caps.distance_pairs) {
        throw CapacityError("min_distance would scan " + std::to_string(pairs) + " pairs (cap " +
                            std::to_string(caps.distance_pairs) + ")");
    }
    int best = cb.n() + 1;
    for (std::size_t i = 0; i < words.size(); ++i) {
        for (std::size_t j = i + 1; j < words.size(); ++j) {
            best = std::min(best, link_distance(words[i], words[j]));
            if (best == 1) return 1;
        }
    }
    return best;
}

namespace {

DecodeOutcome decode_materialized(const Codebook& cb, const LinkTuple& received, int radius) {
    // A zero-distance match wins outright, so settle membership before any
    // ambiguity verdict.
    std::optional<LinkTuple> hit;
    int hit_dist = 0;
    bool ambiguous = false;
    for (const auto& cw : cb.codewords()) {
        const int d = link_distance(cw, received);
        if (d == 0) return DecodeOutcome::Clean(cw);
        if (d <= radius) {
            if (hit) ambiguous = true;
            hit = cw;
            hit_dist = d;
        }
    }
    if (ambiguous || !hit) return DecodeOutcome::Detected();
    return DecodeOutcome::Corrected(*hit, hit_dist);
}

DecodeOutcome decode_repetition(const Codebook& cb, const LinkTuple& received, int radius) {
    std::map<std::uint32_t, int> counts;
    for (int i = 0; i < cb.n(); ++i) ++counts[received.value(i)];
    std::optional<LinkTuple> hit;
    int hit_dist = 0;
    bool ambiguous = false;
    for (const auto& [value, count] : counts) {
        const int d = cb.n() - count;
        if (d > radius) continue;
        LinkTuple cw(cb.m(), std::vector<std::uint32_t>(static_cast<std::size_t>(cb.n()), value));
        if (d == 0) return DecodeOutcome::Clean(std::move(cw));
        if (hit) ambiguous = true;
        hit = std::move(cw);
        hit_dist = d;
    }
    if (ambiguous || !hit) return DecodeOutcome::Detected();
    return DecodeOutcome::Corrected(*hit, hit_dist);
}

DecodeOutcome decode_mds(const Codebook& cb, const LinkTuple& received, int radius) {
    const auto& field = *cb.field();
    const int n = cb.n();
    const int k = cb.message_symbols();
    // Candidates within the radius agree with the received word on >= n - e
    // positions, e <= radius <= d - 1, so each is pinned by interpolation
    // through some k trusted positions. Enumerate error-position subsets.
    std::set<LinkTuple> candidates;
    std::vector<int> subset;
    std::vector<char> in_error(static_cast<std::size_t>(n), 0);
    auto consider = [&]() {
        std::vector<int> points;
        std::vector<std::uint32_t> values;
        for (int i = 0; i < n && static_cast<int>(points.size()) < k; ++i) {
            if (!in_error[static_cast<std::size_t>(i)]) {
                points.push_back(i);
                values.push_back(received.value(i));
            }
        }
        LinkTuple cand = interpolate_and_extend(field, n, points, values);
        if (link_distance(cand, received) <= radius) candidates.insert(std::move(cand));
    };
    auto rec = [&](auto&& self, int start, int remaining) -> void {
        consider();
        if (remaining == 0) return;
        for (int i = start; i < n; ++i) {
            in_error[static_cast<std::size_t>(i)] = 1;
            self(self, i + 1, remaining - 1);
            in_error[static_cast<std::size_t>(i)] = 0;
        }
    };
    rec(rec, 0, std::min(radius, n - k));
    if (candidates.empty()) return DecodeOutcome::Detected();
    if (auto it = candidates.find(received); it != candidates.end()) return DecodeOutcome::Clean(*it);
    if (candidates.size() > 1) return DecodeOutcome::Detected();
    return DecodeOutcome::Corrected(*candidates.begin(), link_distance(*candidates.begin(), received));
}

}  // namespace

DecodeOutcome bounded_distance_decode(const Codebook& cb, const LinkTuple& received, int radius) {
    require_same_shape(cb, received);
    if (radius < 0) throw ParameterError("decode radius must be >= 0");
    if (cb.is_materialized()) return decode_materialized(cb, received, radius);
    switch (cb.construction()) {
        case Construction::repetition:
            return decode_repetition(cb, received, radius);
        case Construction::full:
            // Every tuple is a codeword; an exact match always wins.
            return DecodeOutcome::Clean(received);
        case Construction::mds:
            if (radius >= cb.declared_min_distance()) {
                throw CapacityError("algebraic mds decode supports radius < d only");
            }
            return decode_mds(cb, received, radius);
        case Construction::explicit_list:
            break;
    }
    throw CapacityError("codebook cannot be decoded without materialization");
}

std::optional<LinkTuple> unique_decode_with_erasures(const Codebook& cb, const LinkTuple& word,
                                                     std::span<const char> forced_errors, int radius) {
    require_same_shape(cb, word);
    if (static_cast<int>(forced_errors.size()) != cb.n()) {
        throw ParameterError("forced-error mask length does not match the codebook length");
    }
    const int n = cb.n();
    int forced = 0;
    for (char f : forced_errors) forced += f != 0;
    if (radius < forced) return std::nullopt;

    auto distance_to = [&](const LinkTuple& candidate) {
        int dist = forced;
        for (int i = 0; i < n; ++i) {
            if (forced_errors[static_cast<std::size_t>(i)] == 0 && candidate.value(i) != word.value(i)) ++dist;
        }
        return dist;
    };

    std::optional<LinkTuple> hit;
    auto offer = [&](LinkTuple candidate) -> bool {  // false on ambiguity
        if (hit && *hit != candidate) return false;
        hit = std::move(candidate);
        return true;
    };

    if (cb.is_materialized()) {
        for (const auto& cw : cb.codewords()) {
            if (distance_to(cw) <= radius && !offer(cw)) return std::nullopt;
        }
        return hit;
    }

    switch (cb.construction()) {
        case Construction::repetition: {
            std::map<std::uint32_t, int> counts;
            for (int i = 0; i < n; ++i) {
                if (forced_errors[static_cast<std::size_t>(i)] == 0) ++counts[word.value(i)];
            }
            for (const auto& [value, count] : counts) {
                if (forced + (n - forced - count) > radius) continue;
                if (!offer(LinkTuple(cb.m(), std::vector<std::uint32_t>(static_cast<std::size_t>(n), value)))) {
                    return std::nullopt;
                }
            }
            return hit;
        }
        case Construction::full: {
            // The word itself qualifies; any slack in the radius or any
            // forced error admits a second codeword.
            if (forced == 0 && radius == 0) return word;
            return std::nullopt;
        }
        case Construction::mds: {
            const auto& field = *cb.field();
            const int k = cb.message_symbols();
            // Forced errors act as erasures; enumerate up to radius - forced
            // further error positions and pin candidates by interpolation.
            std::vector<char> err(forced_errors.begin(), forced_errors.end());
            bool ambiguous = false;
            auto consider = [&]() {
                std::vector<int> points;
                std::vector<std::uint32_t> values;
                for (int i = 0; i < n && static_cast<int>(points.size()) < k; ++i) {
                    if (err[static_cast<std::size_t>(i)] == 0) {
                        points.push_back(i);
                        values.push_back(word.value(i));
                    }
                }
                if (static_cast<int>(points.size()) < k) return;
                LinkTuple cand = interpolate_and_extend(field, n, points, values);
                bool consistent = true;
                for (int i = 0; i < n && consistent; ++i) {
                    if (err[static_cast<std::size_t>(i)] == 0 && cand.value(i) != word.value(i)) consistent = false;
                }
                if (!consistent || distance_to(cand) > radius) return;
                if (!offer(std::move(cand))) ambiguous = true;
            };
            auto rec = [&](auto&& self, int start, int remaining) -> void {
                if (ambiguous) return;
                consider();
                if (remaining <= 0) return;
                for (int i = start; i < n; ++i) {
                    if (err[static_cast<std::size_t>(i)] != 0) continue;
                    err[static_cast<std::size_t>(i)] = 1;
                    self(self, i + 1, remaining - 1);
                    err[static_cast<std::size_t>(i)] = 0;
                }
            };
            rec(rec, 0, std::min(radius - forced, n - forced - k));
            if (ambiguous) return std::nullopt;
            return hit;
        }
        case Construction::explicit_list:
            break;
    }
    throw CapacityError("codebook cannot be decoded without materialization");
}

std::int64_t codebook_log2_size(const Codebook& cb) {
    if (auto lg = cb.exact_log2_size()) return *lg;
    throw ParameterError("codebook size is not a power of two");
}

}  // namespace keyagree
