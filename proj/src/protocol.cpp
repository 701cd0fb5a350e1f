#include "keyagree/protocol.hpp"

#include <algorithm>
#include <string>

#include "keyagree/rates.hpp"

namespace keyagree {

const char* scheme_name(SchemeKind kind) {
    switch (kind) {
        case SchemeKind::direct: return "direct";
        case SchemeKind::branched: return "branched";
        case SchemeKind::detect_only: return "detect-only";
    }
    return "unknown";
}

std::optional<SchemeKind> scheme_from_name(std::string_view name) {
    if (name == "direct") return SchemeKind::direct;
    if (name == "branched") return SchemeKind::branched;
    if (name == "detect-only" || name == "detect_only") return SchemeKind::detect_only;
    return std::nullopt;
}

// ---------------------------------------------------------- construction

TwoRoundScheme::TwoRoundScheme(SchemeKind kind, const SchemeParams& params, const Caps& caps, bool weakened_ok)
    : kind_(kind), params_(params) {
    if (kind_ == SchemeKind::direct) params_.d = 2 * params_.t + 1;
    validate(weakened_ok);
    build_books(caps);
    validate_books();
}

TwoRoundScheme::TwoRoundScheme(SchemeKind kind, const SchemeParams& params, std::vector<Codebook> suffix_books,
                               const Caps& caps, bool weakened_ok)
    : kind_(kind), params_(params) {
    if (kind_ == SchemeKind::direct) params_.d = 2 * params_.t + 1;
    validate(weakened_ok);
    build_books(caps);
    suffix_books_ = std::move(suffix_books);
    validate_books();
}

void TwoRoundScheme::validate(bool weakened_ok) const {
    const auto& p = params_;
    if (p.m < 1 || p.m > 31) throw ParameterError("bits per message m must be in [1, 31]");
    if (p.n1 < 1 || p.n2 < 1) throw ParameterError("link counts must be >= 1");
    if (p.t < 0) throw ParameterError("attack budget must be >= 0");
    switch (kind_) {
        case SchemeKind::direct:
            if (p.n1 < 2 * p.t + 1 || p.n2 < 2 * p.t + 1) {
                throw ParameterError("direct transmission needs n1, n2 >= 2t + 1");
            }
            return;
        case SchemeKind::branched: {
            const int ell = branch_tag_bits(p.t);
            if (p.m - ell < 1) throw ParameterError("message width m must exceed the branch tag width");
            if (p.n2 <= 2 * p.t) {
                throw ParameterError("branched scheme needs n2 > 2t (see the detect-only scheme otherwise)");
            }
            if (p.d < 1 || p.d > p.n1) throw ParameterError("forward distance d must satisfy 1 <= d <= n1");
            if (p.d <= p.t && !weakened_ok) {
                throw ParameterError("branched scheme needs d > t (pass weakened_ok to run anyway)");
            }
            return;
        }
        case SchemeKind::detect_only: {
            const int ell = branch_tag_bits(p.t);
            if (p.t < 1) throw ParameterError("detect-only scheme needs t >= 1");
            if (p.m - ell < 1) throw ParameterError("message width m must exceed the branch tag width");
            if (p.d != p.t + 1) throw ParameterError("detect-only scheme needs d = t + 1");
            if (p.n2 != 2 * p.t) throw ParameterError("detect-only scheme is for n2 = 2t exactly");
            if (p.n1 < p.d) throw ParameterError("detect-only scheme needs n1 >= d");
            return;
        }
    }
}

void TwoRoundScheme::build_books(const Caps& caps) {
    const auto& p = params_;
    suffix_books_.clear();
    switch (kind_) {
        case SchemeKind::direct:
            ell_ = 0;
            bucket_ = -1;
            weakened_ = false;
            forward_book_ = build_a_code(p.n1, 2 * p.t + 1, p.m, caps);
            suffix_books_.push_back(build_a_code(p.n2, 2 * p.t + 1, p.m, caps));
            return;
        case SchemeKind::branched: {
            ell_ = branch_tag_bits(p.t);
            weakened_ = p.d <= p.t;
            forward_book_ = build_a_code(p.n1, p.d, p.m, caps);
            if (weakened_) {
                bucket_ = -1;
                suffix_books_.push_back(build_a_code(p.n2, 2 * p.t + 1, p.m - ell_, caps));
                return;
            }
            const int last = std::min(p.d - p.t, p.t);
            bucket_ = (p.d - p.t <= p.t) ? p.d - p.t : -1;
            for (int i = 0; i <= last; ++i) {
                suffix_books_.push_back(build_a_code(p.n2, 2 * (p.t - i) + 1, p.m - ell_, caps));
            }
            return;
        }
        case SchemeKind::detect_only: {
            ell_ = branch_tag_bits(p.t);
            weakened_ = false;
            bucket_ = 1;
            forward_book_ = build_a_code(p.n1, p.d, p.m, caps);
            // The clean branch cannot afford distance 2t+1 (n2 = 2t); it ships
            // a repetition suffix and the key drops the backward part.
            suffix_books_.push_back(build_a_code(p.n2, p.n2, p.m - ell_, caps));
            suffix_books_.push_back(build_a_code(p.n2, 2 * p.t - 1, p.m - ell_, caps));
            return;
        }
    }
}

int TwoRoundScheme::backward_distance(int branch) const {
    const auto& p = params_;
    switch (kind_) {
        case SchemeKind::direct: return 2 * p.t + 1;
        case SchemeKind::branched: return weakened_ ? 2 * p.t + 1 : 2 * (p.t - branch) + 1;
        case SchemeKind::detect_only: return branch == 0 ? p.n2 : 2 * p.t - 1;
    }
    return 0;
}

void TwoRoundScheme::validate_books() const {
    const auto& p = params_;
    int expected = 1;
    if (kind_ == SchemeKind::branched && !weakened_) expected = std::min(p.d - p.t, p.t) + 1;
    if (kind_ == SchemeKind::detect_only) expected = 2;
    if (static_cast<int>(suffix_books_.size()) != expected) {
        throw ParameterError("backward codebook count does not match the branch layout");
    }
    const int want_m = kind_ == SchemeKind::direct ? p.m : p.m - ell_;
    for (int i = 0; i < static_cast<int>(suffix_books_.size()); ++i) {
        const auto& book = suffix_books_[static_cast<std::size_t>(i)];
        if (book.n() != p.n2 || book.m() != want_m) {
            throw ParameterError("backward codebook " + std::to_string(i) + " has the wrong shape");
        }
        if (book.declared_min_distance() != backward_distance(i)) {
            throw ParameterError("backward codebook " + std::to_string(i) + " has the wrong distance");
        }
    }
}

const Codebook& TwoRoundScheme::suffix_book(int branch) const {
    if (branch < 0 || branch >= branch_count()) throw ParameterError("branch index out of range");
    return suffix_books_[static_cast<std::size_t>(branch)];
}

bool TwoRoundScheme::branch_keys_on_backward(int branch) const {
    if (branch < 0 || branch >= branch_count()) throw ParameterError("branch index out of range");
    return !(kind_ == SchemeKind::detect_only && branch == 0);
}

std::int64_t TwoRoundScheme::branch_key_log2(int branch) const {
    std::int64_t bits = 0;
    const bool detection = has_detection_branch() && branch == bucket_;
    if (!detection) bits += codebook_log2_size(forward_book_);
    if (branch_keys_on_backward(branch)) bits += codebook_log2_size(suffix_book(branch));
    return bits;
}

// ------------------------------------------------------------- execution

LinkTuple TwoRoundScheme::alice_round1(Rng& rng) const { return forward_book_.sample(rng); }

int TwoRoundScheme::bob_decode_radius() const {
    if (kind_ == SchemeKind::direct) return params_.t;
    return std::max(params_.d - params_.t - 1, 0);
}

std::pair<int, std::optional<LinkTuple>> TwoRoundScheme::classify_forward(const LinkTuple& x_received) const {
    const auto outcome = bounded_distance_decode(forward_book_, x_received, bob_decode_radius());
    int branch = 0;
    std::optional<LinkTuple> x_decoded;
    if (outcome.decoded()) {
        branch = kind_ == SchemeKind::direct ? 0 : outcome.num_errors;
        x_decoded = outcome.codeword;
        if (branch >= branch_count()) {
            throw ProtocolFailure("forward corruption exceeds the attack budget");
        }
    } else {
        switch (kind_) {
            case SchemeKind::direct:
                throw ProtocolFailure("forward decode failed under the declared budget");
            case SchemeKind::branched:
                if (weakened_) {
                    // Degraded mode: trust the received tuple as-is. This is
                    // the knob negative-control verification turns.
                    branch = 0;
                    x_decoded = x_received;
                    break;
                }
                if (bucket_ < 0) throw ProtocolFailure("forward detection without a detection branch");
                branch = bucket_;
                break;
            case SchemeKind::detect_only:
                branch = bucket_;
                break;
        }
    }
    if (bucket_ >= 0 && branch == bucket_) x_decoded.reset();
    return {branch, std::move(x_decoded)};
}

TwoRoundScheme::BobTurn TwoRoundScheme::bob_round2(const LinkTuple& x_received, Rng& rng) const {
    auto [branch, x_decoded] = classify_forward(x_received);
    return BobTurn{branch, std::move(x_decoded), sample_backward(branch, rng)};
}

KeyTriple TwoRoundScheme::bob_key(int branch, const std::optional<LinkTuple>& x_decoded,
                                  const LinkTuple& y_sent) const {
    if (branch < 0 || branch >= branch_count()) throw ParameterError("branch index out of range");
    const bool detection = has_detection_branch() && branch == bucket_;
    if (detection && x_decoded) throw ParameterError("detection branch carries no forward tuple");
    if (!detection && !x_decoded) throw ParameterError("non-detection branch requires the decoded forward tuple");
    KeyTriple key;
    key.k_o = branch;
    key.k_a = detection ? std::nullopt : x_decoded;
    key.k_b = branch_keys_on_backward(branch) ? std::optional<LinkTuple>(y_sent) : std::nullopt;
    return key;
}

LinkTuple TwoRoundScheme::extend_with_prefix(int branch, const LinkTuple& suffix_word) const {
    std::vector<Message> out;
    out.reserve(static_cast<std::size_t>(suffix_word.n()));
    for (const auto& msg : suffix_word.messages()) {
        out.push_back(ell_ == 0 ? msg : Message::with_prefix(ell_, static_cast<std::uint32_t>(branch), msg));
    }
    return LinkTuple(std::move(out));
}

LinkTuple TwoRoundScheme::sample_backward(int branch, Rng& rng) const {
    return extend_with_prefix(branch, suffix_book(branch).sample(rng));
}

std::optional<LinkTuple> TwoRoundScheme::decode_backward(int branch, const LinkTuple& y_received) const {
    if (y_received.n() != params_.n2 || y_received.m() != params_.m) {
        throw ParameterError("received backward tuple has the wrong shape");
    }
    const int radius = params_.t - branch;
    if (radius < 0) return std::nullopt;
    const auto& book = suffix_book(branch);

    // Links whose prefix disagrees with the branch tag are errors no matter
    // which codeword we compare against; treat them as erasures for the
    // suffix code. With ell = 0 (direct) the mask stays empty.
    std::vector<char> wrong(static_cast<std::size_t>(params_.n2), 0);
    std::vector<std::uint32_t> suffix(static_cast<std::size_t>(params_.n2));
    for (int j = 0; j < params_.n2; ++j) {
        if (ell_ != 0 && y_received.at(j).prefix(ell_) != static_cast<std::uint32_t>(branch)) {
            wrong[static_cast<std::size_t>(j)] = 1;
        }
        suffix[static_cast<std::size_t>(j)] = ell_ == 0 ? y_received.value(j) : y_received.at(j).suffix(ell_);
    }
    auto hit = unique_decode_with_erasures(book, LinkTuple(params_.m - ell_, suffix), wrong, radius);
    if (!hit) return std::nullopt;
    return extend_with_prefix(branch, *hit);
}

KeyTriple TwoRoundScheme::alice_finalize(const LinkTuple& x_sent, const LinkTuple& y_received) const {
    if (kind_ == SchemeKind::detect_only) {
        if (auto y = decode_backward(bucket_, y_received)) {
            KeyTriple key;
            key.k_o = bucket_;
            key.k_b = std::move(y);
            return key;
        }
        KeyTriple key;
        key.k_o = 0;
        key.k_a = x_sent;
        return key;
    }
    std::optional<int> branch;
    std::optional<LinkTuple> y;
    for (int i = 0; i < branch_count(); ++i) {
        if (auto dec = decode_backward(i, y_received)) {
            if (branch) throw ProtocolFailure("two branches decode the backward tuple");
            branch = i;
            y = dec;
        }
    }
    if (!branch) throw ProtocolFailure("no branch decodes the backward tuple");
    KeyTriple key;
    key.k_o = *branch;
    const bool detection = has_detection_branch() && *branch == bucket_;
    if (!detection) key.k_a = x_sent;
    if (branch_keys_on_backward(*branch)) key.k_b = y;
    return key;
}

Transcript TwoRoundScheme::run(Rng& rng, const AttackProfile& attack) const {
    const std::uint64_t nonce = rng.next();
    Rng alice_rng = Rng(nonce).derive("alice");
    Rng bob_rng = Rng(nonce).derive("bob");
    return run(alice_rng, bob_rng, attack);
}

Transcript TwoRoundScheme::run(Rng& alice_rng, Rng& bob_rng, const AttackProfile& attack) const {
    Transcript tr;
    tr.scheme = kind_;
    tr.params = params_;
    tr.x_sent = alice_round1(alice_rng);
    tr.x_received = apply_replacements(tr.x_sent, attack.forward);
    const auto turn = bob_round2(tr.x_received, bob_rng);
    tr.bob_branch = turn.branch;
    tr.y_sent = turn.y_sent;
    tr.y_received = apply_replacements(tr.y_sent, attack.backward);
    tr.forward_attacks = link_distance(tr.x_sent, tr.x_received);
    tr.backward_attacks = link_distance(tr.y_sent, tr.y_received);
    tr.key_bob = bob_key(turn.branch, turn.x_decoded, turn.y_sent);
    tr.key_alice = alice_finalize(tr.x_sent, tr.y_received);
    return tr;
}

std::string key_fingerprint(const KeyTriple& key) {
    std::string out = std::to_string(key.k_o);
    out += '|';
    out += key.k_a ? key.k_a->to_hex() : "-";
    out += '|';
    out += key.k_b ? key.k_b->to_hex() : "-";
    return out;
}

// ---------------------------------------------------------------- presets

Preset preset_config(std::string_view name, int m) {
    if (name == "example1") return {SchemeKind::direct, {m, 3, 3, 1, 3}};
    if (name == "example2") return {SchemeKind::branched, {m, 3, 3, 1, 2}};
    if (name == "example3") return {SchemeKind::detect_only, {m, 2, 2, 1, 2}};
    throw ParameterError("unknown preset '" + std::string(name) + "'");
}

std::vector<std::string> preset_names() { return {"example1", "example2", "example3"}; }

}  // namespace keyagree
