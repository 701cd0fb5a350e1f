#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "keyagree/caps.hpp"
#include "keyagree/errors.hpp"
#include "keyagree/gf2m.hpp"
#include "keyagree/rng.hpp"

namespace keyagree {

// One m-bit message carried on a single link. Bit 0 is the first (most
// significant) bit of the message, so prefixes live in the high bits of
// `value`.
struct Message {
    int m = 0;
    std::uint32_t value = 0;

    Message() = default;
    Message(int m_bits, std::uint32_t v);

    bool bit(int i) const { return ((value >> (m - 1 - i)) & 1u) != 0; }
    // First `l` bits as an integer.
    std::uint32_t prefix(int l) const { return value >> (m - l); }
    // Remaining m - l bits.
    std::uint32_t suffix(int l) const { return value & ((std::uint32_t{1} << (m - l)) - 1); }
    // Prepend an l-bit prefix to a message, producing an (l + suf.m)-bit one.
    static Message with_prefix(int l, std::uint32_t pre, const Message& suf);

    friend bool operator==(const Message&, const Message&) = default;
    friend auto operator<=>(const Message&, const Message&) = default;
};

// One round of traffic: an ordered tuple of n messages, one per link.
class LinkTuple {
public:
    LinkTuple() = default;
    LinkTuple(int m, std::span<const std::uint32_t> values);
    LinkTuple(int m, std::initializer_list<std::uint32_t> values);
    explicit LinkTuple(std::vector<Message> messages);  // all must share m

    int n() const { return static_cast<int>(messages_.size()); }
    int m() const { return m_; }
    const Message& at(int i) const { return messages_[static_cast<std::size_t>(i)]; }
    std::uint32_t value(int i) const { return messages_[static_cast<std::size_t>(i)].value; }
    const std::vector<Message>& messages() const { return messages_; }

    LinkTuple with_message(int link, Message replacement) const;

    // Concatenated bits (message 0 first, each MSB-first), zero-padded to a
    // nibble boundary, lowercase hex.
    std::string to_hex() const;
    static LinkTuple from_hex(int n, int m, std::string_view hex);

    friend bool operator==(const LinkTuple&, const LinkTuple&) = default;
    friend auto operator<=>(const LinkTuple&, const LinkTuple&) = default;

private:
    int m_ = 0;
    std::vector<Message> messages_;
};

// Number of link positions where the tuples disagree. A corrupted message
// counts once no matter how many of its bits changed.
int link_distance(const LinkTuple& a, const LinkTuple& b);

enum class Construction { repetition, full, mds, explicit_list };

const char* construction_name(Construction c);
std::optional<Construction> construction_from_name(std::string_view name);

struct DecodeOutcome {
    enum class Kind { clean, corrected, detected };

    Kind kind = Kind::detected;
    std::optional<LinkTuple> codeword;  // set for clean/corrected
    int num_errors = 0;

    static DecodeOutcome Clean(LinkTuple cw) { return {Kind::clean, std::move(cw), 0}; }
    static DecodeOutcome Corrected(LinkTuple cw, int errors) { return {Kind::corrected, std::move(cw), errors}; }
    static DecodeOutcome Detected() { return {Kind::detected, std::nullopt, 0}; }

    bool decoded() const { return kind != Kind::detected; }
};

// A code over the 2^m-ary link alphabet with symbol-level (link) Hamming
// distance. Sizes are powers of two for the built-in constructions; large
// codebooks stay un-materialized and are handled algebraically. Immutable
// after construction.
class Codebook {
public:
    Codebook() = default;  // empty placeholder; use the build_* functions

    int n() const { return n_; }
    int m() const { return m_; }
    int declared_min_distance() const { return d_; }
    Construction construction() const { return tag_; }

    // log2 of the codebook size; exact by construction. For explicit lists
    // whose size is not a power of two this is unset.
    std::optional<std::int64_t> exact_log2_size() const { return log2_size_; }
    bool is_materialized() const { return materialized_; }
    std::uint64_t size() const;  // CapacityError when size exceeds 2^63

    const std::vector<LinkTuple>& codewords() const;  // CapacityError if not materialized

    bool contains(const LinkTuple& word) const;
    LinkTuple sample(Rng& rng) const;

    // Field backing an mds construction (unset otherwise).
    const std::optional<Gf2m>& field() const { return field_; }
    int message_symbols() const { return k_; }  // mds: n - d + 1

    friend Codebook build_repetition(int n, int m);
    friend Codebook build_full(int n, int m, const Caps& caps);
    friend Codebook build_mds(int n, int d, int m, const Caps& caps);
    friend Codebook make_explicit(int n, int m, int declared_d, std::vector<LinkTuple> words);

private:
    int n_ = 0;
    int m_ = 0;
    int d_ = 0;
    Construction tag_ = Construction::explicit_list;
    std::optional<Gf2m> field_;
    int k_ = 0;
    bool materialized_ = false;
    std::vector<LinkTuple> words_;
    std::optional<std::int64_t> log2_size_;
};

// All tuples repeating one message n times; minimum distance n.
Codebook build_repetition(int n, int m);

// The whole space of n-tuples; minimum distance 1. Guarded by the
// materialization cap (n*m bits).
Codebook build_full(int n, int m, const Caps& caps = default_caps());

// Evaluation (polynomial) code over GF(2^m): 2^{m(n-d+1)} codewords with
// minimum link distance exactly d. Requires 2^m >= n so that n distinct
// evaluation points exist; UnsupportedParameters otherwise. Coincides with
// build_repetition for d = n.
Codebook build_mds(int n, int d, int m, const Caps& caps = default_caps());

// Largest-available code of length n and minimum distance d: repetition for
// d = n, the full space for d = 1, an mds code otherwise.
Codebook build_a_code(int n, int d, int m, const Caps& caps = default_caps());

Codebook make_explicit(int n, int m, int declared_d, std::vector<LinkTuple> words);

// Brute-force pairwise minimum distance; the oracle validating declared
// distances. CapacityError above caps.distance_pairs.
int min_distance(const Codebook& cb, const Caps& caps = default_caps());

// Nearest-codeword decoding restricted to the given radius. A received word
// that is itself a codeword reports Clean. Otherwise, if exactly one codeword
// lies within the radius it is returned as Corrected; ambiguity (or an empty
// ball) reports Detected. Never guesses.
DecodeOutcome bounded_distance_decode(const Codebook& cb, const LinkTuple& received, int radius);

// Exact log2 |cb|; ParameterError for explicit lists of non-power-of-two size.
std::int64_t codebook_log2_size(const Codebook& cb);

// Unique codeword within `radius` of `word`, where positions flagged in
// `forced_errors` count as mismatches regardless of the codeword's value
// there (erasure-style side information). Returns nullopt when no codeword
// qualifies or several do. With radius <= (d-1)/2 the qualifying codeword is
// unique whenever it exists.
std::optional<LinkTuple> unique_decode_with_erasures(const Codebook& cb, const LinkTuple& word,
                                                     std::span<const char> forced_errors, int radius);

}  // namespace keyagree
