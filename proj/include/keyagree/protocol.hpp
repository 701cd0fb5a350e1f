#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "keyagree/attack.hpp"
#include "keyagree/caps.hpp"
#include "keyagree/codes.hpp"
#include "keyagree/rng.hpp"

namespace keyagree {

enum class SchemeKind {
    // Both directions independently ship a key part behind a
    // distance-(2t+1) code.
    direct,
    // Bob grades the forward corruption and signals the branch in a message
    // prefix; the backward code is matched to the leftover budget.
    branched,
    // Branch signaling when the backward direction is too short to correct
    // the full leftover budget (n2 = 2t): the clean branch keys on the
    // forward tuple only.
    detect_only,
};

const char* scheme_name(SchemeKind kind);
std::optional<SchemeKind> scheme_from_name(std::string_view name);

struct SchemeParams {
    int m = 0;   // bits per message
    int n1 = 0;  // forward links
    int n2 = 0;  // backward links
    int t = 0;   // total attack budget
    int d = 0;   // forward code distance (branched/detect_only)
};

// The agreed key. k_a is absent (sentinel) on the detection branch; k_b is
// absent only in the detect-only scheme's clean branch, where the backward
// tuple cannot be recovered against the leftover budget.
struct KeyTriple {
    int k_o = 0;
    std::optional<LinkTuple> k_a;
    std::optional<LinkTuple> k_b;

    friend bool operator==(const KeyTriple&, const KeyTriple&) = default;
};

// Compact stable encoding, usable as a map key.
std::string key_fingerprint(const KeyTriple& key);

struct Transcript {
    SchemeKind scheme = SchemeKind::branched;
    SchemeParams params;
    LinkTuple x_sent, x_received, y_sent, y_received;
    int bob_branch = 0;
    KeyTriple key_alice, key_bob;
    int forward_attacks = 0;   // realized replacement counts
    int backward_attacks = 0;

    bool agreed() const { return key_alice == key_bob; }
};

// A fully constructed two-round scheme: the forward codebook plus one
// backward codebook per branch. Immutable; runs are pure given a stream.
class TwoRoundScheme {
public:
    TwoRoundScheme(SchemeKind kind, const SchemeParams& params, const Caps& caps = default_caps(),
                   bool weakened_ok = false);
    // Same, with caller-supplied backward suffix codebooks (validated against
    // the branch layout; ParameterError when malformed).
    TwoRoundScheme(SchemeKind kind, const SchemeParams& params, std::vector<Codebook> suffix_books,
                   const Caps& caps = default_caps(), bool weakened_ok = false);

    SchemeKind kind() const { return kind_; }
    const SchemeParams& params() const { return params_; }
    int prefix_bits() const { return ell_; }

    // Branch indices are contiguous 0..branch_count()-1; the last one is the
    // detection bucket when it exists.
    int branch_count() const { return static_cast<int>(suffix_books_.size()); }
    bool has_detection_branch() const { return bucket_ >= 0; }
    int detection_branch() const { return bucket_; }
    const Codebook& forward_book() const { return forward_book_; }
    const Codebook& suffix_book(int branch) const;
    int backward_distance(int branch) const;
    bool branch_keys_on_backward(int branch) const;

    // Key-space size (bits) of the branch-conditional key.
    std::int64_t branch_key_log2(int branch) const;

    LinkTuple alice_round1(Rng& rng) const;

    // Bob's deterministic part of round 2: grade the forward corruption into
    // a branch; the decoded tuple is absent on the detection branch.
    // ProtocolFailure only under over-budget corruption.
    std::pair<int, std::optional<LinkTuple>> classify_forward(const LinkTuple& x_received) const;

    struct BobTurn {
        int branch = 0;
        std::optional<LinkTuple> x_decoded;  // absent on the detection branch
        LinkTuple y_sent;
    };
    BobTurn bob_round2(const LinkTuple& x_received, Rng& rng) const;

    KeyTriple bob_key(int branch, const std::optional<LinkTuple>& x_decoded, const LinkTuple& y_sent) const;

    // Recovers Bob's branch and backward tuple from the received one by
    // trying every branch at its budget-matched radius. Exactly one branch
    // may decode; anything else is a ProtocolFailure (unreachable under
    // budget-respecting attacks).
    KeyTriple alice_finalize(const LinkTuple& x_sent, const LinkTuple& y_received) const;

    // One full execution. The single-stream form splits the master stream
    // into independent per-party child streams.
    Transcript run(Rng& rng, const AttackProfile& attack) const;
    Transcript run(Rng& alice_rng, Rng& bob_rng, const AttackProfile& attack) const;

    // Backward tuple for a branch: the branch tag as an ell-bit prefix on
    // every message, suffix from the branch codebook.
    LinkTuple extend_with_prefix(int branch, const LinkTuple& suffix_word) const;
    LinkTuple sample_backward(int branch, Rng& rng) const;

    // Branch decode of a received backward tuple at radius t - branch.
    std::optional<LinkTuple> decode_backward(int branch, const LinkTuple& y_received) const;

private:
    void build_books(const Caps& caps);
    void validate(bool weakened_ok) const;
    void validate_books() const;
    int bob_decode_radius() const;

    SchemeKind kind_;
    SchemeParams params_;
    int ell_ = 0;
    int bucket_ = -1;  // detection branch index, -1 when unreachable
    bool weakened_ = false;
    Codebook forward_book_;
    std::vector<Codebook> suffix_books_;
};

// Named configurations from the worked examples; m stays caller-chosen.
struct Preset {
    SchemeKind kind;
    SchemeParams params;
};

Preset preset_config(std::string_view name, int m);
std::vector<std::string> preset_names();

}  // namespace keyagree
