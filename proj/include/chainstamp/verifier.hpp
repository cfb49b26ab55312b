#pragma once

// Independent verification of a timestamp. verify_with_bundle needs only the
// bundle and a copy of the chain; it has no access to the service's store.

#include "chainstamp/chain.hpp"
#include "chainstamp/ledger.hpp"

#include <optional>
#include <string>

namespace chainstamp {

enum class Verdict { verified, pending, mismatch, unknown };

std::string_view to_string(Verdict verdict) noexcept;

/// The checks, in the order they run.
enum class VerificationCheck {
    digest_in_batch = 1,
    aggregate_matches = 2,
    address_matches = 3,
    transaction_on_chain = 4,
    block_matches = 5,
    finality = 6,
};

struct VerifyPolicy {
    int finality_depth = kDefaultFinalityDepth;
    Satoshi dust_satoshi = 1;
};

struct VerificationReport {
    Verdict verdict = Verdict::unknown;
    std::optional<UtcSeconds> attested_time;
    int confirmations = 0;
    std::optional<VerificationCheck> failed_check;
    std::optional<std::string> failure_detail;

    /// "VERDICT=<verdict>"
    std::string verdict_line() const;
    /// Multi-line human-readable report ending with the verdict line.
    std::string render() const;
};

VerificationReport verify_with_bundle(const Digest32& content_digest, const ProofBundle& bundle, const Chain& chain,
                                      const VerifyPolicy& policy = {});

VerificationReport verify_document_bytes(ByteView content, const ProofBundle& bundle, const Chain& chain,
                                         const VerifyPolicy& policy = {});

/// Looks the digest up in the store, exports its bundle and delegates to
/// verify_with_bundle. Unknown digests yield Verdict::unknown; stamps not yet
/// in a block yield Verdict::pending.
VerificationReport verify_via_service(const Digest32& content_digest, const LedgerStore& store, const Chain& chain,
                                      const VerifyPolicy& policy = {});

} // namespace chainstamp
