#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "json.hpp"

#include "conjlab/error.hpp"

namespace conjlab::fermat {

using BigInt = boost::multiprecision::cpp_int;

// Base triplet of the tower P(k) = a^(b^k) + c. Only constructible through
// validate(), which enforces a >= 2, b >= 2 and gcd(a, c) = 1.
struct Triplet {
    long long a = 2;
    long long b = 2;
    long long c = 1;

    static Triplet validate(long long a, long long b, long long c);
    std::string key() const;  // "a,b,c"
};

struct PrimalityPolicy {
    std::uint64_t trial_bound = 100000;
    int mr_rounds = 24;
    std::uint64_t max_bits = 65536;

    void validate() const;
    // Stable hash of the three knobs; seeds the probabilistic witness draw
    // so ProbablePrime verdicts reproduce byte-for-byte.
    std::uint64_t fingerprint() const;
};

struct TowerValue {
    int k = 0;
    BigInt value;
    std::uint64_t bit_length = 0;  // 0 for values <= 0
};

struct TowerOutcome {
    std::optional<TowerValue> value;  // empty means skipped
    std::uint64_t predicted_bits = 0;
};

// Exact evaluation of P(k), or a skip when the predicted bit length
// b^k*log2(a)+1 exceeds max_bits. The tower never gets partially computed:
// the exponent is sized first.
TowerOutcome tower_value(const Triplet& t, int k, std::uint64_t max_bits);

enum class FilterReason { Parity, PlusOneForm, MinusOneForm };
const char* to_string(FilterReason r);

struct FilterFinding {
    FilterReason reason;
    // PlusOneForm: the odd divisor d of b^k used in the a^(m/d)+1 split.
    // MinusOneForm with a = 2: the prime q with 2^q-1 dividing the value.
    long long split = 0;
};

// Form-based compositeness check, decided before any big-integer work.
// A finding means P(k) is composite except possibly for the small prime 2
// (only the parity form admits that escape, and only for tiny values).
std::optional<FilterFinding> algebraic_filter(const Triplet& t, int k);

// The divisor the finding claims, when it fits within max_bits.
std::optional<BigInt> claimed_divisor(const Triplet& t, int k, const FilterFinding& f,
                                      std::uint64_t max_bits);

enum class Status { Prime, ProbablePrime, Composite, NonCandidate, Skipped };
const char* to_string(Status s);

struct PrimalityVerdict {
    Status status = Status::NonCandidate;
    std::optional<std::string> factor;       // smallest factor found (decimal)
    std::optional<std::string> witness;      // Miller-Rabin base that failed
    std::optional<std::string> skip_reason;  // "ExceedsBitLimit"
    std::optional<std::string> filter;       // filter name when decided by form
    int rounds = 0;                          // probabilistic rounds run
};

// Layered pipeline: trial division by primes up to trial_bound (decisive
// when trial_bound^2 covers the value), then Miller-Rabin with the fixed
// 12-prime base set (deterministic below its published threshold), then
// mr_rounds extra policy-seeded bases yielding ProbablePrime at best.
PrimalityVerdict primality(const TowerValue& v, const PrimalityPolicy& policy);

// Largest value the fixed Miller-Rabin base set decides exactly.
const BigInt& deterministic_mr_threshold();

struct VerdictEntry {
    int k = 0;
    std::uint64_t predicted_bits = 0;
    PrimalityVerdict verdict;
};

struct FilterHitRange {
    int k_from = 0;
    int k_to = 0;
    FilterReason reason;
};

struct SearchRecord {
    Triplet triplet;
    int k_max = 0;
    std::optional<int> k0;
    int streak_length = 0;
    bool streak_truncated = false;  // streak measurement ended on a skip
    std::vector<int> prime_positions;
    int skipped_count = 0;
    std::vector<FilterHitRange> filter_hits;
    std::vector<VerdictEntry> verdicts;
    PrimalityPolicy policy;
    double timing_ms = 0.0;

    bool filter_hit_at(int k) const;
    // k0/streak/positions coherence; throws std::logic_error on violation.
    void check_consistency() const;
    nlohmann::ordered_json to_json(bool with_timing) const;
};

// One evaluation step: filter first, then tower, then primality.
VerdictEntry evaluate_k(const Triplet& t, int k, const PrimalityPolicy& policy);

// Full scan of k = 0..k_max; every derived view below shares it, so the
// same record answers the first-prime, streak and density questions.
SearchRecord scan_triplet(const Triplet& t, int k_max, const PrimalityPolicy& policy);

SearchRecord find_k0(const Triplet& t, int k_max, const PrimalityPolicy& policy);
SearchRecord prime_streak(const Triplet& t, int k_max, const PrimalityPolicy& policy);
SearchRecord prime_positions(const Triplet& t, int k_max, const PrimalityPolicy& policy);

struct SweepRange {
    long long lo = 0;
    long long hi = 0;  // inclusive
};

// Lexicographic (a, b, c) plan over the ranges; invalid triplets are
// dropped and reported through skip_diag with their rejection reason.
std::vector<Triplet> sweep_plan(SweepRange a, SweepRange b, SweepRange c,
                                const std::function<void(const std::string&)>& skip_diag);

// Runs scan_triplet over the plan in order, emitting each record to sink.
// Items where already_done returns true are skipped (resume support).
// Returns the number of records emitted.
int sweep(const std::vector<Triplet>& plan, int k_max, const PrimalityPolicy& policy,
          const std::function<bool(const Triplet&)>& already_done,
          const std::function<void(const SearchRecord&)>& sink);

}  // namespace conjlab::fermat
