#include "conjlab/fermat.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <stdexcept>

#include <boost/multiprecision/integer.hpp>

#include "conjlab/rng.hpp"

namespace conjlab::fermat {

namespace mp = boost::multiprecision;

Triplet Triplet::validate(long long a, long long b, long long c) {
    if (a < 2) fail_validation("BadBase", "a must be >= 2");
    if (b < 2) fail_validation("BadExponentBase", "b must be >= 2");
    if (std::gcd(a, c) != 1) {
        fail_validation("NotCoprime", "gcd(a, c) must be 1, got gcd(" + std::to_string(a) + ", " +
                                          std::to_string(c) + ") = " +
                                          std::to_string(std::gcd(a, c)));
    }
    Triplet t;
    t.a = a;
    t.b = b;
    t.c = c;
    return t;
}

std::string Triplet::key() const {
    return std::to_string(a) + "," + std::to_string(b) + "," + std::to_string(c);
}

void PrimalityPolicy::validate() const {
    if (trial_bound < 2 || trial_bound > 100000000ULL) {
        fail_validation("BadPolicy", "trial_bound must be in [2, 1e8]");
    }
    if (mr_rounds < 0 || mr_rounds > 10000) {
        fail_validation("BadPolicy", "mr_rounds must be in [0, 10000]");
    }
    if (max_bits < 8 || max_bits > (1ULL << 31)) {
        fail_validation("BadPolicy", "max_bits must be in [8, 2^31]");
    }
}

std::uint64_t PrimalityPolicy::fingerprint() const {
    std::uint64_t h = 0x636f6e6a6c616221ULL;
    h = hash_accumulate(h, trial_bound);
    h = hash_accumulate(h, static_cast<std::uint64_t>(mr_rounds));
    h = hash_accumulate(h, max_bits);
    return h;
}

namespace {

const std::vector<std::uint32_t>& primes_up_to(std::uint64_t bound) {
    static std::mutex mu;
    static std::map<std::uint64_t, std::unique_ptr<std::vector<std::uint32_t>>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(bound);
    if (it != cache.end()) return *it->second;

    auto primes = std::make_unique<std::vector<std::uint32_t>>();
    std::vector<bool> sieve(bound + 1, true);
    for (std::uint64_t i = 2; i <= bound; ++i) {
        if (!sieve[i]) continue;
        primes->push_back(static_cast<std::uint32_t>(i));
        for (std::uint64_t j = i * i; j <= bound; j += i) sieve[j] = false;
    }
    return *cache.emplace(bound, std::move(primes)).first->second;
}

// Smallest prime factor <= 10^6, or 0 if none was found in that range.
long long small_factor(long long n, long long limit = 1000000) {
    if (n < 2) return 0;
    for (long long p = 2; p <= limit && p * p <= n; p = (p == 2 ? 3 : p + 2)) {
        if (n % p == 0) return p;
    }
    return 0;
}

long long odd_part(long long n) {
    while (n % 2 == 0) n /= 2;
    return n;
}

// b^k as a machine integer; 0 on overflow past "cap".
std::uint64_t pow_checked(long long b, int k, std::uint64_t cap) {
    std::uint64_t e = 1;
    const std::uint64_t ub = static_cast<std::uint64_t>(b);
    for (int i = 0; i < k; ++i) {
        if (e > cap / ub) return 0;
        e *= ub;
    }
    return e;
}

std::uint64_t predicted_bits(const Triplet& t, int k) {
    // floor(b^k * log2(a)) + 1; saturates when the exponent alone overflows.
    const std::uint64_t e = pow_checked(t.b, k, std::uint64_t(1) << 62);
    if (e == 0) return std::numeric_limits<std::uint64_t>::max();
    const long double bits = static_cast<long double>(e) * std::log2(static_cast<long double>(t.a));
    if (bits >= 1e18L) return std::numeric_limits<std::uint64_t>::max();
    return static_cast<std::uint64_t>(bits) + 1;
}

}  // namespace

TowerOutcome tower_value(const Triplet& t, int k, std::uint64_t max_bits) {
    if (k < 0) fail_validation("BadIndex", "k must be >= 0");
    TowerOutcome out;
    out.predicted_bits = predicted_bits(t, k);
    if (out.predicted_bits > max_bits) return out;

    const std::uint64_t e = pow_checked(t.b, k, max_bits);  // fits: e <= e*log2(a) <= max_bits
    BigInt value = mp::pow(BigInt(t.a), static_cast<unsigned>(e)) + t.c;
    TowerValue tv;
    tv.k = k;
    tv.bit_length = value > 0 ? static_cast<std::uint64_t>(mp::msb(value)) + 1 : 0;
    tv.value = std::move(value);
    out.value = std::move(tv);
    return out;
}

const char* to_string(FilterReason r) {
    switch (r) {
        case FilterReason::Parity: return "Parity";
        case FilterReason::PlusOneForm: return "PlusOneForm";
        case FilterReason::MinusOneForm: return "MinusOneForm";
    }
    return "?";
}

const char* to_string(Status s) {
    switch (s) {
        case Status::Prime: return "Prime";
        case Status::ProbablePrime: return "ProbablePrime";
        case Status::Composite: return "Composite";
        case Status::NonCandidate: return "NonCandidate";
        case Status::Skipped: return "Skipped";
    }
    return "?";
}

std::optional<FilterFinding> algebraic_filter(const Triplet& t, int k) {
    // (i) odd + odd is even.
    if (t.a % 2 != 0 && t.c % 2 != 0) {
        return FilterFinding{FilterReason::Parity, 0};
    }
    // (ii) a^m + 1 with an odd divisor d of m splits as (a^(m/d))^d + 1.
    if (t.c == 1 && k >= 1) {
        const long long rest = odd_part(t.b);
        if (rest > 1) {
            const long long p = small_factor(rest);
            return FilterFinding{FilterReason::PlusOneForm, p != 0 ? p : rest};
        }
    }
    // (iii) a - 1 divides a^m - 1; and d | m gives a^d - 1 | a^m - 1.
    if (t.c == -1) {
        if (t.a > 2 && k >= 1) {
            return FilterFinding{FilterReason::MinusOneForm, 0};
        }
        if (t.a == 2) {
            if (k >= 2) {
                return FilterFinding{FilterReason::MinusOneForm, t.b};
            }
            if (k == 1) {
                const long long p = small_factor(t.b);
                if (p != 0 && p != t.b) {
                    return FilterFinding{FilterReason::MinusOneForm, p};
                }
            }
        }
    }
    return std::nullopt;
}

std::optional<BigInt> claimed_divisor(const Triplet& t, int k, const FilterFinding& f,
                                      std::uint64_t max_bits) {
    switch (f.reason) {
        case FilterReason::Parity:
            return BigInt(2);
        case FilterReason::PlusOneForm: {
            const std::uint64_t m = pow_checked(t.b, k, std::uint64_t(1) << 62);
            if (m == 0 || f.split <= 0) return std::nullopt;
            const std::uint64_t quot = m / static_cast<std::uint64_t>(f.split);
            const long double bits =
                static_cast<long double>(quot) * std::log2(static_cast<long double>(t.a));
            if (bits + 1 > static_cast<long double>(max_bits)) return std::nullopt;
            return mp::pow(BigInt(t.a), static_cast<unsigned>(quot)) + 1;
        }
        case FilterReason::MinusOneForm: {
            if (f.split == 0) return BigInt(t.a) - 1;
            if (static_cast<std::uint64_t>(f.split) + 1 > max_bits) return std::nullopt;
            return (BigInt(1) << static_cast<unsigned>(f.split)) - 1;
        }
    }
    return std::nullopt;
}

const BigInt& deterministic_mr_threshold() {
    // Largest bound published for the first-12-primes base set.
    static const BigInt limit("3317044064679887385961981");
    return limit;
}

namespace {

constexpr std::uint32_t kFixedBases[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

bool strong_probable_prime(const BigInt& n, const BigInt& base_in) {
    const BigInt base = base_in % n;
    if (base <= 1 || base == n - 1) return true;
    BigInt d = n - 1;
    unsigned s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    BigInt x = mp::powm(base, d, n);
    if (x == 1 || x == n - 1) return true;
    for (unsigned i = 1; i < s; ++i) {
        x = mp::powm(x, BigInt(2), n);
        if (x == n - 1) return true;
    }
    return false;
}

}  // namespace

PrimalityVerdict primality(const TowerValue& v, const PrimalityPolicy& policy) {
    policy.validate();
    PrimalityVerdict verdict;
    if (v.value <= 1) {
        verdict.status = Status::NonCandidate;
        return verdict;
    }

    const auto& primes = primes_up_to(policy.trial_bound);
    bool covered = false;
    if (v.value <= std::numeric_limits<std::uint64_t>::max()) {
        const std::uint64_t val = v.value.convert_to<std::uint64_t>();
        for (std::uint32_t p : primes) {
            const std::uint64_t pp = static_cast<std::uint64_t>(p) * p;
            if (pp > val) {
                covered = true;
                break;
            }
            if (val % p == 0) {
                verdict.status = Status::Composite;
                verdict.factor = std::to_string(p);
                return verdict;
            }
        }
        if (!covered) {
            const unsigned __int128 tb = policy.trial_bound;
            covered = tb * tb >= val;
        }
    } else {
        for (std::uint32_t p : primes) {
            if (mp::integer_modulus(v.value, p) == 0) {
                verdict.status = Status::Composite;
                verdict.factor = std::to_string(p);
                return verdict;
            }
        }
    }
    if (covered) {
        verdict.status = Status::Prime;
        return verdict;
    }

    for (std::uint32_t b : kFixedBases) {
        ++verdict.rounds;
        if (!strong_probable_prime(v.value, BigInt(b))) {
            verdict.status = Status::Composite;
            verdict.witness = std::to_string(b);
            return verdict;
        }
    }
    if (v.value < deterministic_mr_threshold()) {
        verdict.status = Status::Prime;
        verdict.rounds = 0;  // decided deterministically
        return verdict;
    }

    SplitMix64 rng(policy.fingerprint());
    for (int i = 0; i < policy.mr_rounds; ++i) {
        const BigInt base = 2 + BigInt(rng.next()) % (v.value - 3);
        ++verdict.rounds;
        if (!strong_probable_prime(v.value, base)) {
            verdict.status = Status::Composite;
            verdict.witness = base.str();
            return verdict;
        }
    }
    verdict.status = Status::ProbablePrime;
    return verdict;
}

VerdictEntry evaluate_k(const Triplet& t, int k, const PrimalityPolicy& policy) {
    policy.validate();
    VerdictEntry entry;
    entry.k = k;
    entry.predicted_bits = predicted_bits(t, k);

    const auto finding = algebraic_filter(t, k);
    if (finding) {
        entry.verdict.filter = to_string(finding->reason);
        // The parity form admits the prime 2 itself (and, with c < 0, values
        // <= 1); settle those exactly while the value is still tiny.
        if (finding->reason == FilterReason::Parity && entry.predicted_bits <= 64) {
            const TowerOutcome tv = tower_value(t, k, 128);
            const BigInt& val = tv.value->value;
            if (val <= 1) {
                entry.verdict.status = Status::NonCandidate;
                return entry;
            }
            if (val == 2) {
                entry.verdict.status = Status::Prime;
                return entry;
            }
        }
        entry.verdict.status = Status::Composite;
        if (const auto div = claimed_divisor(t, k, *finding, 512)) {
            entry.verdict.factor = div->str();
        }
        return entry;
    }

    const TowerOutcome tv = tower_value(t, k, policy.max_bits);
    if (!tv.value) {
        entry.verdict.status = Status::Skipped;
        entry.verdict.skip_reason = "ExceedsBitLimit";
        return entry;
    }
    entry.verdict = primality(*tv.value, policy);
    return entry;
}

bool SearchRecord::filter_hit_at(int k) const {
    for (const auto& r : filter_hits) {
        if (k >= r.k_from && k <= r.k_to) return true;
    }
    return false;
}

void SearchRecord::check_consistency() const {
    if (!prime_positions.empty()) {
        if (!k0 || *k0 != prime_positions.front()) {
            throw std::logic_error("SearchRecord: k0 does not match first prime position");
        }
    } else if (k0) {
        throw std::logic_error("SearchRecord: k0 present without prime positions");
    }
    for (int i = 0; i < streak_length; ++i) {
        if (i >= static_cast<int>(prime_positions.size()) || prime_positions[static_cast<std::size_t>(i)] != i) {
            throw std::logic_error("SearchRecord: streak is not a prime-position prefix");
        }
    }
    if (!streak_truncated && streak_length <= k_max) {
        if (streak_length < static_cast<int>(prime_positions.size()) &&
            prime_positions[static_cast<std::size_t>(streak_length)] == streak_length) {
            throw std::logic_error("SearchRecord: streak is not maximal");
        }
    }
}

nlohmann::ordered_json SearchRecord::to_json(bool with_timing) const {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["record_type"] = "search";
    j["triplet"] = {{"a", triplet.a}, {"b", triplet.b}, {"c", triplet.c}};
    j["k_max"] = k_max;
    j["k0"] = k0 ? nlohmann::ordered_json(*k0) : nlohmann::ordered_json();
    j["streak_length"] = streak_length;
    j["streak_truncated"] = streak_truncated;
    j["prime_positions"] = prime_positions;
    j["skipped_count"] = skipped_count;
    nlohmann::ordered_json hits = nlohmann::ordered_json::array();
    for (const auto& h : filter_hits) {
        hits.push_back({{"k_from", h.k_from}, {"k_to", h.k_to}, {"reason", to_string(h.reason)}});
    }
    j["filter_hits"] = hits;
    nlohmann::ordered_json verdicts_json = nlohmann::ordered_json::array();
    for (const auto& e : verdicts) {
        nlohmann::ordered_json v;
        v["k"] = e.k;
        v["predicted_bits"] = e.predicted_bits;
        v["status"] = to_string(e.verdict.status);
        v["rounds"] = e.verdict.rounds;
        if (e.verdict.factor) v["factor"] = *e.verdict.factor;
        if (e.verdict.witness) v["witness"] = *e.verdict.witness;
        if (e.verdict.skip_reason) v["skip_reason"] = *e.verdict.skip_reason;
        if (e.verdict.filter) v["filter"] = *e.verdict.filter;
        verdicts_json.push_back(v);
    }
    j["verdicts"] = verdicts_json;
    j["policy"] = {{"trial_bound", policy.trial_bound},
                   {"mr_rounds", policy.mr_rounds},
                   {"max_bits", policy.max_bits},
                   {"fingerprint", policy.fingerprint()}};
    if (with_timing) j["timing_ms"] = timing_ms;
    return j;
}

SearchRecord scan_triplet(const Triplet& t, int k_max, const PrimalityPolicy& policy) {
    if (k_max < 0) fail_validation("BadIndex", "k_max must be >= 0");
    const auto t0 = std::chrono::steady_clock::now();

    SearchRecord rec;
    rec.triplet = t;
    rec.k_max = k_max;
    rec.policy = policy;

    std::optional<FilterReason> open_reason;
    int open_from = 0;
    auto close_range = [&](int upto) {
        if (open_reason) {
            rec.filter_hits.push_back({open_from, upto, *open_reason});
            open_reason.reset();
        }
    };

    for (int k = 0; k <= k_max; ++k) {
        VerdictEntry entry = evaluate_k(t, k, policy);
        const auto finding = algebraic_filter(t, k);
        if (finding) {
            if (!open_reason || *open_reason != finding->reason) {
                close_range(k - 1);
                open_reason = finding->reason;
                open_from = k;
            }
        } else {
            close_range(k - 1);
        }

        const Status st = entry.verdict.status;
        if (st == Status::Prime || st == Status::ProbablePrime) {
            rec.prime_positions.push_back(k);
        } else if (st == Status::Skipped) {
            ++rec.skipped_count;
        }
        rec.verdicts.push_back(std::move(entry));
    }
    close_range(k_max);

    for (int k = 0; k <= k_max; ++k) {
        const Status st = rec.verdicts[static_cast<std::size_t>(k)].verdict.status;
        if (st == Status::Prime || st == Status::ProbablePrime) {
            ++rec.streak_length;
        } else {
            rec.streak_truncated = st == Status::Skipped;
            break;
        }
    }
    if (!rec.prime_positions.empty()) rec.k0 = rec.prime_positions.front();

    rec.timing_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                        .count();
    rec.check_consistency();
    return rec;
}

SearchRecord find_k0(const Triplet& t, int k_max, const PrimalityPolicy& policy) {
    return scan_triplet(t, k_max, policy);
}

SearchRecord prime_streak(const Triplet& t, int k_max, const PrimalityPolicy& policy) {
    return scan_triplet(t, k_max, policy);
}

SearchRecord prime_positions(const Triplet& t, int k_max, const PrimalityPolicy& policy) {
    return scan_triplet(t, k_max, policy);
}

std::vector<Triplet> sweep_plan(SweepRange a, SweepRange b, SweepRange c,
                                const std::function<void(const std::string&)>& skip_diag) {
    for (const auto& [name, r] :
         {std::pair{"a", a}, std::pair{"b", b}, std::pair{"c", c}}) {
        if (r.lo > r.hi) {
            fail_validation("BadRange", std::string("empty range for ") + name);
        }
    }
    std::vector<Triplet> plan;
    for (long long va = a.lo; va <= a.hi; ++va) {
        for (long long vb = b.lo; vb <= b.hi; ++vb) {
            for (long long vc = c.lo; vc <= c.hi; ++vc) {
                try {
                    plan.push_back(Triplet::validate(va, vb, vc));
                } catch (const Error& e) {
                    if (skip_diag) {
                        skip_diag("skipping (" + std::to_string(va) + "," + std::to_string(vb) +
                                  "," + std::to_string(vc) + "): " + e.what());
                    }
                }
            }
        }
    }
    return plan;
}

int sweep(const std::vector<Triplet>& plan, int k_max, const PrimalityPolicy& policy,
          const std::function<bool(const Triplet&)>& already_done,
          const std::function<void(const SearchRecord&)>& sink) {
    int emitted = 0;
    for (const Triplet& t : plan) {
        if (already_done && already_done(t)) continue;
        sink(scan_triplet(t, k_max, policy));
        ++emitted;
    }
    return emitted;
}

}  // namespace conjlab::fermat
