#include <doctest.h>

#include <cmath>

#include "driftstream/detectors.hpp"
#include "driftstream/streams.hpp"
#include "helpers.hpp"

using namespace driftstream;
using namespace driftstream::testing;

TEST_CASE("adwin is stable on a constant stream") {
    AdwinDetector adwin;
    for (int i = 0; i < 10000; ++i)
        CHECK(adwin.update(0.0) == DriftSignal::Stable);
    CHECK(adwin.window_length() == 10000);
}

TEST_CASE("adwin bucket structure invariants") {
    AdwinDetector adwin;
    SeededRng rng(4);
    std::size_t violations = 0;
    for (int i = 1; i <= 10000; ++i) {
        adwin.update(rng.bernoulli(0.4) ? 1.0 : 0.0);
        const auto buckets = adwin.buckets_oldest_first();
        std::uint64_t total = 0;
        for (const auto& b : buckets) {
            if ((b.count & (b.count - 1)) != 0)  // counts are powers of two
                ++violations;
            total += b.count;
        }
        if (total != adwin.window_length())
            ++violations;
        // memory bound: M * (floor(log2(n)) + 1)
        const auto cap = static_cast<std::size_t>(
            adwin.config().max_buckets_per_level *
            (static_cast<int>(std::floor(std::log2(double(adwin.window_length())))) + 1));
        if (buckets.size() > cap)
            ++violations;
    }
    CHECK(violations == 0);
}

TEST_CASE("adwin detects the 0.2 -> 0.8 shift quickly and trims the window") {
    const auto stream = generate_bernoulli_stream({{0.2, 1000}, {0.8, 2000}}, 2024);
    AdwinDetector adwin;
    long first_drift = -1;
    for (std::size_t i = 0; i < stream.size(); ++i) {
        const auto signal = adwin.update(stream[i]);
        if (i < 1000) {
            CHECK(signal == DriftSignal::Stable);
        } else if (signal == DriftSignal::Drift && first_drift < 0) {
            first_drift = static_cast<long>(i);
            CHECK(adwin.window_length() < 1000);
        }
    }
    REQUIRE(first_drift >= 1000);
    CHECK(first_drift - 1000 <= 300);
}

TEST_CASE("adwin stays stable on an alternating 0/1 stream") {
    AdwinDetector adwin;
    std::vector<double> values;
    for (int i = 0; i < 10000; ++i) {
        const double v = i % 2;
        values.push_back(v);
        CHECK(adwin.update(v) == DriftSignal::Stable);
    }

    // oracle: no element-level split of a shorter prefix satisfies the cut
    // condition, so no bucket-level split can either
    const std::size_t n = 2000;
    std::vector<double> prefix_sum(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        prefix_sum[i + 1] = prefix_sum[i] + values[i];
    std::size_t violations = 0;
    for (std::size_t t = 2; t <= n; ++t) {
        for (std::size_t n0 = 1; n0 < t; ++n0) {
            const std::uint64_t n1 = t - n0;
            const double mean0 = prefix_sum[n0] / double(n0);
            const double mean1 = (prefix_sum[t] - prefix_sum[n0]) / double(n1);
            if (std::fabs(mean0 - mean1) >= AdwinDetector::cut_threshold(0.002, t, n0, n1))
                ++violations;
        }
    }
    CHECK(violations == 0);
}

TEST_CASE("adwin matches the naive mirror step for step") {
    const auto stream = generate_bernoulli_stream({{0.3, 1500}, {0.7, 1500}}, 8);
    AdwinDetector fast;
    NaiveAdwin slow;
    for (int v : stream) {
        const bool fast_drift = fast.update(v) == DriftSignal::Drift;
        const bool slow_drift = slow.update(v);
        REQUIRE(fast_drift == slow_drift);
        REQUIRE(fast.window_length() == slow.window_length());
    }
}

TEST_CASE("adwin rejects out-of-range values") {
    AdwinDetector adwin;
    CHECK_THROWS_AS(adwin.update(1.5), ConfigError);
    CHECK_THROWS_AS(adwin.update(-0.1), ConfigError);
    CHECK_THROWS_AS(AdwinDetector(AdwinConfig{0.0, 5}), ConfigError);
}

TEST_CASE("adwin reset restores a fresh detector") {
    const auto stream = generate_bernoulli_stream({{0.5, 500}}, 3);
    AdwinDetector warmed;
    for (int v : stream)
        warmed.update(v);
    warmed.reset();
    CHECK(warmed.window_length() == 0);

    AdwinDetector fresh;
    const auto replay = generate_bernoulli_stream({{0.5, 100}}, 4);
    for (int v : replay) {
        CHECK(warmed.update(v) == fresh.update(v));
        CHECK(warmed.window_length() == fresh.window_length());
        CHECK(warmed.window_sum() == fresh.window_sum());
    }
    CHECK(warmed.buckets_oldest_first().size() == fresh.buckets_oldest_first().size());
}

TEST_CASE("ddm is stable forever on an all-zero error stream") {
    DdmDetector ddm;
    for (int i = 0; i < 5000; ++i)
        CHECK(ddm.update(0) == DriftSignal::Stable);
}

TEST_CASE("ddm emits nothing before min_instances") {
    DdmDetector ddm;
    for (int i = 0; i < 29; ++i)
        CHECK(ddm.update(1) == DriftSignal::Stable);
}

TEST_CASE("ddm drift index on zeros-then-ones matches the recurrence oracle") {
    std::vector<int> errors(1000, 0);
    errors.insert(errors.end(), 200, 1);
    const auto oracle = ddm_oracle(errors);
    // degenerate minima (p_min = s_min = 0 after the clean prefix) force
    // Drift at the very first error, with no Warning step in between
    REQUIRE(oracle.first_drift == 1000);
    CHECK(oracle.first_warning == -1);

    DdmDetector ddm;
    long first_drift = -1, first_warning = -1;
    for (std::size_t i = 0; i < errors.size(); ++i) {
        const auto s = ddm.update(errors[i]);
        if (s == DriftSignal::Drift && first_drift < 0)
            first_drift = static_cast<long>(i);
        if (s == DriftSignal::Warning && first_warning < 0)
            first_warning = static_cast<long>(i);
    }
    CHECK(first_drift == oracle.first_drift);
    CHECK(first_warning == oracle.first_warning);
}

TEST_CASE("ddm warning strictly precedes drift on a noisy baseline") {
    // a nonzero baseline keeps s_min positive, so the warning band has width
    SeededRng rng(12);
    std::vector<int> errors;
    for (int i = 0; i < 1000; ++i)
        errors.push_back(rng.bernoulli(0.1) ? 1 : 0);
    for (int i = 0; i < 2000; ++i)
        errors.push_back(rng.bernoulli(0.5) ? 1 : 0);

    const auto oracle = ddm_oracle(errors);
    REQUIRE(oracle.first_warning >= 0);
    REQUIRE(oracle.first_drift >= 0);
    CHECK(oracle.first_warning < oracle.first_drift);

    DdmDetector ddm;
    long first_drift = -1, first_warning = -1;
    for (std::size_t i = 0; i < errors.size(); ++i) {
        const auto s = ddm.update(errors[i]);
        if (s == DriftSignal::Warning && first_warning < 0)
            first_warning = static_cast<long>(i);
        if (s == DriftSignal::Drift && first_drift < 0)
            first_drift = static_cast<long>(i);
    }
    CHECK(first_warning == oracle.first_warning);
    CHECK(first_drift == oracle.first_drift);
    CHECK(first_warning < first_drift);
}

TEST_CASE("ddm agrees with the recurrence oracle on random streams") {
    for (int seed = 0; seed < 10; ++seed) {
        SeededRng rng(100 + seed);
        std::vector<int> errors;
        for (int i = 0; i < 800; ++i)
            errors.push_back(rng.bernoulli(0.15) ? 1 : 0);
        for (int i = 0; i < 800; ++i)
            errors.push_back(rng.bernoulli(0.6) ? 1 : 0);
        const auto oracle = ddm_oracle(errors);
        DdmDetector ddm;
        long first_drift = -1, first_warning = -1;
        for (std::size_t i = 0; i < errors.size(); ++i) {
            const auto s = ddm.update(errors[i]);
            if (s == DriftSignal::Warning && first_warning < 0)
                first_warning = static_cast<long>(i);
            if (s == DriftSignal::Drift && first_drift < 0)
                first_drift = static_cast<long>(i);
        }
        CHECK(first_warning == oracle.first_warning);
        CHECK(first_drift == oracle.first_drift);
    }
}

TEST_CASE("ddm reset clears warning state") {
    SeededRng rng(55);
    DdmDetector ddm;
    for (int i = 0; i < 500; ++i)
        ddm.update(rng.bernoulli(0.1) ? 1 : 0);
    ddm.reset();
    CHECK(ddm.instances() == 0);
    // fresh zeros after reset stay stable, identical to a new detector
    DdmDetector fresh;
    for (int i = 0; i < 100; ++i) {
        CHECK(ddm.update(0) == fresh.update(0));
        CHECK(ddm.error_rate() == fresh.error_rate());
    }
}

TEST_CASE("ddm input domain") {
    DdmDetector ddm;
    CHECK_THROWS_AS(ddm.update(2), ConfigError);
    CHECK_THROWS_AS(ddm.update(-1), ConfigError);
    CHECK_THROWS_AS(DdmDetector(DdmConfig{3.0, 2.0, 30}), ConfigError);
}
