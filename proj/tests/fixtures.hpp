#pragma once

// Generator flags for the bundled fixtures under tests/data. Regenerating with
// these flags must reproduce the checked-in files byte for byte.

namespace sentmic::testing {

inline constexpr const char* kFixture200Dir = "fixture200";
inline constexpr const char* kFixture200Flags = "--days 200 --seed 1 --lag 2 --smooth 5 --signal 1.0 --drift 1.0";

inline constexpr const char* kFixture487Dir = "fixture487";
inline constexpr const char* kFixture487Flags = "--days 487 --seed 11 --lag 3 --smooth 10 --signal 1.0 --drift 1.0";

inline constexpr const char* kFixtureFiles[] = {"posts.csv", "prices.csv", "probs.csv", "lexicon.csv",
                                                "pipeline.conf"};

}  // namespace sentmic::testing
