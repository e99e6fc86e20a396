#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "dpsi/bins.hpp"
#include "dpsi/poly.hpp"

using namespace dpsi;

namespace {

const PrimeField M61 = PrimeField::mersenne61();
const EncodingParams ENC;

}  // namespace

TEST(Bins, EncodeDecodeExamples) {
    EXPECT_EQ(encode_element(5, ENC, M61).value(), 370010u);
    EXPECT_EQ(decode_valid_root(FieldElement(370010, M61), ENC), std::optional<u64>(5));
    EXPECT_EQ(decode_valid_root(FieldElement(370011, M61), ENC), std::nullopt);
    EXPECT_EQ(decode_valid_root(FieldElement((u64{1} << 48) + 0xA55A, M61), ENC), std::nullopt);
    EXPECT_THROW(encode_element(u64{1} << 32, ENC, M61), ParameterError);
    std::mt19937_64 rng(1);
    for (int i = 0; i < 1000; ++i) {
        u64 s = rng() & 0xffffffffu;
        ASSERT_EQ(decode_valid_root(encode_element(s, ENC, M61), ENC), std::optional<u64>(s));
    }
    EXPECT_EQ(decode_valid_root(encode_element(0xffffffffu, ENC, M61), ENC), std::optional<u64>(0xffffffffu));
}

TEST(Bins, EncodingValidation) {
    EXPECT_NO_THROW(ENC.validate(M61));
    EXPECT_THROW(ENC.validate(PrimeField(65537)), ConfigError);
    EncodingParams bad_tag{32, 16, 0x10000};
    EXPECT_THROW(bad_tag.validate(M61), ConfigError);
    EncodingParams small{4, 4, 5};
    EXPECT_NO_THROW(small.validate(PrimeField(1021)));
}

TEST(Bins, AssignBinFrozenAndInRange) {
    auto params = HashTableParams::make(88, 10);
    // Reference values: tests/oracle/vectors.py.
    EXPECT_EQ(encode_element(7, ENC, M61).value(), 501082u);
    EXPECT_EQ(assign_bin(encode_element(7, ENC, M61), params), 11u);
    std::vector<std::size_t> expect{58, 38, 33, 25, 36, 70, 47, 11, 71, 26};
    for (u64 s = 0; s < 10; ++s) EXPECT_EQ(assign_bin(encode_element(s, ENC, M61), params), expect[s]);
}

TEST(Bins, AssignBinBalanced) {
    auto params = HashTableParams::make(16, 10);
    std::array<int, 16> load{};
    std::mt19937_64 rng(2);
    for (int i = 0; i < 10000; ++i) {
        auto j = assign_bin(FieldElement(rng(), M61), params);
        ASSERT_GE(j, 1u);
        ASSERT_LE(j, 16u);
        ++load[j - 1];
    }
    for (int l : load) {
        EXPECT_GT(l, 625 * 0.8);
        EXPECT_LT(l, 625 * 1.2);
    }
}

TEST(Bins, HashTableParams) {
    EXPECT_EQ(HashTableParams::make(2, 3).n, 7u);
    EXPECT_THROW(HashTableParams::make(0, 3), ConfigError);
    EXPECT_THROW(HashTableParams::make(2, 0), ConfigError);
    HashTableParams broken{2, 3, 6};
    EXPECT_THROW(broken.validate(), ConfigError);
}

TEST(Bins, BuildTableContract) {
    auto xs = sample_eval_points(21, Key::from_seed(1), ENC, M61);
    auto params = HashTableParams::make(8, 10);
    std::vector<u64> set{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
    auto t = build_table(set, params, ENC, Key::from_seed(2), xs, M61);
    std::set<u64> xset;
    for (auto x : xs) xset.insert(x.value());
    std::multiset<u64> real;
    for (std::size_t j = 0; j < 8; ++j) {
        ASSERT_EQ(t.bins[j].size(), 10u);
        for (std::size_t k = 0; k < 10; ++k) {
            auto e = t.bins[j][k];
            EXPECT_EQ(xset.count(e.value()), 0u);
            auto dec = decode_valid_root(e, ENC);
            EXPECT_EQ(dec.has_value(), static_cast<bool>(t.real_mask[j][k]));
            if (dec) {
                real.insert(*dec);
                EXPECT_EQ(assign_bin(e, params), j + 1);
            }
        }
    }
    EXPECT_EQ(real, std::multiset<u64>(set.begin(), set.end()));
    auto again = build_table(set, params, ENC, Key::from_seed(2), xs, M61);
    EXPECT_EQ(again.bins, t.bins);
}

TEST(Bins, BuildTableEmptyAndErrors) {
    auto xs = sample_eval_points(7, Key::from_seed(1), ENC, M61);
    auto empty = build_table({}, HashTableParams::make(3, 3), ENC, Key::from_seed(3), xs, M61);
    for (const auto& b : empty.bins) {
        EXPECT_EQ(b.size(), 3u);
        for (auto e : b) EXPECT_FALSE(decode_valid_root(e, ENC));
    }
    std::vector<u64> five{1, 2, 3, 4, 5};
    try {
        build_table(five, HashTableParams::make(1, 3), ENC, Key::from_seed(3), xs, M61);
        FAIL() << "expected overflow";
    } catch (const OverflowError& e) {
        EXPECT_NE(std::string(e.what()).find("bin 1 overflow"), std::string::npos);
    }
    std::vector<u64> dup{4, 4};
    EXPECT_THROW(build_table(dup, HashTableParams::make(1, 3), ENC, Key::from_seed(3), xs, M61), ParameterError);
}

TEST(Bins, TauNeverVanishesOnEvaluationPoints) {
    std::mt19937_64 rng(4);
    Arith a(M61);
    for (int trial = 0; trial < 50; ++trial) {
        auto xs = sample_eval_points(7, Key::from_seed(rng()), ENC, M61);
        std::vector<u64> set;
        for (int i = 0; i < 3; ++i) set.push_back(rng() & 0xffffffff);
        auto t = build_table(set, HashTableParams::make(2, 3), ENC, Key::from_seed(rng()), xs, M61);
        for (const auto& bin : t.bins) {
            auto tau = poly_from_roots(bin, a);
            for (auto x : xs) ASSERT_FALSE(eval_horner(tau, x, a).is_zero());
        }
    }
}

TEST(Bins, SuggestBinCountFrozen) {
    // Reference values: scipy.stats.binom.sf with the union bound, fail probability 2^-30.
    const double fp = 0x1p-30;
    EXPECT_EQ(suggest_bin_count(10, 10, fp), 1u);
    EXPECT_EQ(suggest_bin_count(50, 10, fp), 88u);
    EXPECT_EQ(suggest_bin_count(64, 10, fp), 119u);
    EXPECT_EQ(suggest_bin_count(128, 10, fp), 266u);
    EXPECT_EQ(suggest_bin_count(256, 10, fp), 584u);
    EXPECT_EQ(suggest_bin_count(512, 10, fp), 1267u);
    EXPECT_EQ(suggest_bin_count(1024, 10, fp), 2737u);
    EXPECT_EQ(suggest_bin_count(4, 3, fp), 1024u);
    EXPECT_EQ(suggest_bin_count(8, 3, fp), 4220u);
    EXPECT_EQ(suggest_bin_count(16, 3, fp), 12500u);
}

TEST(Bins, SuggestBinCountIsMinimalAndNearLinear) {
    const double fp = 0x1p-30;
    for (std::size_t c : {1, 5, 10, 11, 30, 64, 200}) {
        auto h = suggest_bin_count(c, 10, fp);
        EXPECT_LE(overflow_bound(c, h, 10), fp);
        if (h > 1) EXPECT_GT(overflow_bound(c, h - 1, 10), fp);
    }
    std::size_t prev = suggest_bin_count(64, 10, fp);
    for (std::size_t c : {128, 256, 512}) {
        auto h = suggest_bin_count(c, 10, fp);
        double ratio = static_cast<double>(h) / static_cast<double>(prev);
        EXPECT_GE(ratio, 1.6);
        EXPECT_LE(ratio, 2.6);
        prev = h;
    }
    EXPECT_EQ(overflow_bound(5, 3, 10), 0.0L);
}

TEST(Bins, EvalPoints) {
    auto xs = sample_eval_points(41, Key::from_seed(9), ENC, M61);
    std::set<u64> s;
    for (auto x : xs) {
        s.insert(x.value());
        EXPECT_FALSE(decode_valid_root(x, ENC));
    }
    EXPECT_EQ(s.size(), 41u);
    EXPECT_EQ(sample_eval_points(41, Key::from_seed(9), ENC, M61), xs);
    EXPECT_NE(sample_eval_points(41, Key::from_seed(10), ENC, M61), xs);
    EXPECT_EQ(sample_eval_points(5, Key::from_seed(0), ENC, M61)[0].value(), 1784809450865780813ULL);
    EXPECT_EQ(sample_eval_points(5, Key::from_seed(0), ENC, M61)[4].value(), 1652552511919595504ULL);
}

TEST(Bins, ParseSetText) {
    EXPECT_EQ(parse_set_text("1\n2\n  3  \n# note\n\n4 # trailing\n"), (std::vector<u64>{1, 2, 3, 4}));
    EXPECT_EQ(parse_set_text(""), std::vector<u64>{});
    EXPECT_EQ(parse_set_text("5\r\n6\r\n"), (std::vector<u64>{5, 6}));
    EXPECT_THROW(parse_set_text("1\nfoo\n"), FormatError);
    EXPECT_THROW(parse_set_text("1\n1\n"), FormatError);
    EXPECT_THROW(parse_set_text("-3\n"), FormatError);
    EXPECT_THROW(parse_set_text("99999999999999999999999\n"), FormatError);
    EXPECT_THROW(read_set_file("/nonexistent/dir/set.txt"), IoError);
}
