#include <gtest/gtest.h>

#include <set>

#include "dpsi/prf.hpp"

using namespace dpsi;

// Reference values: tests/oracle/vectors.py (Python hmac + hashlib).

TEST(Prf, FrozenVectors) {
    Key k0 = Key::from_seed(0);
    EXPECT_EQ(k0.hex(), "af5570f5a1810b7af78caf4bc70a660f");
    EXPECT_EQ(derive_key(k0, 1).hex(), "4a68ecf8188f7ae4fa903c3a97fcc6af");
    EXPECT_EQ(prf_field(k0, 5, PrimeField::mersenne61()).value(), 1652552511919595504ULL);
    EXPECT_EQ(prf_field(k0, 5, PrimeField(101)).value(), 5u);
}

TEST(Prf, KeyedHashMatchesOneShotKey) {
    Key k = Key::from_seed(42);
    KeyedHash kh(k);
    for (u64 i = 0; i < 20; ++i) {
        EXPECT_EQ(derive_key(k, i), derive_key(kh, i));
        EXPECT_EQ(prf_field(k, i, PrimeField::mersenne61()), prf_field(kh, i, PrimeField::mersenne61()));
    }
}

TEST(Prf, DeriveKeyDeterministicAndSeparated) {
    Key k = Key::from_seed(7);
    EXPECT_EQ(derive_key(k, 3), derive_key(k, 3));
    EXPECT_NE(derive_key(k, 1), derive_key(k, 2));
    EXPECT_NE(derive_key(Key::from_seed(1), 1), derive_key(Key::from_seed(2), 1));
    // Same index under the two tags must not coincide.
    auto f = PrimeField::mersenne61();
    Key child = derive_key(k, 9);
    u64 from_child = 0;
    for (int i = 0; i < 8; ++i) from_child = from_child << 8 | child.bytes()[i];
    EXPECT_NE(prf_field(k, 9, f).value(), from_child % f.modulus());
}

TEST(Prf, HexRoundTripAndErrors) {
    Key k = Key::from_seed(11);
    EXPECT_EQ(Key::from_hex(k.hex()), k);
    EXPECT_EQ(Key::from_hex("AF5570F5A1810B7AF78CAF4BC70A660F"), Key::from_seed(0));
    EXPECT_THROW(Key::from_hex("abc"), ParameterError);
    EXPECT_THROW(Key::from_hex("zz5570f5a1810b7af78caf4bc70a660f"), ParameterError);
}

TEST(Prf, RoleTagDoesNotAffectEquality) {
    Key k = Key::from_seed(3);
    EXPECT_EQ(k.with_role(KeyRole::tk), k);
    EXPECT_EQ(k.with_role(KeyRole::tk).role(), KeyRole::tk);
}

TEST(Prf, FieldOutputsInRangeAndRoughlyUniform) {
    auto f = PrimeField::mersenne61();
    KeyedHash kh(Key::from_seed(99));
    std::array<int, 16> buckets{};
    const int N = 10000;
    for (int i = 0; i < N; ++i) {
        u64 v = prf_field(kh, i, f).value();
        ASSERT_LT(v, f.modulus());
        ++buckets[static_cast<std::size_t>(static_cast<u128>(v) * 16 / f.modulus())];
    }
    for (int b : buckets) {
        EXPECT_GT(b, N / 16 * 0.75);
        EXPECT_LT(b, N / 16 * 1.25);
    }
}

TEST(Prf, NonzeroVariant) {
    // Over F_2 half of the raw outputs are zero, so retries get exercised.
    PrimeField f2(2);
    Key k = Key::from_seed(5);
    int retried = 0;
    for (u64 i = 0; i < 200; ++i) {
        auto plain = prf_field(k, i, f2);
        auto nz = prf_field_nonzero(k, i, f2);
        EXPECT_FALSE(nz.is_zero());
        EXPECT_EQ(nz, prf_field_nonzero(k, i, f2));
        if (!plain.is_zero()) EXPECT_EQ(nz, plain);
        else ++retried;
    }
    EXPECT_GT(retried, 50);
}

TEST(Prf, ExpandBlinding) {
    auto f = PrimeField::mersenne61();
    Key mk = Key::from_seed(8);
    auto z = expand_blinding(mk, 4, 7, true, f, Party::B);
    EXPECT_EQ(z.z.rows(), 4u);
    EXPECT_EQ(z.z.cols(), 7u);
    EXPECT_EQ(z.owner, Party::B);
    for (u64 v : z.z.data()) EXPECT_NE(v, 0u);
    EXPECT_EQ(expand_blinding(mk, 4, 7, true, f, Party::B).z, z.z);
    // Entry (j, i) is PRF(derive_key(mk, j), i), 1-based.
    EXPECT_EQ(z.z.raw(2, 4), prf_field_nonzero(derive_key(mk, 3), 5, f).value());
    EXPECT_THROW(expand_blinding(mk, 0, 7, true, f, Party::A), ParameterError);

    std::set<u64> distinct(z.z.data().begin(), z.z.data().end());
    EXPECT_EQ(distinct.size(), 28u);
}
