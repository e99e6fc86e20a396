#include <gtest/gtest.h>

#include <omp.h>

#include "dpsi/kernels.hpp"
#include "dpsi/params.hpp"

using namespace dpsi;

namespace {

struct KernelInputs {
    PublicParams params;
    std::vector<Polynomial> tau;
    std::vector<Polynomial> omega;
    FieldMatrix z;
    FieldMatrix z2;

    KernelInputs() {
        SetupConfig cfg;
        cfg.c = 200;
        params = cloud_setup(cfg);
        const auto& f = params.field;
        tau = kernels::random_polys(ExecPolicy::serial, Key::from_seed(1), params.h(), params.d(), f);
        omega = kernels::random_polys(ExecPolicy::serial, Key::from_seed(2), params.h(), params.d(), f);
        z = kernels::expand_blinding(ExecPolicy::serial, Key::from_seed(3), params.h(), params.n(), true, f);
        z2 = kernels::expand_blinding(ExecPolicy::serial, Key::from_seed(4), params.h(), params.n(), false, f);
    }
};

const KernelInputs& inputs() {
    static KernelInputs in;
    return in;
}

// Run a kernel under both policies and require identical output and tallies.
template <class K>
void expect_same(K kernel) {
    Tally ts, tp;
    auto s = kernel(ExecPolicy::serial, ts);
    auto p = kernel(ExecPolicy::parallel, tp);
    EXPECT_EQ(s, p);
    EXPECT_EQ(ts, tp);
}

class ThreadCounts : public ::testing::TestWithParam<int> {
protected:
    void SetUp() override {
        saved_ = omp_get_max_threads();
        omp_set_num_threads(GetParam());
    }
    void TearDown() override { omp_set_num_threads(saved_); }

private:
    int saved_ = 1;
};

}  // namespace

TEST_P(ThreadCounts, SerialAndParallelAgree) {
    const auto& in = inputs();
    const auto& f = in.params.field;
    const auto& xs = in.params.xs;
    expect_same([&](ExecPolicy p, Tally&) {
        return kernels::expand_blinding(p, Key::from_seed(5), in.params.h(), in.params.n(), true, f);
    });
    expect_same([&](ExecPolicy p, Tally&) {
        return kernels::random_polys(p, Key::from_seed(6), in.params.h(), in.params.d(), f);
    });
    expect_same([&](ExecPolicy p, Tally& t) { return kernels::blind_additive(p, in.tau, xs, in.z2, f, t); });
    expect_same([&](ExecPolicy p, Tally& t) { return kernels::blind_multiplicative(p, in.tau, xs, in.z, f, t); });
    expect_same([&](ExecPolicy p, Tally& t) { return kernels::mask_single(p, in.omega, xs, in.z, f, t); });
    expect_same([&](ExecPolicy p, Tally& t) { return kernels::hadamard(p, in.z, in.z2, f, t); });
    expect_same([&](ExecPolicy p, Tally& t) { return kernels::combine_scaled(p, in.z, in.z2, in.z, f, t); });
    expect_same([&](ExecPolicy p, Tally& t) {
        return kernels::mask_pair(p, in.z, in.omega, in.z2, in.tau, in.z, xs, f, t);
    });
    expect_same([&](ExecPolicy p, Tally& t) { return kernels::subtract(p, in.z, in.z2, f, t); });

    Tally tally;
    auto values = kernels::mask_single(ExecPolicy::serial, in.tau, xs, in.z, f, tally);
    LagrangeBasis basis(xs, Arith(f));
    Tally ts, ns, tp, np;
    auto rs = kernels::recover_bins(ExecPolicy::serial, values, basis, in.params.enc, f, ts, ns, 11);
    auto rp = kernels::recover_bins(ExecPolicy::parallel, values, basis, in.params.enc, f, tp, np, 11);
    ASSERT_EQ(rs.size(), rp.size());
    for (std::size_t j = 0; j < rs.size(); ++j) {
        EXPECT_EQ(rs[j].g, rp[j].g);
        EXPECT_EQ(rs[j].roots, rp[j].roots);
        EXPECT_EQ(rs[j].valid, rp[j].valid);
    }
    EXPECT_EQ(ts, tp);
    EXPECT_EQ(ns, np);
    EXPECT_EQ(ts.interpolations, in.params.h());
    EXPECT_EQ(ts.factorizations, in.params.h());
}

INSTANTIATE_TEST_SUITE_P(Threads, ThreadCounts, ::testing::Values(1, 2, 4, 7));

TEST(Kernels, PerEntryCosts) {
    const auto& in = inputs();
    const auto& f = in.params.field;
    const u64 h = in.params.h(), n = in.params.n(), d = in.params.d();
    auto cost = [&](auto kernel) {
        Tally t;
        kernel(t);
        return t;
    };
    auto t = cost([&](Tally& t) { kernels::blind_multiplicative(ExecPolicy::parallel, in.tau, in.params.xs, in.z, f, t); });
    EXPECT_EQ(t.invs, h * n);
    t = cost([&](Tally& t) { kernels::mask_single(ExecPolicy::parallel, in.omega, in.params.xs, in.z, f, t); });
    EXPECT_EQ(t.muls, h * n * (d + 1));
    EXPECT_EQ(t.adds, h * n * d);
    t = cost([&](Tally& t) { kernels::hadamard(ExecPolicy::parallel, in.z, in.z2, f, t); });
    EXPECT_EQ(t, (Tally{0, h * n, 0, 0, 0}));
    t = cost([&](Tally& t) { kernels::combine_scaled(ExecPolicy::parallel, in.z, in.z2, in.z, f, t); });
    EXPECT_EQ(t, (Tally{h * n, h * n, 0, 0, 0}));
    t = cost([&](Tally& t) {
        kernels::mask_pair(ExecPolicy::parallel, in.z, in.omega, in.z2, in.tau, in.z, in.params.xs, f, t);
    });
    EXPECT_EQ(t, (Tally{2 * h * n * (d + 1), 2 * h * n * (d + 1), 0, 0, 0}));
    t = cost([&](Tally& t) { kernels::subtract(ExecPolicy::parallel, in.z, in.z2, f, t); });
    EXPECT_EQ(t, (Tally{h * n, 0, 0, 0, 0}));
}

TEST(Kernels, ValuesMatchDefinitions) {
    const auto& in = inputs();
    const auto& f = in.params.field;
    Arith a(f);
    Tally t;
    auto o = kernels::blind_multiplicative(ExecPolicy::parallel, in.tau, in.params.xs, in.z, f, t);
    auto g = kernels::mask_pair(ExecPolicy::parallel, in.z, in.omega, in.z2, in.tau, in.z, in.params.xs, f, t);
    for (std::size_t j = 0; j < in.params.h(); j += 17) {
        for (std::size_t i = 0; i < in.params.n(); ++i) {
            auto x = in.params.xs[i];
            auto tau = eval_horner(in.tau[j], x, a);
            EXPECT_EQ(a.mul(o.at(j, i), in.z.at(j, i)), tau);
            auto expect = a.add(a.add(a.mul(in.z.at(j, i), eval_horner(in.omega[j], x, a)),
                                      a.mul(in.z2.at(j, i), tau)),
                                in.z.at(j, i));
            EXPECT_EQ(g.at(j, i), expect);
        }
    }
}

TEST(Kernels, ErrorInsideParallelRegionPropagates) {
    const auto& in = inputs();
    const auto& f = in.params.field;
    FieldMatrix zero(in.params.h(), in.params.n(), f.modulus());
    Tally t;
    EXPECT_THROW(kernels::blind_multiplicative(ExecPolicy::parallel, in.tau, in.params.xs, zero, f, t), DomainError);
    EXPECT_THROW(kernels::blind_multiplicative(ExecPolicy::serial, in.tau, in.params.xs, zero, f, t), DomainError);
    FieldMatrix wrong(2, 2, f.modulus());
    EXPECT_THROW(kernels::hadamard(ExecPolicy::parallel, in.z, wrong, f, t), ParameterError);
}

TEST(Kernels, PolicyNames) {
    EXPECT_EQ(to_string(ExecPolicy::serial), "serial");
    EXPECT_EQ(to_string(ExecPolicy::parallel), "parallel");
    EXPECT_GE(max_threads(), 1);
}
