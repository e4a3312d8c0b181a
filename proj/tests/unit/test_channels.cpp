#include "doctest.h"
#include "support.hpp"
#include "sympl/channels.hpp"

using namespace sympl;
using namespace sympl::channels;
using testing::max_abs;

namespace {

GaussianChannel attenuator(double eta) {
    return make_channel(std::sqrt(eta) * Mat::Identity(2, 2), (1 - eta) * Mat::Identity(2, 2));
}

}  // namespace

TEST_CASE("attenuator equals a beamsplitter with vacuum environment") {
    double eta = 0.7;
    // beamsplitter_h layout: signal transmits with √(1-τ)
    Mat H(4, 4);
    double a = std::sqrt(eta), b = std::sqrt(1 - eta);
    H << a * Mat::Identity(2, 2), b * Mat::Identity(2, 2), -b * Mat::Identity(2, 2), a * Mat::Identity(2, 2);
    auto c = from_dilation(H, 1, Mat::Identity(2, 2));
    auto ref = attenuator(eta);
    CHECK(max_abs(Mat(c.T - ref.T)) < 1e-15);
    CHECK(max_abs(Mat(c.N - ref.N)) < 1e-15);
}

TEST_CASE("complete positivity boundary") {
    CHECK(is_cp(attenuator(0.4)));
    CHECK(cp_margin(attenuator(0.4)) == doctest::Approx(0.0).epsilon(1e-12));
    double g = 2.0;
    auto amp = make_channel(std::sqrt(g) * Mat::Identity(2, 2), (g - 1) * Mat::Identity(2, 2));
    CHECK(is_cp(amp));
    auto bad = make_channel(std::sqrt(g) * Mat::Identity(2, 2), 0.5 * (g - 1) * Mat::Identity(2, 2));
    CHECK_FALSE(is_cp(bad));
    // transpose-like map is not CP without noise
    Mat T = Mat::Identity(2, 2);
    T(1, 1) = -1;
    CHECK_FALSE(is_cp(make_channel(T, Mat::Zero(2, 2))));
    CHECK(is_cp(make_channel(T, Mat::Identity(2, 2) * 2.0)));
}

TEST_CASE("composition acts like sequential application") {
    auto c1 = random_cp_channel(2, 1), c2 = random_cp_channel(2, 2);
    c1.d = Vec::Constant(4, 0.1);
    auto s = states::make_state(Vec::LinSpaced(4, 0, 1), 2.0 * Mat::Identity(4, 4));
    auto a = apply(compose(c2, c1), s), b = apply(c2, apply(c1, s));
    CHECK(max_abs(Mat(a.V - b.V)) < 1e-12);
    CHECK(max_abs(Vec(a.x_bar - b.x_bar)) < 1e-12);
    CHECK(is_cp(compose(c2, c1)));
    auto j = juxtapose(c1, c2);
    CHECK(j.T.rows() == 8);
    CHECK(is_cp(j));
}

TEST_CASE("random CP channels are CP with the requested margin and reproducible") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto c = random_cp_channel(1 + int(seed % 3), seed);
        CHECK(cp_margin(c) > 0.05);
    }
    auto a = random_cp_channel(2, 7), b = random_cp_channel(2, 7);
    CHECK(max_abs(Mat(a.T - b.T)) == 0.0);
    CHECK(max_abs(Mat(a.N - b.N)) == 0.0);
}

TEST_CASE("dilation round trip and block identities") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        auto c = random_cp_channel(1 + int(seed % 3), 100 + seed);
        auto r = dilate(c);
        CHECK(testing::sympl_err(r.S) < 1e-9);
        auto back = from_dilation(r.S, r.n_a, r.env_cov);
        CHECK(max_abs(Mat(back.T - c.T)) < 1e-9);
        CHECK(max_abs(Mat(back.N - c.N)) < 1e-9);
        auto lem = dilation_block_residuals(r);
        for (double x : lem) CHECK(x < 1e-9);
        CHECK(states::is_physical(states::make_state(Vec::Zero(r.env_cov.rows()), r.env_cov)));
    }
}

TEST_CASE("dilation of an attenuator uses at most as many modes as the system") {
    auto r = dilate(attenuator(0.25));
    CHECK(r.n_a == 1);
    CHECK(r.n_b == 1);
    auto back = from_dilation(r.S, 1, r.env_cov);
    CHECK(max_abs(Mat(back.N - attenuator(0.25).N)) < 1e-12);
}

TEST_CASE("dilate rejects det(Id - T) = 0, dilate_chain handles it") {
    auto c = make_channel(Mat::Identity(2, 2), 0.3 * Mat::Identity(2, 2));
    CHECK_THROWS_AS(dilate(c), Error);
    auto ch = dilate_chain(c);
    CHECK(ch.stages.size() == 2);
    auto total = compose(ch.factors[1], ch.factors[0]);
    CHECK(max_abs(Mat(total.T - c.T)) < 1e-12);
    CHECK(max_abs(Mat(total.N - c.N)) < 1e-12);
}

TEST_CASE("Cayley form of a dilation") {
    auto r = dilate(random_cp_channel(2, 5));
    Mat Sb = random_symplectic(r.n_b, 1, 1.5), Sbp = random_symplectic(r.n_b, 2, 1.5);
    auto cf = dilation_cayley_form(r, Sb, Sbp);
    Mat I = Mat::Identity(2 * r.n_a, 2 * r.n_a);
    CHECK(max_abs(Mat(cf.D - direct_sum(I, Sb) * r.S * direct_sum(I, Sbp))) < 1e-10);
    CHECK(max_abs(Mat(cf.M_tilde - cf.M_tilde.transpose())) < 1e-10);
    int n = r.n_a + r.n_b;
    CHECK(max_abs(Mat(cayley(Mat(testing::omega_ref(n) * cf.M_tilde)) - cf.D)) < 1e-8);
}
