#include <cmath>
#include <random>
#include <sstream>

#include <doctest.h>

#include "quphox/block_growth.hpp"

using namespace quphox;

namespace {

constexpr double kPi = 3.14159265358979323846;

Block random_block(std::mt19937_64& rng) {
    Block b;
    for (double& a : b.angles) {
        a = kPi * (static_cast<double>(rng()) / static_cast<double>(UINT64_MAX));
    }
    return b;
}

Matrix2c random_contraction(std::mt19937_64& rng, double smin, double smax) {
    auto angle = [&rng]() {
        return 2 * kPi * (static_cast<double>(rng()) / static_cast<double>(UINT64_MAX));
    };
    auto unitary = [&angle]() {
        const double a = angle(), b = angle(), t = angle() / 4;
        Matrix2c u;
        const std::complex<double> i{0, 1};
        u << std::exp(i * a) * std::cos(t), std::exp(i * b) * std::sin(t),
            -std::exp(-i * b) * std::sin(t), std::exp(-i * a) * std::cos(t);
        return u;
    };
    const double span = smax - smin;
    double s1 = smin + span * (static_cast<double>(rng()) / static_cast<double>(UINT64_MAX));
    double s2 = smin + span * (static_cast<double>(rng()) / static_cast<double>(UINT64_MAX));
    Eigen::Vector2cd diag;
    diag << s1, s2;
    return unitary() * diag.asDiagonal() * unitary();
}

double fd_gradient_a(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2 * h);
}

// Second, independently written estimator: three-point stencil via two
// nested half-steps at a different h.
double fd_gradient_b(const std::function<double(double)>& f, double x, double h) {
    const double upper = f(x + h);
    const double lower = f(x - h);
    return 0.5 * (upper - lower) / h;
}

} // namespace

TEST_CASE("all-zero block matches the frozen reference operator") {
    Block zero;
    Matrix4c expected = Matrix4c::Zero();
    expected(0, 0) = 1.0;
    expected(1, 1) = -1.0;
    expected(2, 2) = 1.0;
    CHECK((block_operator(zero).full() - expected).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("half-wave plate at pi/4 swaps polarizations") {
    Matrix2c swap;
    swap << 0, 1, 1, 0;
    CHECK((hwp_matrix(kPi / 4) - swap).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("wave plates are unitary") {
    std::mt19937_64 rng(3);
    for (int k = 0; k < 20; ++k) {
        double theta = kPi * (static_cast<double>(rng()) / static_cast<double>(UINT64_MAX));
        CHECK((hwp_matrix(theta) * hwp_matrix(theta).adjoint() - Matrix2c::Identity())
                  .cwiseAbs()
                  .maxCoeff() < 1e-12);
        CHECK((qwp_matrix(theta) * qwp_matrix(theta).adjoint() - Matrix2c::Identity())
                  .cwiseAbs()
                  .maxCoeff() < 1e-12);
    }
}

TEST_CASE("pass-through angles give the exact signal identity") {
    CircuitOperator op = block_operator(Block::pass_through());
    CHECK((op.signal() - Matrix2c::Identity()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("blocks are contractions") {
    std::mt19937_64 rng(5);
    for (int k = 0; k < 50; ++k) {
        CHECK(block_operator(random_block(rng)).max_singular_value() <= 1.0 + 1e-9);
    }
}

TEST_CASE("compose multiplies in physical order") {
    std::mt19937_64 rng(7);
    Block b = random_block(rng);
    CHECK((compose({b}).full() - block_operator(b).full()).cwiseAbs().maxCoeff() < 1e-15);

    Block zero;
    Matrix4c r0 = block_operator(zero).full();
    CHECK((compose({zero, zero}).full() - r0 * r0).cwiseAbs().maxCoeff() < 1e-15);

    // Norm monotonicity under composition.
    std::vector<Block> chain;
    double previous = 1.0;
    for (int k = 0; k < 6; ++k) {
        chain.push_back(random_block(rng));
        double current = compose(chain).max_singular_value();
        CHECK(current <= previous + 1e-9);
        previous = current;
    }

    CHECK_THROWS_AS(compose({}), std::invalid_argument);
}

TEST_CASE("fidelity to target properties") {
    std::mt19937_64 rng(9);
    Block b = random_block(rng);
    CircuitOperator op = compose({b});
    TargetOp self = TargetOp::from_matrix(op.signal());
    CHECK(fidelity_to_target(op, self) == doctest::Approx(1.0).epsilon(1e-12));

    TargetOp phased = TargetOp::from_matrix(std::exp(std::complex<double>(0, 0.7)) * op.signal());
    CHECK(fidelity_to_target(op, phased) == doctest::Approx(1.0).epsilon(1e-12));

    // Hilbert-Schmidt-orthogonal target.
    Matrix2c x;
    x << 0, 1, 1, 0;
    CircuitOperator identity_like(Matrix4c::Identity());
    CHECK(fidelity_to_target(identity_like, TargetOp::from_matrix(x)) ==
          doctest::Approx(0.0).epsilon(1e-12));

    CHECK_THROWS_AS(fidelity_to_target(CircuitOperator(Matrix4c::Zero()), self),
                    std::domain_error);
}

TEST_CASE("target load rescales the spectral norm") {
    Matrix2c big = 3.0 * Matrix2c::Identity();
    TargetOp target = TargetOp::from_matrix(big);
    CHECK(target.rescale_factor == doctest::Approx(1.0 / 3.0));
    Eigen::JacobiSVD<Matrix2c> svd(target.matrix);
    CHECK(svd.singularValues()(0) <= 1.0 + 1e-12);

    std::istringstream good("# comment\n2 2\n1 0  0 0\n0 0  1 0\n");
    TargetOp loaded = TargetOp::load(good);
    CHECK((loaded.matrix - Matrix2c::Identity()).cwiseAbs().maxCoeff() < 1e-15);

    std::istringstream bad_dims("3 3\n1 0 0 0 0 0\n");
    CHECK_THROWS_AS(TargetOp::load(bad_dims), std::invalid_argument);
    std::istringstream garbage("2 2\nnot numbers\n");
    CHECK_THROWS_AS(TargetOp::load(garbage), std::invalid_argument);
}

TEST_CASE("finite-difference cross-check of the composition chain") {
    std::mt19937_64 rng(11);
    TargetOp target = TargetOp::from_matrix(random_contraction(rng, 0.4, 1.0));
    std::vector<Block> blocks = {random_block(rng), random_block(rng)};
    for (int point = 0; point < 10; ++point) {
        const size_t block_idx = rng() % 2;
        const size_t angle_idx = rng() % 8;
        auto slice = [&](double value) {
            std::vector<Block> local = blocks;
            local[block_idx].angles[angle_idx] = value;
            return fidelity_to_target(compose(local), target);
        };
        const double x = blocks[block_idx].angles[angle_idx];
        const double g1 = fd_gradient_a(slice, x, 1e-5);
        const double g2 = fd_gradient_b(slice, x, 2e-5);
        CHECK(std::abs(g1 - g2) <= 1e-4 * std::max(1.0, std::abs(g1)));
        blocks[block_idx] = random_block(rng);
    }
}

TEST_CASE("block operator is continuous in the angles") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 10; ++trial) {
        Block b = random_block(rng);
        Matrix4c base = block_operator(b).full();
        for (size_t k = 0; k < 8; ++k) {
            Block perturbed = b;
            perturbed.angles[k] += 1e-7;
            CHECK((block_operator(perturbed).full() - base).cwiseAbs().maxCoeff() < 1e-5);
        }
    }
}

TEST_CASE("rank-1 projector is reachable exactly by construction") {
    // Keep |0H>: p0 plates diagonal. Kill |0V>: rotate the displaced rail-1 V
    // to H (HWP at pi/4), which the up-displacer leaves outside the signal.
    Block killer;
    killer.angles = {0.0, 0.0, kPi / 4, 0.0, 0.0, 0.0, 0.0, 0.0};
    Matrix2c projector;
    projector << 1, 0, 0, 0;
    CircuitOperator op = block_operator(killer);
    CHECK((op.signal() - projector).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(fidelity_to_target(op, TargetOp::from_matrix(projector)) ==
          doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("growth: identity converges in one block") {
    TargetOp identity = TargetOp::from_matrix(Matrix2c::Identity());
    GrowResult result = grow_until(identity, 0.999, 1, GrowOptions{});
    CHECK(result.converged);
    CHECK(result.blocks.size() == 1);
    CHECK(result.fidelity >= 0.999);
}

TEST_CASE("growth: rank-1 projector within three blocks") {
    Matrix2c projector;
    projector << 1, 0, 0, 0;
    GrowResult result = grow_until(TargetOp::from_matrix(projector), 0.98, 3, GrowOptions{});
    CHECK(result.converged);
    CHECK(result.blocks.size() <= 3);
    CHECK(result.fidelity >= 0.98);
}

TEST_CASE("growth trace is monotone over accepted steps") {
    TargetOp identity = TargetOp::from_matrix(Matrix2c::Identity());
    GrowResult result = grow_until(identity, 0.999, 2, GrowOptions{});
    for (size_t k = 1; k < result.trace.size(); ++k) {
        CHECK(result.trace[k] >= result.trace[k - 1]);
    }
    CHECK(!result.trace.empty());
}

TEST_CASE("growth: small random-contraction sample") {
    std::mt19937_64 rng(17);
    int successes = 0;
    const int instances = 10;
    for (int k = 0; k < instances; ++k) {
        TargetOp target = TargetOp::from_matrix(random_contraction(rng, 0.3, 1.0));
        GrowOptions options;
        options.seed = 100 + static_cast<std::uint64_t>(k);
        GrowResult result = grow_until(target, 0.98, 5, options);
        if (result.converged) ++successes;
    }
    CHECK(successes >= 9);
}

TEST_CASE("growth: unconverged runs are flagged, not thrown") {
    std::mt19937_64 rng(19);
    TargetOp target = TargetOp::from_matrix(random_contraction(rng, 0.3, 0.9));
    GrowOptions options;
    options.restarts = 1;
    options.max_iterations = 4;
    GrowResult result = grow_until(target, 0.9999, 1, options);
    CHECK(!result.converged);
    CHECK(result.blocks.size() == 1);
    CHECK(result.fidelity < 0.9999);

    CHECK_THROWS_AS(grow_until(target, 0.9, 0, GrowOptions{}), std::invalid_argument);
    CHECK_THROWS_AS(grow_until(target, 1.5, 1, GrowOptions{}), std::invalid_argument);
}

TEST_CASE("new-only mode keeps earlier blocks frozen") {
    std::mt19937_64 rng(23);
    TargetOp target = TargetOp::from_matrix(random_contraction(rng, 0.4, 1.0));
    GrowOptions options;
    options.reoptimize_all = false;
    options.restarts = 2;
    options.max_iterations = 200;
    GrowResult result = grow_until(target, 0.999999, 2, options);
    CHECK(result.blocks.size() >= 1); // smoke: mode runs to completion
}
