#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace quphox {

using Matrix2c = Eigen::Matrix2cd;
using Matrix4c = Eigen::Matrix4cd;

/// One growth unit: BD(down) - [HWP,QWP per rail] - BD(up) - [HWP,QWP per
/// rail] on two rails, eight free wave-plate angles (radians, kept in
/// [0, pi)). The displacers dump rail 1's V at the first step and rail 0's V
/// at the second — the block's two loss channels.
///
/// Angle layout: {p0 HWP, p0 QWP, p1 HWP, p1 QWP} for the stage between the
/// displacers, then the same four for the output stage.
struct Block {
    std::array<double, 8> angles{};

    /// Angles realizing an exact identity on the signal qubit.
    static Block pass_through();
};

/// Operator on the internal (rail ⊗ polarization) space spanned by
/// |0H>, |0V>, |1H>, |1V>, with the loss rails truncated (a contraction).
/// The signal qubit is the polarization of rail 0; fidelity compares the
/// 2x2 signal block.
class CircuitOperator {
public:
    CircuitOperator() : full_(Matrix4c::Zero()) {}
    explicit CircuitOperator(Matrix4c full) : full_(std::move(full)) {}

    const Matrix4c& full() const { return full_; }
    Matrix2c signal() const { return full_.topLeftCorner<2, 2>(); }
    double max_singular_value() const;

private:
    Matrix4c full_;
};

Matrix2c hwp_matrix(double theta);
Matrix2c qwp_matrix(double theta);

CircuitOperator block_operator(const Block& block);
/// Matrix product in physical order (blocks[0] first).
CircuitOperator compose(const std::vector<Block>& blocks);

/// Target signal operator; spectral norm rescaled to <= 1 on load with the
/// factor reported (passive optics cannot amplify).
struct TargetOp {
    Matrix2c matrix;
    double rescale_factor = 1.0; // applied multiplier, 1.0 when none needed

    static TargetOp from_matrix(const Matrix2c& m);
    /// Plain-text form: optional '#' comments, a "rows cols" line (must be
    /// "2 2"), then rows of whitespace-separated "re im" pairs. Throws
    /// std::invalid_argument on malformed input or dimension mismatch.
    static TargetOp load(std::istream& in);
    static TargetOp load_file(const std::string& path);
};

/// Normalized operator overlap |tr(T^dag C)|^2 / (tr(T^dag T) tr(C^dag C))
/// on the signal block; global-phase invariant. Throws std::domain_error on
/// a zero operator.
double fidelity_to_target(const CircuitOperator& op, const TargetOp& target);

struct GrowOptions {
    int restarts = 5;            // simplex runs per growth stage
    int max_iterations = 4000;   // per simplex run
    double simplex_tolerance = 1e-9;
    bool reoptimize_all = true;  // false: only the newest block's angles move
    std::uint64_t seed = 1;
};

struct GrowResult {
    std::vector<Block> blocks;
    double fidelity = 0.0;
    std::vector<double> trace; // best-so-far per accepted iteration
    bool converged = false;
};

/// Starts with one block, optimizes all current angles by simplex descent
/// with random restarts; below threshold, appends a near-identity block and
/// re-optimizes, up to max_blocks. Unconverged results are returned
/// best-effort (flagged), not thrown.
GrowResult grow_until(const TargetOp& target, double threshold, int max_blocks,
                      const GrowOptions& options = {});

} // namespace quphox
