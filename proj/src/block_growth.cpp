#include "quphox/block_growth.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

namespace quphox {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr std::complex<double> kI{0.0, 1.0};

Matrix4c bd_down() {
    // H passes, V displaces one rail down; rail 1's V leaves the system.
    Matrix4c m = Matrix4c::Zero();
    m(0, 0) = 1.0; // |0H> -> |0H>
    m(3, 1) = 1.0; // |0V> -> |1V>
    m(2, 2) = 1.0; // |1H> -> |1H>
    return m;
}

Matrix4c bd_up() {
    Matrix4c m = Matrix4c::Zero();
    m(0, 0) = 1.0; // |0H> -> |0H>
    m(2, 2) = 1.0; // |1H> -> |1H>
    m(1, 3) = 1.0; // |1V> -> |0V>
    return m;
}

Matrix4c plate_stage(const double* angles) {
    // {p0 HWP, p0 QWP, p1 HWP, p1 QWP}
    Matrix2c j0 = qwp_matrix(angles[1]) * hwp_matrix(angles[0]);
    Matrix2c j1 = qwp_matrix(angles[3]) * hwp_matrix(angles[2]);
    Matrix4c m = Matrix4c::Zero();
    m.topLeftCorner<2, 2>() = j0;
    m.bottomRightCorner<2, 2>() = j1;
    return m;
}

} // namespace

Matrix2c hwp_matrix(double theta) {
    Matrix2c m;
    m << std::cos(2 * theta), std::sin(2 * theta), std::sin(2 * theta), -std::cos(2 * theta);
    return m;
}

Matrix2c qwp_matrix(double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    Matrix2c m;
    m << c * c + kI * s * s, (1.0 - kI) * s * c, (1.0 - kI) * s * c, s * s + kI * c * c;
    return m;
}

Block Block::pass_through() {
    // Derived by hand: stage-1 keeps |0H> on H (p0 plates diagonal) and maps
    // the displaced |1V> with amplitude i (HWP at pi/2), the output stage's
    // diag(1, -i) cancels the phases exactly.
    Block b;
    b.angles = {0.0, 0.0, kPi / 2, 0.0, 0.0, 0.0, 0.0, 0.0};
    return b;
}

CircuitOperator block_operator(const Block& block) {
    Matrix4c m = plate_stage(block.angles.data() + 4) * bd_up() *
                 plate_stage(block.angles.data()) * bd_down();
    return CircuitOperator(m);
}

CircuitOperator compose(const std::vector<Block>& blocks) {
    if (blocks.empty()) throw std::invalid_argument("compose: need at least one block");
    Matrix4c total = Matrix4c::Identity();
    for (const Block& block : blocks) total = block_operator(block).full() * total;
    return CircuitOperator(total);
}

double CircuitOperator::max_singular_value() const {
    Eigen::JacobiSVD<Matrix4c> svd(full_);
    return svd.singularValues()(0);
}

TargetOp TargetOp::from_matrix(const Matrix2c& m) {
    TargetOp out;
    out.matrix = m;
    Eigen::JacobiSVD<Matrix2c> svd(m);
    double norm = svd.singularValues()(0);
    if (norm > 1.0) {
        out.rescale_factor = 1.0 / norm;
        out.matrix *= out.rescale_factor;
    }
    return out;
}

TargetOp TargetOp::load(std::istream& in) {
    std::string line;
    std::vector<std::vector<double>> numbers;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream tokens(line);
        std::vector<double> row;
        double v = 0.0;
        while (tokens >> v) row.push_back(v);
        if (!tokens.eof()) throw std::invalid_argument("target matrix: non-numeric entry");
        if (!row.empty()) numbers.push_back(std::move(row));
    }
    if (numbers.empty() || numbers[0].size() != 2) {
        throw std::invalid_argument("target matrix: missing 'rows cols' line");
    }
    const int rows = static_cast<int>(numbers[0][0]);
    const int cols = static_cast<int>(numbers[0][1]);
    if (rows != 2 || cols != 2) {
        throw std::invalid_argument("target matrix: dimension mismatch, signal space is 2x2");
    }
    if (numbers.size() != 3) throw std::invalid_argument("target matrix: expected 2 data rows");
    Matrix2c m;
    for (int r = 0; r < 2; ++r) {
        const auto& row = numbers[static_cast<size_t>(r) + 1];
        if (row.size() != 4) {
            throw std::invalid_argument("target matrix: each row needs 2 're im' pairs");
        }
        for (int c = 0; c < 2; ++c) {
            m(r, c) = std::complex<double>(row[static_cast<size_t>(2 * c)],
                                           row[static_cast<size_t>(2 * c + 1)]);
        }
    }
    return from_matrix(m);
}

TargetOp TargetOp::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("target matrix: cannot open " + path);
    return load(in);
}

double fidelity_to_target(const CircuitOperator& op, const TargetOp& target) {
    const Matrix2c c = op.signal();
    const Matrix2c& t = target.matrix;
    const double cc = (c.adjoint() * c).trace().real();
    const double tt = (t.adjoint() * t).trace().real();
    if (cc <= 0.0) throw std::domain_error("fidelity_to_target: zero operator");
    if (tt <= 0.0) throw std::domain_error("fidelity_to_target: zero target");
    const std::complex<double> overlap = (t.adjoint() * c).trace();
    return std::norm(overlap) / (cc * tt);
}

// --- growth loop --------------------------------------------------------------

namespace {

struct ObjectiveContext {
    const TargetOp* target;
    const std::vector<double>* frozen_prefix; // empty in joint mode
    std::vector<Block> scratch;
};

std::vector<Block> to_blocks(const std::vector<double>& prefix, const double* x, size_t n) {
    std::vector<double> all(prefix);
    all.insert(all.end(), x, x + n);
    std::vector<Block> blocks(all.size() / 8);
    for (size_t k = 0; k < all.size(); ++k) blocks[k / 8].angles[k % 8] = all[k];
    return blocks;
}

double objective_f(const gsl_vector* v, void* params) {
    auto* ctx = static_cast<ObjectiveContext*>(params);
    std::vector<Block> blocks = to_blocks(*ctx->frozen_prefix, v->data, v->size);
    return 1.0 - fidelity_to_target(compose(blocks), *ctx->target);
}

struct SimplexOutcome {
    std::vector<double> angles;
    double fidelity;
};

/// One Nelder-Mead run; appends best-so-far fidelity per iteration to trace.
SimplexOutcome simplex_descend(const TargetOp& target, const std::vector<double>& frozen_prefix,
                               std::vector<double> start, const GrowOptions& options,
                               std::vector<double>& trace, double incoming_best) {
    static const int kGslQuiet = [] {
        gsl_set_error_handler_off();
        return 0;
    }();
    (void)kGslQuiet;

    ObjectiveContext ctx{&target, &frozen_prefix, {}};
    const size_t dim = start.size();

    gsl_multimin_function func;
    func.n = dim;
    func.f = objective_f;
    func.params = &ctx;

    gsl_vector* x = gsl_vector_alloc(dim);
    gsl_vector* step = gsl_vector_alloc(dim);
    for (size_t k = 0; k < dim; ++k) {
        gsl_vector_set(x, k, start[k]);
        gsl_vector_set(step, k, 0.3);
    }
    gsl_multimin_fminimizer* minimizer =
        gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, dim);
    gsl_multimin_fminimizer_set(minimizer, &func, x, step);

    double best = incoming_best;
    SimplexOutcome outcome{start, 1.0 - objective_f(x, &ctx)};
    for (int iter = 0; iter < options.max_iterations; ++iter) {
        if (gsl_multimin_fminimizer_iterate(minimizer) != GSL_SUCCESS) break;
        const double fidelity = 1.0 - minimizer->fval;
        if (fidelity > outcome.fidelity) {
            outcome.fidelity = fidelity;
            for (size_t k = 0; k < dim; ++k) outcome.angles[k] = gsl_vector_get(minimizer->x, k);
        }
        best = std::max(best, fidelity);
        trace.push_back(best);
        if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(minimizer), options.simplex_tolerance) ==
            GSL_SUCCESS) {
            break;
        }
    }
    gsl_multimin_fminimizer_free(minimizer);
    gsl_vector_free(step);
    gsl_vector_free(x);
    return outcome;
}

double wrap_angle(double a) {
    double w = std::fmod(a, kPi);
    if (w < 0) w += kPi;
    return w;
}

} // namespace

GrowResult grow_until(const TargetOp& target, double threshold, int max_blocks,
                      const GrowOptions& options) {
    if (threshold <= 0.0 || threshold > 1.0) {
        throw std::invalid_argument("grow_until: threshold outside (0,1]");
    }
    if (max_blocks < 1) throw std::invalid_argument("grow_until: max_blocks must be >= 1");

    std::mt19937_64 rng(options.seed);
    auto uniform_angle = [&rng]() {
        return kPi * (static_cast<double>(rng()) / static_cast<double>(UINT64_MAX));
    };
    auto jitter = [&rng]() {
        return 0.05 * (2.0 * (static_cast<double>(rng()) / static_cast<double>(UINT64_MAX)) - 1.0);
    };

    GrowResult result;
    std::vector<double> stage_angles;  // current stage's blocks, flattened
    std::vector<double> global_best_angles;
    double global_best = -1.0;
    const Block pass = Block::pass_through();

    for (int blocks = 1; blocks <= max_blocks; ++blocks) {
        // Warm start: previous best plus a near-identity new block, so the
        // incoming fidelity is preserved as the starting point.
        std::vector<double> warm = stage_angles;
        for (double a : pass.angles) warm.push_back(a + jitter());

        SimplexOutcome stage_best{{}, -1.0};
        std::vector<double> stage_best_full;
        for (int restart = 0; restart < options.restarts; ++restart) {
            std::vector<double> frozen_prefix;
            std::vector<double> start = warm;
            if (!options.reoptimize_all && blocks > 1) {
                frozen_prefix.assign(warm.begin(), warm.end() - 8);
                start.assign(warm.end() - 8, warm.end());
            }
            if (restart > 0) {
                for (double& a : start) a = uniform_angle();
            }
            double incoming = result.trace.empty() ? 0.0 : result.trace.back();
            SimplexOutcome outcome =
                simplex_descend(target, frozen_prefix, start, options, result.trace, incoming);
            if (outcome.fidelity > stage_best.fidelity) {
                stage_best = outcome;
                stage_best_full = frozen_prefix;
                stage_best_full.insert(stage_best_full.end(), outcome.angles.begin(),
                                       outcome.angles.end());
            }
            if (stage_best.fidelity >= threshold) break;
        }

        stage_angles = stage_best_full;
        if (stage_best.fidelity > global_best) {
            global_best = stage_best.fidelity;
            global_best_angles = stage_best_full;
        }
        if (global_best >= threshold) {
            result.converged = true;
            break;
        }
    }

    result.fidelity = global_best;
    result.blocks.resize(global_best_angles.size() / 8);
    for (size_t k = 0; k < global_best_angles.size(); ++k) {
        result.blocks[k / 8].angles[k % 8] = wrap_angle(global_best_angles[k]);
    }
    // Wrapping is exact for the plates (period pi), so the reported fidelity
    // still holds for the normalized angles.
    return result;
}

} // namespace quphox
