#include "dagbayes/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace dagbayes {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

}  // namespace

SubstreamRng::SubstreamRng(std::uint64_t seed, std::uint64_t block, std::uint64_t sample) {
    std::uint64_t h = seed;
    h = mix64(h + kGolden * (block + 1));
    h = mix64(h + kGolden * (sample + 1));
    state_ = h;
}

std::uint64_t SubstreamRng::next_u64() {
    state_ += kGolden;
    return mix64(state_);
}

double SubstreamRng::next_unit() {
    // 53-bit mantissa, shifted off zero: strictly inside (0,1)
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double SubstreamRng::next_normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = next_unit();
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(t);
    has_spare_ = true;
    return r * std::cos(t);
}

double SubstreamRng::next_gamma(double shape) {
    if (!(shape > 0.0)) throw std::invalid_argument("next_gamma: shape must be positive");
    if (shape < 1.0) {
        const double u = next_unit();
        return next_gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    while (true) {
        double x;
        double v;
        do {
            x = next_normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = next_unit();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

const SampleMatrix::Block* SampleMatrix::block_for(NodeId parent) const {
    for (const Block& b : blocks) {
        if (b.parent == parent) return &b;
    }
    return nullptr;
}

namespace {

void fill_rows(SampleMatrix& matrix, const std::vector<NodePosterior>& posteriors,
               std::uint64_t seed, std::size_t m_begin, std::size_t m_end) {
    for (std::size_t p = 0; p < posteriors.size(); ++p) {
        const NodePosterior& post = posteriors[p];
        SampleMatrix::Block& block = matrix.blocks[p];
        const std::size_t width = post.alpha.size();
        for (std::size_t m = m_begin; m < m_end; ++m) {
            double* row = block.data.data() + m * width;
            if (width == 1) {
                row[0] = 1.0;
                continue;
            }
            SubstreamRng rng(seed, p, m);
            double sum = 0.0;
            for (std::size_t j = 0; j < width; ++j) {
                row[j] = rng.next_gamma(post.alpha[j]);
                sum += row[j];
            }
            for (std::size_t j = 0; j < width; ++j) row[j] /= sum;
        }
    }
}

}  // namespace

SampleMatrix draw_joint(const std::vector<NodePosterior>& posteriors, const SamplerConfig& cfg,
                        unsigned threads) {
    if (cfg.samples < 1) throw std::invalid_argument("draw_joint: samples must be >= 1");
    SampleMatrix matrix;
    matrix.samples = cfg.samples;
    matrix.blocks.reserve(posteriors.size());
    for (const NodePosterior& post : posteriors) {
        for (double a : post.alpha) {
            if (!(a > 0.0)) throw std::invalid_argument("draw_joint: posterior alpha must be positive");
        }
        SampleMatrix::Block block;
        block.parent = post.parent;
        block.children = post.children;
        block.data.resize(cfg.samples * post.alpha.size());
        matrix.blocks.push_back(std::move(block));
    }

    if (threads <= 1 || cfg.samples < 2048) {
        fill_rows(matrix, posteriors, cfg.seed, 0, cfg.samples);
        return matrix;
    }
    const std::size_t n = std::min<std::size_t>(threads, cfg.samples);
    std::vector<std::thread> pool;
    pool.reserve(n);
    const std::size_t chunk = (cfg.samples + n - 1) / n;
    for (std::size_t t = 0; t < n; ++t) {
        const std::size_t lo = t * chunk;
        const std::size_t hi = std::min(cfg.samples, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back(
            [&matrix, &posteriors, seed = cfg.seed, lo, hi] { fill_rows(matrix, posteriors, seed, lo, hi); });
    }
    for (std::thread& t : pool) t.join();
    return matrix;
}

EdgeProbIndex::EdgeProbIndex(const Dag& dag, const SampleMatrix& matrix) : matrix_(&matrix) {
    edge_slot_.assign(dag.edge_count(), {-1, -1});
    for (std::size_t b = 0; b < matrix.blocks.size(); ++b) {
        const SampleMatrix::Block& block = matrix.blocks[b];
        for (std::size_t j = 0; j < block.children.size(); ++j) {
            int e = dag.edge_index(block.parent, block.children[j]);
            if (e >= 0) edge_slot_[static_cast<std::size_t>(e)] = {static_cast<int>(b), static_cast<int>(j)};
        }
    }
}

void EdgeProbIndex::extract_row(std::size_t m, std::span<double> out) const {
    for (std::size_t e = 0; e < edge_slot_.size(); ++e) {
        auto [b, j] = edge_slot_[e];
        out[e] = (b < 0) ? 0.0
                         : matrix_->blocks[static_cast<std::size_t>(b)].at(m, static_cast<std::size_t>(j));
    }
}

double empirical_quantile(std::span<const double> sorted_values, double q) {
    const std::size_t n = sorted_values.size();
    if (n == 0) throw std::invalid_argument("empirical_quantile: empty input");
    if (n == 1) return sorted_values[0];
    const double rank = q * static_cast<double>(n - 1);
    const double lo = std::floor(rank);
    const std::size_t i = static_cast<std::size_t>(lo);
    if (i + 1 >= n) return sorted_values[n - 1];
    const double frac = rank - lo;
    return sorted_values[i] + frac * (sorted_values[i + 1] - sorted_values[i]);
}

QuerySummary summarize(std::span<const double> values, const SamplerConfig& cfg) {
    const std::size_t n = values.size();
    if (n == 0) throw std::invalid_argument("summarize: empty input");
    if (!(cfg.ci_level > 0.0) || !(cfg.ci_level < 1.0)) {
        throw std::invalid_argument("summarize: ci_level must lie in (0,1)");
    }

    QuerySummary s;
    s.samples = n;

    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(n);

    if (n >= 2) {
        double ss = 0.0;
        for (double v : values) {
            const double d = v - s.mean;
            ss += d * d;
        }
        s.sd = std::sqrt(ss / static_cast<double>(n - 1));
    }

    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    s.quantile_lower_p = (1.0 - cfg.ci_level) / 2.0;
    s.quantile_upper_p = 1.0 - s.quantile_lower_p;
    s.ci_lower = empirical_quantile(sorted, s.quantile_lower_p);
    s.ci_upper = empirical_quantile(sorted, s.quantile_upper_p);

    const std::size_t bins = std::max<std::size_t>(1, cfg.histogram_bins);
    const double lo = sorted.front();
    const double hi = sorted.back();
    if (lo == hi) {
        s.histogram.push_back({lo, hi, static_cast<std::uint64_t>(n)});
        return s;
    }
    const double width = (hi - lo) / static_cast<double>(bins);
    s.histogram.resize(bins);
    for (std::size_t k = 0; k < bins; ++k) {
        s.histogram[k].left = lo + static_cast<double>(k) * width;
        s.histogram[k].right = (k + 1 == bins) ? hi : lo + static_cast<double>(k + 1) * width;
    }
    for (double v : sorted) {
        std::size_t k = static_cast<std::size_t>((v - lo) / width);
        if (k >= bins) k = bins - 1;
        ++s.histogram[k].count;
    }
    return s;
}

}  // namespace dagbayes
