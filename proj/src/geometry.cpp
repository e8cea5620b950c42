#include "sbmd/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sbmd {

namespace {

constexpr double kEntropyFloor = 1e-300;  // clamp for exactly-zero simplex coordinates

double sq(double x) { return x * x; }

double l2(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

void check_finite(std::span<const double> x, const char* what) {
    for (double v : x)
        if (!std::isfinite(v)) throw std::domain_error(std::string(what) + " has non-finite coordinate");
}

double soft_threshold(double w, double t) {
    if (w > t) return w - t;
    if (w < -t) return w + t;
    return 0.0;
}

}  // namespace

BlockGeometry BlockGeometry::box(std::vector<double> lower, std::vector<double> upper) {
    if (lower.size() != upper.size() || lower.empty())
        throw std::invalid_argument("box bounds must be non-empty and of equal length");
    for (std::size_t j = 0; j < lower.size(); ++j) {
        if (std::isnan(lower[j]) || std::isnan(upper[j]) || lower[j] > upper[j])
            throw std::invalid_argument("box requires lower <= upper coordinatewise");
    }
    BlockGeometry g;
    g.kind_ = GeomKind::euclidean_box;
    g.dim_ = static_cast<int>(lower.size());
    g.lower_ = std::move(lower);
    g.upper_ = std::move(upper);
    return g;
}

BlockGeometry BlockGeometry::ball(std::vector<double> center, double radius) {
    if (center.empty()) throw std::invalid_argument("ball center must be non-empty");
    check_finite(center, "ball center");
    if (!(radius > 0.0)) throw std::invalid_argument("ball radius must be positive");
    BlockGeometry g;
    g.kind_ = GeomKind::euclidean_ball;
    g.dim_ = static_cast<int>(center.size());
    g.center_ = std::move(center);
    g.radius_ = radius;
    return g;
}

BlockGeometry BlockGeometry::simplex(int dim) {
    if (dim < 2) throw std::invalid_argument("simplex dimension must be at least 2");
    BlockGeometry g;
    g.kind_ = GeomKind::entropy_simplex;
    g.dim_ = dim;
    return g;
}

bool BlockGeometry::is_bounded() const {
    if (kind_ != GeomKind::euclidean_box) return true;
    for (int j = 0; j < dim_; ++j)
        if (std::isinf(lower_[static_cast<std::size_t>(j)]) ||
            std::isinf(upper_[static_cast<std::size_t>(j)]))
            return false;
    return true;
}

bool BlockGeometry::contains(std::span<const double> x, double tol) const {
    if (static_cast<int>(x.size()) != dim_) return false;
    switch (kind_) {
        case GeomKind::euclidean_box:
            for (int j = 0; j < dim_; ++j) {
                std::size_t k = static_cast<std::size_t>(j);
                if (x[k] < lower_[k] - tol || x[k] > upper_[k] + tol) return false;
            }
            return true;
        case GeomKind::euclidean_ball: {
            double d = 0.0;
            for (int j = 0; j < dim_; ++j) d += sq(x[static_cast<std::size_t>(j)] - center_[static_cast<std::size_t>(j)]);
            return std::sqrt(d) <= radius_ + tol;
        }
        case GeomKind::entropy_simplex: {
            double s = 0.0;
            for (double v : x) {
                if (v < -tol) return false;
                s += v;
            }
            return std::abs(s - 1.0) <= tol;
        }
    }
    return false;
}

RegularizerTerm RegularizerTerm::l1(double weight) {
    if (!(weight >= 0.0) || !std::isfinite(weight))
        throw std::invalid_argument("l1 weight must be finite and nonnegative");
    RegularizerTerm t;
    t.kind = Kind::l1;
    t.weight = weight;
    return t;
}

double RegularizerTerm::eval(std::span<const double> x) const {
    if (kind == Kind::zero) return 0.0;
    double s = 0.0;
    for (double v : x) s += std::abs(v);
    return weight * s;
}

SeparableRegularizer SeparableRegularizer::l1_uniform(int blocks, double weight) {
    std::vector<RegularizerTerm> terms(static_cast<std::size_t>(blocks), RegularizerTerm::l1(weight));
    return SeparableRegularizer(std::move(terms));
}

double SeparableRegularizer::eval(const BlockVector& x) const {
    if (block_count() != x.structure().block_count())
        throw std::invalid_argument("regularizer/structure block count mismatch");
    double s = 0.0;
    for (int i = 0; i < block_count(); ++i) s += term(i).eval(x.block(i));
    return s;
}

ProxSetup::ProxSetup(std::shared_ptr<const BlockStructure> structure,
                     std::vector<BlockGeometry> geometries)
    : structure_(std::move(structure)), geometries_(std::move(geometries)) {
    if (!structure_) throw std::invalid_argument("null block structure");
    if (static_cast<int>(geometries_.size()) != structure_->block_count())
        throw std::invalid_argument("one geometry per block required");
    for (int i = 0; i < structure_->block_count(); ++i) {
        if (geometries_[static_cast<std::size_t>(i)].dim() != structure_->block_size(i))
            throw std::invalid_argument("geometry dimension does not match block size");
    }
    bool all_euclid = true;
    D_.reserve(geometries_.size());
    for (const auto& g : geometries_) {
        D_.push_back(omega_range(g));
        if (!g.is_euclidean()) all_euclid = false;
    }
    Q_ = all_euclid ? std::optional<double>(1.0) : std::nullopt;
}

ProxSetup ProxSetup::boxes(std::shared_ptr<const BlockStructure> structure, double lower,
                           double upper) {
    std::vector<BlockGeometry> geoms;
    geoms.reserve(static_cast<std::size_t>(structure->block_count()));
    for (int i = 0; i < structure->block_count(); ++i) {
        std::size_t ni = static_cast<std::size_t>(structure->block_size(i));
        geoms.push_back(BlockGeometry::box(std::vector<double>(ni, lower), std::vector<double>(ni, upper)));
    }
    return ProxSetup(structure, std::move(geoms));
}

ProxSetup ProxSetup::free_space(std::shared_ptr<const BlockStructure> structure) {
    const double inf = std::numeric_limits<double>::infinity();
    return boxes(std::move(structure), -inf, inf);
}

std::optional<double> ProxSetup::sum_D() const {
    double s = 0.0;
    for (const auto& d : D_) {
        if (!d) return std::nullopt;
        s += *d;
    }
    return s;
}

bool ProxSetup::contains(const BlockVector& x, double tol) const {
    if (!(x.structure() == *structure_)) return false;
    for (int i = 0; i < block_count(); ++i)
        if (!geometry(i).contains(x.block(i), tol)) return false;
    return true;
}

BlockVector ProxSetup::omega_min_point() const {
    BlockVector x = BlockVector::zeros(structure_);
    for (int i = 0; i < block_count(); ++i) {
        const BlockGeometry& g = geometry(i);
        auto blk = x.block(i);
        switch (g.kind()) {
            case GeomKind::euclidean_box:
                for (int j = 0; j < g.dim(); ++j) {
                    std::size_t k = static_cast<std::size_t>(j);
                    blk[k] = std::clamp(0.0, g.lower()[k], g.upper()[k]);
                }
                break;
            case GeomKind::euclidean_ball: {
                double nc = l2(g.center());
                if (nc <= g.radius()) {
                    for (auto& v : blk) v = 0.0;
                } else {
                    double scale = 1.0 - g.radius() / nc;
                    for (int j = 0; j < g.dim(); ++j)
                        blk[static_cast<std::size_t>(j)] = scale * g.center()[static_cast<std::size_t>(j)];
                }
                break;
            }
            case GeomKind::entropy_simplex:
                for (auto& v : blk) v = 1.0 / g.dim();
                break;
        }
    }
    return x;
}

double omega(const BlockGeometry& geom, std::span<const double> x) {
    if (geom.kind() == GeomKind::entropy_simplex) {
        double s = 0.0;
        for (double v : x)
            if (v > 0.0) s += v * std::log(v);
        return s;
    }
    double s = 0.0;
    for (double v : x) s += v * v;
    return 0.5 * s;
}

void omega_grad(const BlockGeometry& geom, std::span<const double> x, std::span<double> out) {
    if (geom.kind() == GeomKind::entropy_simplex) {
        for (std::size_t j = 0; j < x.size(); ++j) {
            if (x[j] <= 0.0) throw std::domain_error("entropy gradient needs strictly positive coordinates");
            out[j] = 1.0 + std::log(x[j]);
        }
        return;
    }
    for (std::size_t j = 0; j < x.size(); ++j) out[j] = x[j];
}

double bregman(const BlockGeometry& geom, std::span<const double> z, std::span<const double> x) {
    if (static_cast<int>(z.size()) != geom.dim() || static_cast<int>(x.size()) != geom.dim())
        throw std::invalid_argument("bregman: dimension mismatch");
    if (!geom.contains(z)) throw std::domain_error("bregman: z outside the feasible set");
    if (!geom.contains(x)) throw std::domain_error("bregman: x outside the feasible set");
    if (geom.kind() == GeomKind::entropy_simplex) {
        // KL divergence; the linear term of the definition cancels on the simplex.
        double s = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) {
            if (z[j] <= 0.0) throw std::domain_error("bregman: entropy base point has a zero coordinate");
            if (x[j] > 0.0) s += x[j] * std::log(x[j] / z[j]);
        }
        return std::max(s, 0.0);
    }
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) s += sq(x[j] - z[j]);
    return 0.5 * s;
}

double bregman(const ProxSetup& setup, int i, std::span<const double> z, std::span<const double> x) {
    return bregman(setup.geometry(i), z, x);
}

std::vector<double> prox_step(const BlockGeometry& geom, std::span<const double> v,
                              std::span<const double> y, double gamma) {
    if (!(gamma > 0.0)) throw std::invalid_argument("prox_step: gamma must be positive");
    if (static_cast<int>(v.size()) != geom.dim() || static_cast<int>(y.size()) != geom.dim())
        throw std::invalid_argument("prox_step: dimension mismatch");
    if (!geom.contains(v)) throw std::domain_error("prox_step: v outside the feasible set");
    check_finite(y, "prox_step dual vector");

    std::vector<double> u(v.size());
    switch (geom.kind()) {
        case GeomKind::euclidean_box:
            for (std::size_t j = 0; j < v.size(); ++j)
                u[j] = std::clamp(v[j] - gamma * y[j], geom.lower()[j], geom.upper()[j]);
            break;
        case GeomKind::euclidean_ball: {
            double d2 = 0.0;
            for (std::size_t j = 0; j < v.size(); ++j) {
                u[j] = v[j] - gamma * y[j] - geom.center()[j];
                d2 += sq(u[j]);
            }
            double d = std::sqrt(d2);
            double scale = d > geom.radius() ? geom.radius() / d : 1.0;
            for (std::size_t j = 0; j < v.size(); ++j) u[j] = geom.center()[j] + scale * u[j];
            break;
        }
        case GeomKind::entropy_simplex: {
            // u_j proportional to v_j * exp(-gamma y_j); max-shift keeps exp in range.
            double shift = -std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < v.size(); ++j) {
                double vj = std::max(v[j], kEntropyFloor);
                u[j] = std::log(vj) - gamma * y[j];
                shift = std::max(shift, u[j]);
            }
            double total = 0.0;
            for (auto& w : u) {
                w = std::exp(w - shift);
                total += w;
            }
            for (auto& w : u) w /= total;
            break;
        }
    }
    return u;
}

std::vector<double> prox_step(const ProxSetup& setup, int i, std::span<const double> v,
                              std::span<const double> y, double gamma) {
    return prox_step(setup.geometry(i), v, y, gamma);
}

std::vector<double> composite_prox_step(const BlockGeometry& geom, std::span<const double> v,
                                        std::span<const double> y, double gamma,
                                        const RegularizerTerm& chi) {
    if (chi.kind == RegularizerTerm::Kind::zero) return prox_step(geom, v, y, gamma);
    if (!geom.is_euclidean())
        throw std::invalid_argument("composite_prox_step: l1 term unsupported with entropy geometry");
    if (!(gamma > 0.0)) throw std::invalid_argument("composite_prox_step: gamma must be positive");
    if (static_cast<int>(v.size()) != geom.dim() || static_cast<int>(y.size()) != geom.dim())
        throw std::invalid_argument("composite_prox_step: dimension mismatch");
    if (!geom.contains(v)) throw std::domain_error("composite_prox_step: v outside the feasible set");
    check_finite(y, "composite_prox_step dual vector");

    const double t = gamma * chi.weight;
    std::vector<double> u(v.size());
    if (geom.kind() == GeomKind::euclidean_box) {
        for (std::size_t j = 0; j < v.size(); ++j)
            u[j] = std::clamp(soft_threshold(v[j] - gamma * y[j], t), geom.lower()[j], geom.upper()[j]);
        return u;
    }
    // Ball: soft-threshold followed by radial projection is the exact argmin
    // only when the ball is centered at the origin.
    for (double c : geom.center())
        if (c != 0.0)
            throw std::invalid_argument(
                "composite_prox_step: l1 term requires an origin-centered ball");
    double d2 = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) {
        u[j] = soft_threshold(v[j] - gamma * y[j], t);
        d2 += sq(u[j]);
    }
    double d = std::sqrt(d2);
    if (d > geom.radius()) {
        double scale = geom.radius() / d;
        for (auto& w : u) w *= scale;
    }
    return u;
}

std::vector<double> composite_prox_step(const ProxSetup& setup, int i, std::span<const double> v,
                                        std::span<const double> y, double gamma,
                                        const RegularizerTerm& chi) {
    return composite_prox_step(setup.geometry(i), v, y, gamma, chi);
}

std::optional<double> omega_range(const BlockGeometry& geom) {
    switch (geom.kind()) {
        case GeomKind::euclidean_box: {
            if (!geom.is_bounded()) return std::nullopt;
            double hi = 0.0, lo = 0.0;
            for (int j = 0; j < geom.dim(); ++j) {
                std::size_t k = static_cast<std::size_t>(j);
                double l = geom.lower()[k], u = geom.upper()[k];
                hi += std::max(l * l, u * u);
                lo += (l <= 0.0 && u >= 0.0) ? 0.0 : std::min(l * l, u * u);
            }
            return 0.5 * (hi - lo);
        }
        case GeomKind::euclidean_ball: {
            double nc = l2(geom.center());
            double far = nc + geom.radius();
            double near = std::max(0.0, nc - geom.radius());
            return 0.5 * (far * far - near * near);
        }
        case GeomKind::entropy_simplex:
            return std::log(static_cast<double>(geom.dim()));
    }
    return std::nullopt;
}

double block_norm(const BlockGeometry& geom, std::span<const double> x, NormMode mode) {
    if (geom.kind() == GeomKind::entropy_simplex) {
        if (mode == NormMode::primal) {
            double s = 0.0;
            for (double v : x) s += std::abs(v);
            return s;
        }
        double m = 0.0;
        for (double v : x) m = std::max(m, std::abs(v));
        return m;
    }
    return l2(x);
}

BlockNorms block_norms(const BlockVector& x, const ProxSetup& setup, NormMode mode) {
    if (!(x.structure() == setup.structure()))
        throw std::invalid_argument("block_norms: structure mismatch");
    BlockNorms out;
    out.per_block.reserve(static_cast<std::size_t>(setup.block_count()));
    double agg = 0.0;
    for (int i = 0; i < setup.block_count(); ++i) {
        double n = block_norm(setup.geometry(i), x.block(i), mode);
        out.per_block.push_back(n);
        agg += n * n;
    }
    out.aggregate = std::sqrt(agg);
    return out;
}

}  // namespace sbmd
