#ifndef SBMD_GEOMETRY_HPP
#define SBMD_GEOMETRY_HPP

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "sbmd/blocks.hpp"

namespace sbmd {

enum class GeomKind { euclidean_box, euclidean_ball, entropy_simplex };

// Per-block geometry: the feasible set X_i together with its distance
// generating function (modulus 1). Euclidean kinds use w(x) = |x|^2/2 with
// the l2 norm; the simplex uses the negative entropy with the l1 norm.
class BlockGeometry {
public:
    static BlockGeometry box(std::vector<double> lower, std::vector<double> upper);
    static BlockGeometry ball(std::vector<double> center, double radius);
    static BlockGeometry simplex(int dim);

    GeomKind kind() const { return kind_; }
    int dim() const { return dim_; }
    bool is_euclidean() const { return kind_ != GeomKind::entropy_simplex; }
    bool is_bounded() const;

    const std::vector<double>& lower() const { return lower_; }
    const std::vector<double>& upper() const { return upper_; }
    const std::vector<double>& center() const { return center_; }
    double radius() const { return radius_; }

    bool contains(std::span<const double> x, double tol = 1e-12) const;

private:
    BlockGeometry() = default;
    GeomKind kind_ = GeomKind::euclidean_box;
    int dim_ = 0;
    std::vector<double> lower_, upper_;  // box
    std::vector<double> center_;         // ball
    double radius_ = 0.0;                // ball
};

// Block-separable regularizer chi(x) = sum_i chi_i(x^(i)); each term is
// either zero or a weighted l1 norm.
struct RegularizerTerm {
    enum class Kind { zero, l1 };
    Kind kind = Kind::zero;
    double weight = 0.0;

    static RegularizerTerm zero() { return {}; }
    static RegularizerTerm l1(double weight);
    double eval(std::span<const double> x) const;
};

class SeparableRegularizer {
public:
    explicit SeparableRegularizer(std::vector<RegularizerTerm> terms) : terms_(std::move(terms)) {}
    static SeparableRegularizer l1_uniform(int blocks, double weight);

    int block_count() const { return static_cast<int>(terms_.size()); }
    const RegularizerTerm& term(int i) const { return terms_.at(static_cast<std::size_t>(i)); }
    double eval(const BlockVector& x) const;

private:
    std::vector<RegularizerTerm> terms_;
};

// Geometry for every block plus the derived set constants: D_i (range of w_i
// over X_i, empty when X_i is unbounded) and the quadratic growth constant Q
// (1 for all-euclidean setups, unavailable when an entropy block is present).
class ProxSetup {
public:
    ProxSetup(std::shared_ptr<const BlockStructure> structure, std::vector<BlockGeometry> geometries);

    static ProxSetup boxes(std::shared_ptr<const BlockStructure> structure,
                           double lower, double upper);
    static ProxSetup free_space(std::shared_ptr<const BlockStructure> structure);

    const BlockStructure& structure() const { return *structure_; }
    std::shared_ptr<const BlockStructure> structure_ptr() const { return structure_; }
    int block_count() const { return static_cast<int>(geometries_.size()); }
    const BlockGeometry& geometry(int i) const { return geometries_.at(static_cast<std::size_t>(i)); }

    std::optional<double> D(int i) const { return D_.at(static_cast<std::size_t>(i)); }
    const std::vector<std::optional<double>>& D() const { return D_; }
    std::optional<double> sum_D() const;
    std::optional<double> Q() const { return Q_; }

    bool contains(const BlockVector& x, double tol = 1e-12) const;
    // Per-block minimizer of w_i; the canonical starting point x_1.
    BlockVector omega_min_point() const;

private:
    std::shared_ptr<const BlockStructure> structure_;
    std::vector<BlockGeometry> geometries_;
    std::vector<std::optional<double>> D_;
    std::optional<double> Q_;
};

// w_i and its gradient.
double omega(const BlockGeometry& geom, std::span<const double> x);
void omega_grad(const BlockGeometry& geom, std::span<const double> x, std::span<double> out);

// Bregman prox-function V_i(z,x) = w(x) - w(z) - <w'(z), x-z>.
double bregman(const BlockGeometry& geom, std::span<const double> z, std::span<const double> x);
double bregman(const ProxSetup& setup, int i, std::span<const double> z, std::span<const double> x);

// Prox-mapping P_i(v,y,gamma) = argmin_{u in X_i} <y,u> + V_i(u,v)/gamma.
std::vector<double> prox_step(const BlockGeometry& geom, std::span<const double> v,
                              std::span<const double> y, double gamma);
std::vector<double> prox_step(const ProxSetup& setup, int i, std::span<const double> v,
                              std::span<const double> y, double gamma);

// Composite prox-mapping: the regularizer term is added to the objective.
// Supported in closed form for euclidean boxes and origin-centered balls.
std::vector<double> composite_prox_step(const BlockGeometry& geom, std::span<const double> v,
                                        std::span<const double> y, double gamma,
                                        const RegularizerTerm& chi);
std::vector<double> composite_prox_step(const ProxSetup& setup, int i, std::span<const double> v,
                                        std::span<const double> y, double gamma,
                                        const RegularizerTerm& chi);

// D_i = max_{X_i} w - min_{X_i} w; empty for unbounded geometries.
std::optional<double> omega_range(const BlockGeometry& geom);

// Per-block norms and their root-sum-square aggregate. Primal mode uses the
// block norms (l2 / l2 / l1); dual mode uses the conjugates (l2 / l2 / linf).
enum class NormMode { primal, dual };
struct BlockNorms {
    std::vector<double> per_block;
    double aggregate = 0.0;
};
BlockNorms block_norms(const BlockVector& x, const ProxSetup& setup,
                       NormMode mode = NormMode::primal);

double block_norm(const BlockGeometry& geom, std::span<const double> x, NormMode mode);

}  // namespace sbmd

#endif
