#pragma once

// Ising denoising model on an H x W grid with 4-neighbour edges (no wraparound):
//
//   p(x, z) proportional to exp(eta1 sum_{(i,j)} z_i z_j + eta2 sum_i z_i x_i),
//   z_i, x_i in {-1, +1}.
//
// Exact routines enumerate all 2^sites configurations of z. Bit i of a state
// index set means z_i = +1; sites are numbered in row-major order.

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lvkit/common.hpp"

namespace lvkit::inference {

struct IsingInstance {
    int height = 0;
    int width = 0;
    std::vector<int> x;  // row-major, entries -1 or +1
    double eta1 = 0.0;
    double eta2 = 0.0;

    int sites() const { return height * width; }
    /// Neighbours of site i in the order up, left, right, down.
    std::vector<int> neighbors(int i) const;
    /// Each undirected edge once, as (i, j) with i < j.
    std::vector<std::pair<int, int>> edges() const;
};

/// Positive dimensions, x of length height*width with +-1 entries, finite couplings.
void validate(const IsingInstance& instance);

inline constexpr int kMaxExactIsingSites = 16;

struct IsingExactResult {
    Eigen::VectorXd posterior;  // 2^sites entries
    Eigen::VectorXd marginals;  // p(z_i = +1 | x)
    double log_px = 0.0;        // normalized ln p(x)
    double log_unnormalized_evidence = 0.0;  // ln sum_z psi(x, z)
};

/// ConfigError beyond 16 sites.
IsingExactResult ising_exact(const IsingInstance& instance);

/// p(z_i = +1 | z_-i, x) = sigma(2 (eta1 sum_{j in N(i)} z_j + eta2 x_i)).
double site_conditional(const IsingInstance& instance, const std::vector<int>& z, int i);

/// One raster-order sweep of single-site Gibbs updates, in place.
void gibbs_sweep(const IsingInstance& instance, std::vector<int>& z, Rng& rng);

struct GibbsResult {
    Eigen::VectorXd marginals;  // fraction of post-burn-in sweeps with z_i = +1
    std::vector<int> final_state;
};

/// Chain started at z = x; statistics collected after each of `sweeps` sweeps
/// following `burn_in` discarded sweeps.
GibbsResult gibbs_ising(const IsingInstance& instance, long long sweeps, long long burn_in, Rng& rng);

struct MeanFieldState {
    Eigen::VectorXd q1;  // q_i(z_i = +1)
    double free_energy = 0.0;
};

/// KL(prod q || exp(-E)) against the unnormalized joint:
/// sum_i [q ln q + (1-q) ln(1-q)] - eta1 sum_edges mu_i mu_j - eta2 sum_i x_i mu_i, mu = 2q - 1.
double mean_field_free_energy(const IsingInstance& instance, const Eigen::VectorXd& q1);

/// KL(p(z|x) || prod q) given the exact result.
double kl_posterior_to_mean_field(const IsingExactResult& exact, const Eigen::VectorXd& q1);

struct MfviConfig {
    int max_sweeps = 1000;
    double tol = 1e-10;
    /// Record the free energy after every single-site update.
    bool record_site_updates = false;
};

struct MfviResult {
    MeanFieldState state;
    /// free_energy per sweep, plus kl_exact (KL(p(z|x) || prod q)) when sites <= 16.
    Trace trace;
    std::vector<double> site_free_energies;  // initial value first, then one per update
    int sweeps = 0;
    bool converged = false;
};

/// Coordinate ascent q_i <- sigma(2 (eta1 sum_j mu_j + eta2 x_i)) in raster order from
/// q_i = 0.5 + 1e-3 x_i; stops when no site moves by tol or more.
MfviResult mfvi_ising(const IsingInstance& instance, const MfviConfig& config = {});

/// Draws (x, z) from the joint model: z from its Ising marginal (exactly up to
/// 16 sites, otherwise by 1000 Gibbs sweeps), then x_i = z_i with probability sigma(2 eta2).
std::pair<std::vector<int>, std::vector<int>> sample_ising(int height, int width, double eta1, double eta2, Rng& rng);

}  // namespace lvkit::inference
