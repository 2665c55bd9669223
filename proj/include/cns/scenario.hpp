#pragma once

#include "cns/grid.hpp"
#include "cns/model_config.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace cns {

/// Identifier written next to every seed in run outputs.
inline constexpr const char* kRngAlgorithm = "mt19937_64/uniform53";

/// Seeded 64-bit Mersenne twister. uniform() takes the top 53 bits of one
/// draw, so streams are reproducible across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    std::mt19937_64 eng_;
};

/// Grid-independent smooth field sum_k a_k prod_axis cos(k_axis pi x / L),
/// normalised so that its values lie in [mean - amplitude, mean + amplitude].
/// Every mode has zero normal derivative on the walls.
class CosineModes {
public:
    CosineModes() = default;
    CosineModes(Rng& rng, int dim, int max_mode, std::array<double, 3> extents);

    double operator()(double x, double y, double z) const;
    ScalarField sample(const Grid& grid, double mean, double amplitude) const;

private:
    int dim_ = 2;
    std::array<double, 3> extents_{1.0, 1.0, 1.0};
    std::vector<std::array<int, 3>> k_;
    std::vector<double> a_;
    double norm_ = 1.0;
};

/// Divergence-free face field with |u|_inf = amplitude. In 2D it is the
/// discrete curl of a random sine stream function (exactly solenoidal); in 3D
/// a smooth random field is projected.
VectorField random_solenoidal(const Grid& grid, Rng& rng, double amplitude, int max_mode = 3);

/// Porous-medium Barenblatt profile for n_t = (C_D n^(m-1) n_x)_x on the line,
/// centred at x0, at time t (> 0) with height parameter C.
double barenblatt(double x, double t, double x0, double C, double m, double c_d);

enum class InitialKind { random, uniform, barenblatt };

/// random: solenoidal field of size u_amplitude (zero if the amplitude is 0);
/// stokes: steady Stokes response to the initial buoyancy n0 grad(phi).
enum class VelocityInit { random, stokes };

struct InitialSpec {
    InitialKind kind = InitialKind::random;
    double n_mean = 1.0;
    double n_amplitude = 0.5;
    double c_mean = 1.0;
    double c_amplitude = 0.5;
    double u_amplitude = 0.0;
    int modes = 3;
    VelocityInit velocity = VelocityInit::random;
    double barenblatt_time = 1.0;
    double barenblatt_height = 0.25;
};

const char* to_string(InitialKind k);
InitialKind initial_kind_from_string(const std::string& s);
const char* to_string(VelocityInit v);
VelocityInit velocity_init_from_string(const std::string& s);

/// Deterministic initial data for `seed`. Draw order: n modes, c modes, u.
InitialData make_initial(const InitialSpec& spec, const Grid& grid, const ModelParams& p, const PotentialSpec& phi,
                         std::uint64_t seed);

} // namespace cns
