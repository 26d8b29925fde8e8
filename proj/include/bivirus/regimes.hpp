#ifndef BIVIRUS_REGIMES_HPP
#define BIVIRUS_REGIMES_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bivirus/dynamics.hpp"
#include "bivirus/graph.hpp"
#include "bivirus/sis.hpp"

namespace bivirus {

enum class Region { R1, R2, R3, R4, R5, R6 };
enum class Attractor { VirusFree, Virus1Only, Virus2Only, Coexistence };

std::string to_string(Region r);
std::string to_string(Attractor a);

/// Threshold products and the region/attractor they imply.
///
/// Region map: R1 both base products <= 1 (virus free); R2/R3 exactly one
/// base product > 1 (that virus survives alone); with both base products
/// > 1 the refined products tau1*lambda(S_{y*}A), tau2*lambda(S_{x*}B)
/// decide: R5 (first > 1, second <= 1) keeps Virus 1, R4 the mirror keeps
/// Virus 2, R6 (both > 1) yields coexistence. Both refined products <= 1
/// with both base products > 1 contradicts the threshold-curve geometry
/// and raises InternalInconsistency; it is numerically reachable only on
/// the degenerate knife edge (e.g. the same regular graph with tau1 =
/// tau2), which the boundary flag marks.
struct RegimeReport {
    double t1_lam_a = 0.0;     // tau1 * lambda(A)
    double t2_lam_b = 0.0;     // tau2 * lambda(B)
    double t1_lam_sya = 0.0;   // tau1 * lambda(S_{y*} A); equals t1_lam_a when y* = 0
    double t2_lam_sxb = 0.0;   // tau2 * lambda(S_{x*} B); equals t2_lam_b when x* = 0
    Region region = Region::R1;
    Attractor predicted = Attractor::VirusFree;
    bool boundary = false;     // some product within 1e-9 of 1
    std::vector<double> x_star;
    std::vector<double> y_star;
};

struct ClassifyOptions {
    double eig_tol = 1e-10;
    double fp_tol = 1e-12;
    double boundary_band = 1e-9;  // products this close to 1 classify as "<= 1"
};

RegimeReport classify(const VirusParams& p1, const VirusParams& p2, const Graph& a,
                      const Graph& b, const ClassifyOptions& opt = {});

/// The two threshold curves bounding the survival regions:
/// blue tau1*(tau2) = 1/lambda(S_{y*(tau2)}A), red tau2*(tau1) =
/// 1/lambda(S_{x*(tau1)}B). Grid points below the corner (fixed point
/// zero) emit the constant 1/lambda(A) resp. 1/lambda(B).
struct ThresholdCurves {
    std::vector<double> tau2_grid;
    std::vector<double> blue_curve;
    std::vector<double> tau1_grid;
    std::vector<double> red_curve;
};

ThresholdCurves threshold_curves(const Graph& a, const Graph& b, double tau_min, double tau_max,
                                 std::size_t steps, const ClassifyOptions& opt = {});

enum class VerifyStatus { NotRun, Match, Mismatch, Failed };

struct SweepCell {
    double tau1 = 0.0;
    double tau2 = 0.0;
    std::optional<RegimeReport> report;  // empty when classification failed
    std::string error;
    VerifyStatus verified = VerifyStatus::NotRun;
    Attractor observed = Attractor::VirusFree;  // meaningful when verified != NotRun
    std::string verify_error;
};

struct SweepOptions {
    bool verify = false;
    std::uint64_t rng_seed = 0;
    std::uint64_t seeds_per_cell = 5;
    double avg_class_tol = 1e-4;   // avg projection below this counts as zero
    double t_end_cap = 5000.0;
    ClassifyOptions classify_opt;
};

/// Classifies every (tau1, tau2) cell; with verify set, runs
/// multi-start simulations per cell and compares the empirical attractor
/// class against the prediction. Cells are independent; per-cell errors
/// are collected. Cell order: tau1 outer, tau2 inner.
std::vector<SweepCell> sweep(const Graph& a, const Graph& b,
                             const std::vector<double>& tau1_grid,
                             const std::vector<double>& tau2_grid, const SweepOptions& opt = {});

/// Attractor class of an average projection under the sweep tolerance.
Attractor classify_avg_projection(double avg_x, double avg_y, double tol);

} // namespace bivirus

#endif
