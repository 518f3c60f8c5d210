#pragma once

#include <cstdint>
#include <optional>

#include "emloc/field.hpp"
#include "emloc/filter.hpp"
#include "emloc/lia.hpp"
#include "emloc/refine.hpp"
#include "emloc/sector.hpp"
#include "emloc/sign_tracking.hpp"
#include "emloc/solver.hpp"

namespace emloc {

struct PipelineOptions {
    double bp_low_hz = 15.0;
    double bp_high_hz = 25.0;
    int bp_order = 4;
    double lpf_cut_hz = 0.4;
    int lpf_order = 4;
    double settle_s = 6.0;
    std::optional<std::array<double, 3>> reference_freqs_hz; // defaults to the coil frequencies
    CrossingThresholds crossing;
    SolverOptions solver;
    RefineOptions refine;
};

struct PipelineStats {
    std::uint64_t samples = 0;
    std::uint64_t pre_settle = 0;
    std::uint64_t gated = 0;
    std::uint64_t solved = 0;
    std::uint64_t no_convergence = 0;
    std::uint64_t outlier_rejected = 0;
    std::uint64_t accepted = 0;
};

/// Streaming estimator: band-pass, derotation into the handshake frame, lock-in
/// demodulation (compensated for the band-pass response at each reference frequency),
/// sign tracking, gating, position solve and refinement. One instance per stream.
class Pipeline {
public:
    Pipeline(const BeaconSpec& model, double fs_hz, PipelineOptions opt = {});

    /// Resets filters, references, signs and sector state against the new frame.
    void handshake(const HandshakeFrame& frame);

    /// Advances the chain by one sample. Returns a smoothed estimate when one was
    /// accepted this sample; nullopt during settling, gating or rejection.
    std::optional<PoseEstimate> process(const MagSample& sample, const Attitude& nav_attitude);

    bool initialized() const { return initialized_; }
    const PipelineStats& stats() const { return stats_; }
    const LiaOutput& last_lia() const { return last_lia_; }
    const SignState& signs() const { return tracker_.state(); }
    const SignTracker& sign_tracker() const { return tracker_; }
    const Sector& sector() const { return sector_; }
    bool sector_low_confidence() const { return sector_low_conf_; }
    const HandshakeFrame& frame() const { return frame_; }

private:
    BeaconSpec model_;
    double fs_;
    PipelineOptions opt_;
    std::array<double, 3> ref_freqs_;
    std::array<BiquadCascade, 3> band_pass_;
    std::array<double, 3> bp_gain_;  // |H_bp| at each reference frequency
    std::array<double, 3> bp_phase_; // arg H_bp at each reference frequency
    LiaBank lia_;
    SignTracker tracker_;
    EstimateRefiner refiner_;
    HandshakeFrame frame_;
    PoseEstimate guess_;
    Sector sector_;
    bool sector_low_conf_ = false;
    LiaOutput last_lia_;
    PipelineStats stats_;
    double t0_ = 0.0;
    bool initialized_ = false;
};

} // namespace emloc
