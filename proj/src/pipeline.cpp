#include "emloc/pipeline.hpp"

#include <cmath>

#include "emloc/errors.hpp"

namespace emloc {

namespace {

std::array<double, 3> resolve_refs(const BeaconSpec& model, const PipelineOptions& opt) {
    if (opt.reference_freqs_hz)
        return *opt.reference_freqs_hz;
    return {model.coils[0].freq_hz, model.coils[1].freq_hz, model.coils[2].freq_hz};
}

BiquadCascade make_band_pass(const PipelineOptions& opt, double fs) {
    FilterSpec spec;
    spec.kind = FilterSpec::Kind::band_pass;
    spec.order = opt.bp_order;
    spec.f_low_hz = opt.bp_low_hz;
    spec.f_high_hz = opt.bp_high_hz;
    spec.fs_hz = fs;
    return design_filter(spec);
}

} // namespace

Pipeline::Pipeline(const BeaconSpec& model, double fs_hz, PipelineOptions opt)
    : model_(model),
      fs_(fs_hz),
      opt_(opt),
      ref_freqs_(resolve_refs(model, opt)),
      band_pass_{make_band_pass(opt, fs_hz), make_band_pass(opt, fs_hz),
                 make_band_pass(opt, fs_hz)},
      lia_(ref_freqs_, fs_hz, opt.lpf_cut_hz, opt.lpf_order),
      tracker_(model, fs_hz, opt.crossing),
      refiner_(Vec3::Zero(), 0.0, opt.refine) {
    model_.validate();
    // The band-pass scales and shifts each carrier by its known complex response;
    // demodulated outputs are corrected back so amplitudes stay physical.
    for (int i = 0; i < 3; ++i) {
        const auto h = band_pass_[0].response(ref_freqs_[i]);
        bp_gain_[i] = std::abs(h);
        bp_phase_[i] = std::arg(h);
        if (bp_gain_[i] < 1e-6)
            throw ConfigError("reference frequency outside the band-pass passband");
    }
}

void Pipeline::handshake(const HandshakeFrame& frame) {
    frame_ = frame;
    for (auto& f : band_pass_)
        f.reset();
    lia_.reset();
    tracker_.init(frame.r0);
    sector_ = sector_from_position(frame.r0);
    sector_low_conf_ = false;
    guess_ = PoseEstimate{};
    guess_.r = frame.r0;
    guess_.beacon_yaw = frame.beacon_yaw_at_handshake;
    refiner_ = EstimateRefiner(frame.r0, 0.0, opt_.refine);
    stats_ = PipelineStats{};
    t0_ = 0.0;
    initialized_ = false; // t0 latched on the first sample
}

std::optional<PoseEstimate> Pipeline::process(const MagSample& sample, const Attitude& nav) {
    if (!tracker_.state().initialized)
        throw NotInitializedError("pipeline used before handshake");
    if (!initialized_) {
        t0_ = sample.t;
        initialized_ = true;
    }
    ++stats_.samples;
    const double t = sample.t - t0_;

    Vec3 filtered;
    for (int a = 0; a < 3; ++a)
        filtered[a] = band_pass_[a].step(sample.field[a]);

    const Mat3 r0 = compose_attitude(attitude_delta(nav, frame_.nav_attitude_at_handshake));
    const Vec3 derotated = r0.transpose() * filtered;

    LiaOutput lia = lia_.step(derotated, t);
    for (int i = 0; i < 3; ++i) {
        lia.amp[i] /= bp_gain_[i];
        for (int a = 0; a < 3; ++a)
            lia.phase[i][a] = wrap_angle(lia.phase[i][a] - bp_phase_[i]);
    }
    lia.ready = t >= opt_.settle_s;
    last_lia_ = lia;
    if (!lia.ready) {
        ++stats_.pre_settle;
        return std::nullopt;
    }

    tracker_.update(lia);

    if (auto combo = classify_phase_combo(lia, opt_.solver.gate_gauss)) {
        const auto res = resolve_sector(*combo, sector_);
        sector_ = res.sector;
        sector_low_conf_ = res.low_confidence;
    } else {
        sector_low_conf_ = true;
    }

    if (lia.max_amp() < opt_.solver.gate_gauss) {
        ++stats_.gated;
        return std::nullopt;
    }

    SolveResult solve = solve_position(lia, tracker_.state(), model_, guess_, opt_.solver);
    if (solve.status == SolveStatus::no_convergence) {
        PoseEstimate from_r0;
        from_r0.r = frame_.r0;
        from_r0.beacon_yaw = frame_.beacon_yaw_at_handshake;
        solve = solve_position(lia, tracker_.state(), model_, from_r0, opt_.solver);
    }
    if (solve.status != SolveStatus::ok) {
        ++stats_.no_convergence;
        return std::nullopt;
    }
    ++stats_.solved;

    const auto outcome = refiner_.push(solve.estimate);
    if (!outcome.accepted) {
        ++stats_.outlier_rejected;
        return std::nullopt;
    }
    guess_ = solve.estimate; // warm start from the last accepted raw solve
    ++stats_.accepted;
    return outcome.estimate;
}

} // namespace emloc
