// cpwq: loss budgets, notch-trace fits, power sweeps, loss-vs-count
// regression and gmon T1 spectra for CPW resonators with airbridges.
//
// Exit codes: 0 success, 2 usage error, 3 parse error, 4 fit failure.

#include <CLI11.hpp>

#include <complex>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cpwq/cpwq.hpp"

namespace fs = std::filesystem;
using namespace cpwq;

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir;
};

io::ProjectConfig resolve_config(const CommonOpts& common) {
    io::ProjectConfig cfg = common.config_path.empty()
                                ? io::config_from_env_or_default()
                                : io::load_config(common.config_path);
    if (!common.out_dir.empty()) cfg.output_dir = common.out_dir;
    return cfg;
}

void add_common(CLI::App* cmd, CommonOpts& common) {
    cmd->add_option("--config", common.config_path,
                    "Config file (default: $CPWQ_CONFIG or built-ins)");
    cmd->add_option("-o,--out", common.out_dir, "Output directory");
}

void add_geometry_flags(CLI::App* cmd, std::optional<double>& cw,
                        std::optional<double>& gap, std::optional<double>& eps,
                        std::optional<double>& f0, std::optional<double>& qc) {
    cmd->add_option("--center-width-um", cw, "CPW center trace width (um)");
    cmd->add_option("--gap-um", gap, "CPW gap to ground (um)");
    cmd->add_option("--substrate-epsr", eps, "Substrate relative permittivity");
    cmd->add_option("--f0-ghz", f0, "Resonance frequency (GHz)");
    cmd->add_option("--coupling-q", qc, "Coupling quality factor");
}

void add_bridge_flags(CLI::App* cmd, std::optional<double>& span,
                      std::optional<double>& width, std::optional<double>& height) {
    cmd->add_option("--bridge-span-um", span, "Trace width under the bridge (um)");
    cmd->add_option("--bridge-width-um", width, "Bridge extent along the line (um)");
    cmd->add_option("--bridge-height-um", height, "Bridge height above the trace (um)");
}

void apply_overrides(io::ProjectConfig& cfg, const std::optional<double>& cw,
                     const std::optional<double>& gap,
                     const std::optional<double>& eps,
                     const std::optional<double>& f0,
                     const std::optional<double>& qc,
                     const std::optional<double>& span,
                     const std::optional<double>& width,
                     const std::optional<double>& height) {
    if (cw) cfg.cpw.center_width = *cw * 1e-6;
    if (gap) cfg.cpw.gap = *gap * 1e-6;
    if (eps) cfg.cpw.substrate_rel_permittivity = *eps;
    if (f0) cfg.resonance_freq = *f0 * 1e9;
    if (qc) cfg.coupling_q = *qc;
    if (span) cfg.bridge.span_width = *span * 1e-6;
    if (width) cfg.bridge.bridge_width = *width * 1e-6;
    if (height) cfg.bridge.height = *height * 1e-6;
    cfg.validate();
}

S21Trace load_trace(const fs::path& path, const std::string& format) {
    std::string fmt = format;
    if (fmt == "auto") {
        const std::string ext = path.extension().string();
        fmt = (ext == ".s2p" || ext == ".S2P") ? "touchstone" : "csv";
    }
    if (fmt == "touchstone") return io::parse_touchstone(path).front();
    if (fmt == "csv") return io::parse_csv_complex(path);
    throw std::domain_error("unknown trace format '" + fmt + "'");
}

void write_fit_outputs(const fs::path& out_dir, const std::string& stem,
                       const S21Trace& trace, const FitResult& fit,
                       bool plot) {
    io::Report rep("fit");
    rep.add("input_stem", stem);
    rep.add("f0_hz", fit.f0, 12);
    rep.add("f0_err_hz", fit.f0_err);
    rep.add("qi", fit.qi);
    rep.add("qi_err", fit.qi_err);
    rep.add("qc_mag", fit.qc);
    rep.add("qc_err", fit.qc_err);
    rep.add("ql", fit.ql);
    rep.add("ql_err", fit.ql_err);
    rep.add("asymmetry_angle_rad", fit.asymmetry_angle);
    rep.add("asymmetry_angle_err_rad", fit.asymmetry_angle_err);
    rep.add("residual_rms", fit.residual_rms);
    rep.add("loss", 1.0 / fit.qi);
    if (trace.input_power_dbm) {
        rep.add("input_power_dbm", *trace.input_power_dbm);
        rep.add("mean_photon_number", photon_number(fit, *trace.input_power_dbm));
        rep.add("photon_calibration", "n = 2 Ql^2 P / (hbar w0^2 Qc)");
    }
    if (!fit.warning.empty()) rep.add("warning", fit.warning);
    rep.write(out_dir / (stem + "_fit.txt"));

    if (!plot) return;
    io::Series data_mag, model_mag, data_ph, model_ph;
    data_mag.markers = true;
    data_mag.line = false;
    data_mag.label = "data";
    model_mag.color = "#d62728";
    model_mag.label = "fit";
    data_ph = data_mag;
    model_ph = model_mag;
    for (std::size_t i = 0; i < trace.frequencies.size(); ++i) {
        const double f_ghz = trace.frequencies[i] / 1e9;
        const auto m = notch_s21(trace.frequencies[i], fit.f0, fit.ql, fit.qc,
                                 fit.asymmetry_angle);
        data_mag.x.push_back(f_ghz);
        data_mag.y.push_back(std::abs(trace.s21[i]));
        model_mag.x.push_back(f_ghz);
        model_mag.y.push_back(std::abs(m));
        data_ph.x.push_back(f_ghz);
        data_ph.y.push_back(std::arg(trace.s21[i]));
        model_ph.x.push_back(f_ghz);
        model_ph.y.push_back(std::arg(m));
    }
    io::SvgPlot mag("S21 magnitude", "frequency (GHz)", "|S21|");
    mag.add(data_mag);
    mag.add(model_mag);
    io::SvgPlot ph("S21 phase", "frequency (GHz)", "arg S21 (rad)");
    ph.add(data_ph);
    ph.add(model_ph);
    io::SvgFigure fig;
    fig.add_panel(std::move(mag));
    fig.add_panel(std::move(ph));
    fig.write(out_dir / (stem + "_fit.svg"));
}

int run_budget(const io::ProjectConfig& cfg,
               const std::vector<std::string>& layer_args, int bridge_count,
               double scaffold_participation, double tunnel_pitch_um,
               bool single_surface, std::optional<double> resonator_cap_ff) {
    const LineParams lp = line_params(cfg.cpw);
    const double c_res = resonator_cap_ff
                             ? *resonator_cap_ff * 1e-15
                             : quarter_wave_capacitance(cfg.resonance_freq,
                                                        lp.char_impedance);
    const double c_bridge = bridge_capacitance(cfg.bridge);
    const bool both = !single_surface;

    // Layers: explicit name=thickness_nm arguments, otherwise every preset.
    std::map<std::string, DielectricSpec> layers;
    if (layer_args.empty()) {
        layers = cfg.dielectric_presets;
    } else {
        for (const auto& arg : layer_args) {
            const auto eq = arg.find('=');
            const std::string name = arg.substr(0, eq);
            const auto it = cfg.dielectric_presets.find(name);
            if (it == cfg.dielectric_presets.end())
                throw std::domain_error("unknown dielectric preset '" + name + "'");
            DielectricSpec spec = it->second;
            if (eq != std::string::npos)
                spec.thickness = std::stod(arg.substr(eq + 1)) * 1e-9;
            layers[name] = spec;
        }
    }

    io::Report rep("budget");
    rep.add("center_width_um", cfg.cpw.center_width * 1e6);
    rep.add("gap_um", cfg.cpw.gap * 1e6);
    rep.add("substrate_rel_permittivity", cfg.cpw.substrate_rel_permittivity);
    rep.add("eff_permittivity", lp.eff_permittivity);
    rep.add("char_impedance_ohm", lp.char_impedance);
    rep.add("cap_per_length_f_per_m", lp.cap_per_length);
    rep.add("ind_per_length_h_per_m", lp.ind_per_length);
    rep.add("phase_velocity_m_per_s", lp.phase_velocity);
    rep.add("resonance_freq_ghz", cfg.resonance_freq / 1e9);
    rep.add("quarter_wave_length_mm",
            quarter_wave_length(cfg.resonance_freq, lp.eff_permittivity) * 1e3);
    rep.add("resonator_capacitance_ff", c_res * 1e15);
    rep.add("bridge_span_um", cfg.bridge.span_width * 1e6);
    rep.add("bridge_width_um", cfg.bridge.bridge_width * 1e6);
    rep.add("bridge_height_um", cfg.bridge.height * 1e6);
    rep.add("bridge_capacitance_ff", c_bridge * 1e15);
    rep.add("bridge_count", bridge_count);
    rep.add("lossy_surfaces", both ? 2 : 1);

    double participation_total = 0.0;
    double loss_total = 0.0;
    for (const auto& [name, spec] : layers) {
        const double p = bridge_layer_participation(spec, cfg.bridge, c_res, both);
        const double l = per_bridge_loss(spec, cfg.bridge, c_res, both);
        participation_total += p;
        loss_total += l;
        rep.add("layer_" + name + "_thickness_nm", spec.thickness * 1e9);
        rep.add("layer_" + name + "_rel_permittivity", spec.rel_permittivity);
        rep.add("layer_" + name + "_loss_tangent", spec.loss_tangent);
        rep.add("layer_" + name + "_participation_per_bridge", p, 12);
        rep.add("layer_" + name + "_loss_per_bridge", l, 12);
        rep.add("layer_" + name + "_q_limit_per_bridge",
                l > 0 ? 1.0 / l : std::numeric_limits<double>::infinity());
    }
    rep.add("participation_per_bridge_total", participation_total, 12);
    rep.add("loss_per_bridge_total", loss_total, 12);

    if (bridge_count > 0) {
        const double total = distributed_bridge_loss(
            loss_total, uniform_bridge_positions(bridge_count));
        rep.add("loss_distributed_total", total, 12);
        rep.add("q_limit_distributed",
                total > 0 ? 1.0 / total : std::numeric_limits<double>::infinity());
    }

    rep.add("scaffold_participation", scaffold_participation);
    rep.add("scaffold_q_limit",
            scaffold_q_limit(scaffold_participation,
                             reference::amorphous_oxide_loss_tangent));

    // Thickness of SiO2-like residue that would explain the measured slope.
    rep.add("measured_loss_per_bridge_low_power",
            reference::loss_per_bridge_low_power);
    rep.add("measured_loss_per_bridge_high_power",
            reference::loss_per_bridge_high_power);
    rep.add("residue_thickness_nm_for_measured_loss",
            residue_thickness_for_loss(reference::loss_per_bridge_low_power, 4.0,
                                       reference::amorphous_oxide_loss_tangent,
                                       cfg.bridge, c_res, both) *
                1e9);

    const auto tun = tunnel_extrapolation(
        cfg.resonator(bridge_count), reference::loss_per_bridge_low_power,
        reference::loss_per_bridge_high_power, tunnel_pitch_um * 1e-6,
        1.0 / reference::bare_qi_low_power, 1.0 / reference::bare_qi_high_power);
    rep.add("tunnel_pitch_um", tunnel_pitch_um);
    rep.add("tunnel_full_coverage_count", tun.full_coverage_count);
    rep.add("tunnel_q_low_power", tun.q_low);
    rep.add("tunnel_q_high_power", tun.q_high);

    rep.add("loss_per_ff_computed",
            loss_per_femtofarad(reference::loss_per_bridge_low_power, c_bridge));
    rep.add("loss_per_ff_reported", reference::loss_per_femtofarad_low_power);
    rep.add("loss_per_ff_photoresist_scaffold",
            reference::photoresist_loss_per_femtofarad);

    rep.write(cfg.output_dir / "budget.txt");
    std::cout << rep.str();
    return 0;
}

int run_regress(const io::ProjectConfig& cfg, const std::string& input,
                const std::string& power, std::optional<double> bridge_cap_ff) {
    LossDataset ds = io::parse_loss_csv(input);
    ds.power_label = power == "high" ? PowerLabel::high : PowerLabel::low;
    const SlopeResult r = fit_loss_per_bridge(ds);
    const double c_bridge =
        bridge_cap_ff ? *bridge_cap_ff * 1e-15 : bridge_capacitance(cfg.bridge);

    io::Report rep("regression");
    rep.add("input", input);
    rep.add("n_points", static_cast<int>(ds.points.size()));
    rep.add("power_label", power);
    rep.add("slope_per_bridge", r.slope, 12);
    rep.add("slope_stderr", r.slope_stderr);
    rep.add("intercept", r.intercept, 12);
    rep.add("intercept_stderr", r.intercept_stderr);
    rep.add("r_squared", r.r_squared, 12);
    rep.add("bridge_capacitance_ff", c_bridge * 1e15);
    rep.add("loss_per_ff_computed", loss_per_femtofarad(r.slope, c_bridge));
    rep.add("loss_per_ff_reported", reference::loss_per_femtofarad_low_power);
    rep.add("loss_per_ff_photoresist_scaffold",
            reference::photoresist_loss_per_femtofarad);
    rep.write(cfg.output_dir / "regression.txt");
    std::cout << rep.str();

    io::Series data;
    data.line = false;
    data.markers = true;
    data.label = "measured";
    for (const auto& p : ds.points) {
        data.x.push_back(p.bridge_count);
        data.y.push_back(p.loss);
    }
    io::Series fitline;
    fitline.color = "#d62728";
    fitline.label = "least squares";
    int n_max = 0;
    for (const auto& p : ds.points) n_max = std::max(n_max, p.bridge_count);
    for (int n = 0; n <= n_max; ++n) {
        fitline.x.push_back(n);
        fitline.y.push_back(r.intercept + r.slope * n);
    }
    io::SvgPlot plot("Loss vs bridge count", "bridge count", "loss (1/Qi)");
    plot.add(data);
    plot.add(fitline);
    plot.write(cfg.output_dir / "regression.svg");
    return 0;
}

int run_qubit_t1(const io::ProjectConfig& cfg, const GmonCircuit& circuit,
                 double q_eff, double fmin_ghz, double fmax_ghz, int points,
                 std::optional<double> measured_t1_us,
                 std::optional<double> measured_freq_ghz) {
    T1Spectrum tail, tail_exact, constq;
    for (double f : linspace(fmin_ghz * 1e9, fmax_ghz * 1e9,
                             static_cast<std::size_t>(points))) {
        const double w = 2.0 * pi * f;
        tail.points.push_back({f, tail_limited_t1(circuit, w, false)});
        tail_exact.points.push_back({f, tail_limited_t1(circuit, w, true)});
        constq.points.push_back({f, constant_q_t1(q_eff, f)});
    }

    if (cfg.output_dir.has_filename())
        fs::create_directories(cfg.output_dir);
    std::ofstream csv(cfg.output_dir / "t1_spectrum.csv", std::ios::binary);
    if (!csv) throw std::runtime_error("cannot write t1_spectrum.csv");
    csv << "freq_hz,t1_tail_s,t1_tail_exact_divider_s,t1_const_q_s\n";
    for (std::size_t i = 0; i < tail.points.size(); ++i)
        csv << io::format_double(tail.points[i].frequency, 17) << ','
            << io::format_double(tail.points[i].t1, 17) << ','
            << io::format_double(tail_exact.points[i].t1, 17) << ','
            << io::format_double(constq.points[i].t1, 17) << '\n';
    csv.close();

    io::Report rep("qubit_t1");
    rep.add("squid_inductance_zero_flux_nh",
            circuit.squid_inductance_zero_flux * 1e9);
    rep.add("geometric_inductance_nh", circuit.geometric_inductance * 1e9);
    rep.add("qubit_capacitance_ff", circuit.qubit_capacitance * 1e15);
    rep.add("tail_loss_resistance_ohm", circuit.tail_loss_resistance);
    rep.add("q_eff", q_eff);
    rep.add("fmin_ghz", fmin_ghz);
    rep.add("fmax_ghz", fmax_ghz);
    rep.add("points", points);
    rep.add("t1_w4_product_s_rad4_per_s4",
            tail.points.front().t1 * std::pow(2.0 * pi * tail.points.front().frequency, 4.0));
    if (measured_t1_us && measured_freq_ghz) {
        const double w = 2.0 * pi * *measured_freq_ghz * 1e9;
        rep.add("measured_t1_us", *measured_t1_us);
        rep.add("measured_freq_ghz", *measured_freq_ghz);
        rep.add("tail_resistance_lower_bound_ohm",
                tail_resistance_lower_bound(circuit, *measured_t1_us * 1e-6, w));
    }
    rep.write(cfg.output_dir / "qubit_t1.txt");
    std::cout << rep.str();

    auto series_of = [](const T1Spectrum& s, const std::string& label,
                        const std::string& color) {
        io::Series out;
        out.label = label;
        out.color = color;
        for (const auto& p : s.points) {
            out.x.push_back(p.frequency / 1e9);
            out.y.push_back(p.t1 * 1e6);
        }
        return out;
    };
    io::SvgPlot plot("Qubit T1 limits", "qubit frequency (GHz)", "T1 (us)");
    plot.set_log_y(true);
    plot.add(series_of(tail, "tail limit, 1/w^4", "#1f77b4"));
    plot.add(series_of(tail_exact, "tail limit, exact divider", "#2ca02c"));
    plot.add(series_of(constq, "constant Qi", "#d62728"));
    plot.write(cfg.output_dir / "t1_spectrum.svg");
    return 0;
}

// Photon number at a given drive power for a TLS-limited resonator requires a
// self-consistent solve: n sets Qi, Qi sets Ql, Ql sets n.
double self_consistent_photon_number(const TlsFitResult& tls, double f0,
                                     double qc, double phi, double power_dbm) {
    double n = 1.0;
    for (int i = 0; i < 200; ++i) {
        const double qi = 1.0 / tls_loss(n, tls);
        FitResult tmp;
        tmp.f0 = f0;
        tmp.ql = loaded_q(qi, qc, phi);
        tmp.qc = qc;
        const double next = photon_number(tmp, power_dbm);
        if (std::abs(next - n) <= 1e-12 * n) return next;
        n = next;
    }
    return n;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"CPW airbridge loss toolkit"};
    app.require_subcommand(1);

    // budget ---------------------------------------------------------------
    CommonOpts budget_common;
    std::optional<double> b_cw, b_gap, b_eps, b_f0, b_qc, b_span, b_width,
        b_height, b_cap_ff;
    std::vector<std::string> b_layers;
    int b_count = 12;
    double b_scaffold = reference::scaffolded_participation;
    double b_pitch_um = 3.0;
    bool b_single_surface = false;
    auto* budget = app.add_subcommand(
        "budget", "Participation-ratio loss budget for a bridged resonator");
    add_common(budget, budget_common);
    add_geometry_flags(budget, b_cw, b_gap, b_eps, b_f0, b_qc);
    add_bridge_flags(budget, b_span, b_width, b_height);
    budget->add_option("--layer", b_layers,
                       "Lossy layer as NAME[=THICKNESS_NM]; repeatable "
                       "(default: every preset)");
    budget->add_option("--bridge-count", b_count, "Number of bridges");
    budget->add_option("--scaffold-participation", b_scaffold,
                       "Participation of the un-released scaffold state");
    budget->add_option("--tunnel-pitch-um", b_pitch_um,
                       "Leg pitch for the full-coverage extrapolation (um)");
    budget->add_flag("--single-surface", b_single_surface,
                     "Lossy layer on one surface instead of two");
    budget->add_option("--resonator-cap-ff", b_cap_ff,
                       "Override the computed quarter-wave capacitance (fF)");

    // fit ------------------------------------------------------------------
    CommonOpts fit_common;
    std::string fit_input, fit_format = "auto";
    bool fit_no_plot = false;
    auto* fit_cmd =
        app.add_subcommand("fit", "Extract Qi/Qc from a notch S21 trace");
    add_common(fit_cmd, fit_common);
    fit_cmd->add_option("-i,--input", fit_input, "Trace file (.csv or .s2p)")
        ->required();
    fit_cmd->add_option("--format", fit_format, "auto | csv | touchstone")
        ->check(CLI::IsMember({"auto", "csv", "touchstone"}));
    fit_cmd->add_flag("--no-plot", fit_no_plot, "Skip the SVG plot");

    // sweep ----------------------------------------------------------------
    CommonOpts sweep_common;
    std::vector<std::string> sweep_inputs;
    std::string sweep_points_csv, sweep_format = "auto";
    auto* sweep_cmd = app.add_subcommand(
        "sweep", "Fit a power sweep and its TLS saturation curve");
    add_common(sweep_cmd, sweep_common);
    sweep_cmd->add_option("-i,--inputs", sweep_inputs,
                          "Trace files with a power_dbm column");
    sweep_cmd->add_option("--points-csv", sweep_points_csv,
                          "Pre-fitted sweep points "
                          "(mean_photon_number,qi,qi_err)");
    sweep_cmd->add_option("--format", sweep_format, "auto | csv | touchstone")
        ->check(CLI::IsMember({"auto", "csv", "touchstone"}));

    // regress ---------------------------------------------------------------
    CommonOpts regress_common;
    std::string regress_input, regress_power = "low";
    std::optional<double> regress_cap_ff;
    std::optional<double> r_span, r_width, r_height;
    auto* regress_cmd = app.add_subcommand(
        "regress", "Least squares of loss vs bridge count");
    add_common(regress_cmd, regress_common);
    regress_cmd->add_option("-i,--input", regress_input,
                            "CSV with bridge_count,loss[,loss_err]")
        ->required();
    regress_cmd->add_option("--power", regress_power, "low | high")
        ->check(CLI::IsMember({"low", "high"}));
    regress_cmd->add_option("--bridge-cap-ff", regress_cap_ff,
                            "Bridge capacitance for the per-fF rate (fF)");
    add_bridge_flags(regress_cmd, r_span, r_width, r_height);

    // qubit-t1 ---------------------------------------------------------------
    CommonOpts qubit_common;
    std::optional<double> q_lj0, q_lg, q_cq, q_rg;
    double q_qeff = 6.5e5, q_fmin = 3.0, q_fmax = 9.0;
    int q_points = 61;
    std::optional<double> q_meas_t1, q_meas_f;
    auto* qubit_cmd = app.add_subcommand(
        "qubit-t1", "Gmon tail-limited and constant-Q T1 spectra");
    add_common(qubit_cmd, qubit_common);
    qubit_cmd->add_option("--lj0-nh", q_lj0, "Zero-flux SQUID inductance (nH)");
    qubit_cmd->add_option("--lg-nh", q_lg, "Geometric tail inductance (nH)");
    qubit_cmd->add_option("--cq-ff", q_cq, "Qubit capacitance (fF)");
    qubit_cmd->add_option("--rg-ohm", q_rg, "Tail loss resistance (ohm)");
    qubit_cmd->add_option("--q-eff", q_qeff, "Constant effective Qi");
    qubit_cmd->add_option("--fmin-ghz", q_fmin, "Grid start (GHz)");
    qubit_cmd->add_option("--fmax-ghz", q_fmax, "Grid end (GHz)");
    qubit_cmd->add_option("--points", q_points, "Grid points");
    qubit_cmd->add_option("--measured-t1-us", q_meas_t1,
                          "Measured T1 for the tail-resistance bound (us)");
    qubit_cmd->add_option("--measured-freq-ghz", q_meas_f,
                          "Frequency of the measured T1 (GHz)");

    // simulate ----------------------------------------------------------------
    auto* sim = app.add_subcommand("simulate", "Generate synthetic data");
    sim->require_subcommand(1);

    CommonOpts sim_trace_common;
    double st_f0 = 6.0, st_qi = 1.5e6, st_qc = 7e5, st_phi = 0.0,
           st_noise = 1e-4, st_span = 5.0;
    std::uint64_t st_seed = 1;
    int st_points = 401;
    std::optional<double> st_power;
    std::string st_output = "trace.csv";
    auto* sim_trace = sim->add_subcommand("trace", "One synthetic notch trace");
    add_common(sim_trace, sim_trace_common);
    sim_trace->add_option("--f0-ghz", st_f0, "Resonance frequency (GHz)");
    sim_trace->add_option("--qi", st_qi, "Internal quality factor");
    sim_trace->add_option("--qc", st_qc, "Coupling quality factor");
    sim_trace->add_option("--phi", st_phi, "Asymmetry angle (rad)");
    sim_trace->add_option("--noise", st_noise, "Noise rms per quadrature");
    sim_trace->add_option("--seed", st_seed, "RNG seed");
    sim_trace->add_option("--points", st_points, "Points in the trace");
    sim_trace->add_option("--span-linewidths", st_span,
                          "Half span in linewidths");
    sim_trace->add_option("--power-dbm", st_power, "Stamp a drive power");
    sim_trace->add_option("--output", st_output, "Output CSV name");

    CommonOpts sim_sweep_common;
    double ss_f0 = 6.0, ss_qc = 7e5, ss_phi = 0.0, ss_noise = 1e-4;
    double ss_ftd = 6.7e-7, ss_nc = 10.0, ss_alpha = 0.5, ss_hp = 1e-7;
    double ss_pmin = -145.0, ss_pmax = -75.0;
    int ss_steps = 15, ss_points = 401;
    std::uint64_t ss_seed = 1;
    auto* sim_sweep = sim->add_subcommand(
        "sweep", "Synthetic power sweep of TLS-limited traces");
    add_common(sim_sweep, sim_sweep_common);
    sim_sweep->add_option("--f0-ghz", ss_f0, "Resonance frequency (GHz)");
    sim_sweep->add_option("--qc", ss_qc, "Coupling quality factor");
    sim_sweep->add_option("--phi", ss_phi, "Asymmetry angle (rad)");
    sim_sweep->add_option("--noise", ss_noise, "Noise rms per quadrature");
    sim_sweep->add_option("--f-tan-delta", ss_ftd, "TLS loss at zero power");
    sim_sweep->add_option("--n-c", ss_nc, "Critical photon number");
    sim_sweep->add_option("--alpha", ss_alpha, "Saturation exponent");
    sim_sweep->add_option("--hp-loss", ss_hp, "Power-independent loss");
    sim_sweep->add_option("--power-dbm-min", ss_pmin, "Lowest drive power");
    sim_sweep->add_option("--power-dbm-max", ss_pmax, "Highest drive power");
    sim_sweep->add_option("--power-steps", ss_steps, "Number of powers");
    sim_sweep->add_option("--points", ss_points, "Points per trace");
    sim_sweep->add_option("--seed", ss_seed, "RNG seed");

    CommonOpts sim_ds_common;
    double sd_slope = reference::loss_per_bridge_low_power;
    double sd_intercept = 6.7e-7, sd_noise = 0.0;
    std::vector<int> sd_counts{0, 12, 24, 49, 98};
    std::uint64_t sd_seed = 1;
    std::string sd_output = "dataset.csv";
    auto* sim_ds = sim->add_subcommand(
        "dataset", "Synthetic loss-vs-bridge-count dataset");
    add_common(sim_ds, sim_ds_common);
    sim_ds->add_option("--slope", sd_slope, "Loss per bridge");
    sim_ds->add_option("--intercept", sd_intercept, "Bare loss");
    sim_ds->add_option("--counts", sd_counts, "Bridge counts");
    sim_ds->add_option("--noise", sd_noise, "Gaussian loss noise (absolute)");
    sim_ds->add_option("--seed", sd_seed, "RNG seed");
    sim_ds->add_option("--output", sd_output, "Output CSV name");

    try {
        app.parse(argc, argv);

        if (budget->parsed()) {
            io::ProjectConfig cfg = resolve_config(budget_common);
            apply_overrides(cfg, b_cw, b_gap, b_eps, b_f0, b_qc, b_span, b_width,
                            b_height);
            return run_budget(cfg, b_layers, b_count, b_scaffold, b_pitch_um,
                              b_single_surface, b_cap_ff);
        }

        if (fit_cmd->parsed()) {
            io::ProjectConfig cfg = resolve_config(fit_common);
            const S21Trace trace = load_trace(fit_input, fit_format);
            const FitResult fit = fit_s21(trace);
            if (!fit.warning.empty())
                std::cerr << "warning: " << fit.warning << "\n";
            write_fit_outputs(cfg.output_dir, fs::path(fit_input).stem().string(),
                              trace, fit, !fit_no_plot);
            std::cout << "qi = " << io::format_double(fit.qi) << "\n";
            return 0;
        }

        if (sweep_cmd->parsed()) {
            io::ProjectConfig cfg = resolve_config(sweep_common);
            PowerSweepResult sweep;
            if (!sweep_points_csv.empty()) {
                sweep = io::parse_sweep_csv(sweep_points_csv);
            } else {
                if (sweep_inputs.empty())
                    throw std::domain_error(
                        "sweep needs --inputs traces or --points-csv");
                for (const auto& file : sweep_inputs) {
                    const S21Trace trace = load_trace(file, sweep_format);
                    if (!trace.input_power_dbm)
                        throw std::domain_error("trace " + file +
                                                " carries no power_dbm column");
                    const FitResult f = fit_s21(trace);
                    sweep.points.push_back(
                        {photon_number(f, *trace.input_power_dbm), f.qi, f.qi_err});
                }
                io::write_sweep_csv(sweep, cfg.output_dir / "sweep_points.csv");
            }
            const TlsFitResult tls = fit_tls_power_dependence(sweep);
            io::Report rep("tls_fit");
            rep.add("n_points", static_cast<int>(sweep.points.size()));
            rep.add("f_tan_delta", tls.f_tan_delta);
            rep.add("critical_photon_number", tls.critical_photon_number);
            rep.add("saturation_exponent", tls.saturation_exponent);
            rep.add("power_independent_loss", tls.power_independent_loss);
            rep.add("q_high_power_limit", 1.0 / tls.power_independent_loss);
            rep.add("q_low_power_limit",
                    1.0 / (tls.f_tan_delta + tls.power_independent_loss));
            rep.write(cfg.output_dir / "tls_fit.txt");
            std::cout << rep.str();

            io::Series pts, curve;
            pts.line = false;
            pts.markers = true;
            pts.label = "fitted Qi";
            for (const auto& p : sweep.points) {
                pts.x.push_back(p.mean_photon_number);
                pts.y.push_back(p.qi);
            }
            curve.color = "#d62728";
            curve.label = "TLS saturation fit";
            double n_lo = sweep.points.front().mean_photon_number;
            double n_hi = n_lo;
            for (const auto& p : sweep.points) {
                n_lo = std::min(n_lo, p.mean_photon_number);
                n_hi = std::max(n_hi, p.mean_photon_number);
            }
            for (int i = 0; i <= 200; ++i) {
                const double n =
                    n_lo * std::pow(n_hi / n_lo, i / 200.0);
                curve.x.push_back(n);
                curve.y.push_back(1.0 / tls_loss(n, tls));
            }
            io::SvgPlot plot("Qi vs photon number", "mean photon number", "Qi");
            plot.set_log_x(true);
            plot.set_log_y(true);
            plot.add(pts);
            plot.add(curve);
            plot.write(cfg.output_dir / "sweep.svg");
            return 0;
        }

        if (regress_cmd->parsed()) {
            io::ProjectConfig cfg = resolve_config(regress_common);
            apply_overrides(cfg, {}, {}, {}, {}, {}, r_span, r_width, r_height);
            return run_regress(cfg, regress_input, regress_power, regress_cap_ff);
        }

        if (qubit_cmd->parsed()) {
            io::ProjectConfig cfg = resolve_config(qubit_common);
            GmonCircuit circuit;
            if (q_lj0) circuit.squid_inductance_zero_flux = *q_lj0 * 1e-9;
            if (q_lg) circuit.geometric_inductance = *q_lg * 1e-9;
            if (q_cq) circuit.qubit_capacitance = *q_cq * 1e-15;
            if (q_rg) circuit.tail_loss_resistance = *q_rg;
            circuit.validate();
            if (q_points < 2) throw std::domain_error("need at least 2 points");
            if (!(q_fmin > 0.0 && q_fmax > q_fmin))
                throw std::domain_error("need 0 < fmin < fmax");
            return run_qubit_t1(cfg, circuit, q_qeff, q_fmin, q_fmax, q_points,
                                q_meas_t1, q_meas_f);
        }

        if (sim_trace->parsed()) {
            io::ProjectConfig cfg = resolve_config(sim_trace_common);
            if (st_points < 2) throw std::domain_error("need at least 2 points");
            const double f0 = st_f0 * 1e9;
            const double ql = loaded_q(st_qi, st_qc, st_phi);
            const S21Trace trace = simulate_s21(
                f0, st_qi, st_qc, st_phi,
                symmetric_frequency_grid(f0, ql,
                                         static_cast<std::size_t>(st_points),
                                         st_span),
                st_noise, st_seed, st_power);
            io::write_csv_complex(trace, cfg.output_dir / st_output);
            std::cout << "wrote " << (cfg.output_dir / st_output).string() << "\n";
            return 0;
        }

        if (sim_sweep->parsed()) {
            io::ProjectConfig cfg = resolve_config(sim_sweep_common);
            const TlsFitResult truth{ss_ftd, ss_nc, ss_alpha, ss_hp};
            const double f0 = ss_f0 * 1e9;
            if (ss_steps < 2) throw std::domain_error("need at least 2 powers");
            for (int i = 0; i < ss_steps; ++i) {
                const double p_dbm =
                    ss_pmin + (ss_pmax - ss_pmin) * i / (ss_steps - 1);
                const double n = self_consistent_photon_number(truth, f0, ss_qc,
                                                               ss_phi, p_dbm);
                const double qi = 1.0 / tls_loss(n, truth);
                const double ql = loaded_q(qi, ss_qc, ss_phi);
                const S21Trace trace = simulate_s21(
                    f0, qi, ss_qc, ss_phi,
                    symmetric_frequency_grid(
                        f0, ql, static_cast<std::size_t>(ss_points), 5.0),
                    ss_noise, ss_seed + static_cast<std::uint64_t>(i), p_dbm);
                char name[64];
                std::snprintf(name, sizeof(name), "sweep_trace_%02d.csv", i);
                io::write_csv_complex(trace, cfg.output_dir / name);
            }
            std::cout << "wrote " << ss_steps << " traces to "
                      << cfg.output_dir.string() << "\n";
            return 0;
        }

        if (sim_ds->parsed()) {
            io::ProjectConfig cfg = resolve_config(sim_ds_common);
            LossDataset ds;
            SeededRng rng(sd_seed);
            for (int n : sd_counts) {
                double loss = sd_intercept + sd_slope * n;
                if (sd_noise > 0.0) loss += sd_noise * rng.normal();
                ds.points.push_back({n, loss, std::nullopt});
            }
            io::write_loss_csv(ds, cfg.output_dir / sd_output);
            std::cout << "wrote " << (cfg.output_dir / sd_output).string() << "\n";
            return 0;
        }

        return 0;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const parse_error& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 3;
    } catch (const fit_error& e) {
        std::cerr << "fit error: " << e.what() << "\n";
        return 4;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
