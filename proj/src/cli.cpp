#include "warpft/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "warpft/discretization.hpp"
#include "warpft/format.hpp"
#include "warpft/io.hpp"
#include "warpft/kernels.hpp"
#include "warpft/parallel.hpp"

namespace warpft {

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config:
    case ErrorKind::Domain: return 2;
    case ErrorKind::Shape: return 3;
    case ErrorKind::Format: return 4;
    case ErrorKind::Capability: return 5;
    default: return 1;
  }
}

namespace {

WeightSpec parse_weight(const std::string& text) {
  if (text == "one" || text == "1") return WeightSpec::constant_one();
  const auto colon = text.find(':');
  if (colon != std::string::npos) {
    const std::string kind = text.substr(0, colon), arg = text.substr(colon + 1);
    char* end = nullptr;
    const double v = std::strtod(arg.c_str(), &end);
    if (!arg.empty() && end && *end == '\0') {
      if (kind == "poly") return WeightSpec::polynomial(v);
      if (kind == "exp") return WeightSpec::exponential(v);
    }
  }
  fail(ErrorKind::Config, "weight '" + text + "': expected one, poly:<p> or exp:<a>");
}

std::string jstr(const std::string& s) {
  std::string o = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') o += '\\';
    o += c;
  }
  return o + "\"";
}

const char* jbool(bool b) { return b ? "true" : "false"; }

// Ordered key: value lines inside one brace block.
class Report {
 public:
  explicit Report(std::ostream& os) : os_(os) { os_ << "{\n"; }
  void num(const std::string& k, double v) { line(k, fmt(v)); }
  void integer(const std::string& k, std::size_t v) { line(k, std::to_string(v)); }
  void boolean(const std::string& k, bool v) { line(k, jbool(v)); }
  void str(const std::string& k, const std::string& v) { line(k, jstr(v)); }
  void finish() { os_ << "\n}\n"; }

 private:
  void line(const std::string& k, const std::string& v) {
    if (!first_) os_ << ",\n";
    first_ = false;
    os_ << "  " << jstr(k) << ": " << v;
  }
  std::ostream& os_;
  bool first_ = true;
};

WarpedSystem load_system(const std::string& descriptor, const std::string& atom_cache) {
  WarpedSystem sys = read_descriptor(descriptor);
  if (!atom_cache.empty()) {
    if (std::filesystem::exists(atom_cache))
      load_atom_cache(sys, atom_cache);
    else
      write_atom_cache(sys, atom_cache);
  }
  return sys;
}

Cover cover_for(const WarpedSystem& sys, const std::vector<double>& window) {
  double f_lo, f_hi, t_lo, t_hi;
  if (window.size() == 4) {
    f_lo = window[0];
    f_hi = window[1];
    t_lo = window[2];
    t_hi = window[3];
  } else {
    f_lo = sys.channels.front().center_hz;
    f_hi = sys.channels.back().center_hz;
    double tmax = 0.0;
    for (const auto& c : sys.channels) tmax = std::max(tmax, c.time_hop);
    t_lo = 0.0;
    t_hi = 2.0 * tmax;
  }
  return induced_cover(sys.warp(), sys.delta(), f_lo, f_hi, t_lo, t_hi, sys.params.time_scale);
}

void open_out(const std::string& path, std::ofstream& file) {
  file.open(path, std::ios::binary);
  require(static_cast<bool>(file), ErrorKind::Internal, "cannot open " + path + " for writing");
}

std::vector<double> default_eta_grid() {
  std::vector<double> g;
  for (double e : {1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0}) {
    g.push_back(-e);
    g.push_back(e);
  }
  std::sort(g.begin(), g.end());
  return g;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"warped time-frequency transforms"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "worker threads (fallback: WARPFT_THREADS)")->check(CLI::NonNegativeNumber);

  std::string config, system, signal, coeffs, outp, atom_cache, verify;
  bool iterative = false;
  std::vector<double> window;

  auto* design = app.add_subcommand("design", "build a system descriptor from a config file");
  design->add_option("--config", config)->required();
  design->add_option("--out", outp)->required();

  auto* analyze_cmd = app.add_subcommand("analyze", "signal -> WTC1 coefficients");
  analyze_cmd->add_option("--system", system)->required();
  analyze_cmd->add_option("--signal", signal)->required();
  analyze_cmd->add_option("--out", outp)->required();
  analyze_cmd->add_option("--atom-cache", atom_cache);

  auto* synth = app.add_subcommand("synthesize", "WTC1 coefficients -> signal");
  synth->add_option("--system", system)->required();
  synth->add_option("--coeffs", coeffs)->required();
  synth->add_option("--out", outp)->required();
  synth->add_flag("--iterative", iterative, "conjugate gradients on the frame operator");
  synth->add_option("--verify", verify, "reference signal for the round-trip error");
  synth->add_option("--atom-cache", atom_cache);

  std::string m1s = "one", m2s = "one", v1s = "one", v2s = "one";
  std::uint64_t probe_seed = 1;
  auto* diag = app.add_subcommand("diagnose", "frame, Moyal and cover diagnostics");
  diag->add_option("--system", system)->required();
  diag->add_option("--cover-window", window, "f_lo f_hi t_lo t_hi")->expected(4);
  diag->add_option("--m1", m1s);
  diag->add_option("--m2", m2s);
  diag->add_option("--v1", v1s);
  diag->add_option("--v2", v2s);
  diag->add_option("--probe-seed", probe_seed);
  diag->add_option("--atom-cache", atom_cache);

  std::string op;
  std::vector<double> deltas, etas;
  std::vector<std::string> probes;
  double kx = 0.0, kxi = 0.0, ky = 0.0, komega = 0.0, ku = 0.0, kz = 0.3, kxi0 = 0.0;
  int kn = 0, kq = 3;
  std::string gamma = "on";
  KernelEvalSpec spec;
  auto* kern = app.add_subcommand("kernel", "kernel evaluations and sweeps");
  kern->add_option("--system", system)->required();
  kern->add_option("--op", op)->required()->check(CLI::IsMember({"gramian", "amnorm", "osc", "oscnorm", "statphase"}));
  kern->add_option("--delta", deltas, "sweep values (default: the system delta)");
  kern->add_option("--x", kx, "Hz");
  kern->add_option("--xi", kxi, "s");
  kern->add_option("--y", ky, "Hz");
  kern->add_option("--omega", komega, "s");
  kern->add_option("--u", ku, "warped position");
  kern->add_option("--z", kz, "warped offset");
  kern->add_option("--probe-xi", kxi0, "s");
  kern->add_option("--probe", probes, "u,xi pairs for oscnorm");
  kern->add_option("--n", kn);
  kern->add_option("--eta", etas);
  kern->add_option("--q", kq)->check(CLI::PositiveNumber);
  kern->add_option("--gamma", gamma)->check(CLI::IsMember({"on", "off"}));
  kern->add_option("--z-half", spec.z_half);
  kern->add_option("--eta-half", spec.eta_half);
  kern->add_option("--z-panels", spec.z_panels);
  kern->add_option("--eta-panels", spec.eta_panels);
  kern->add_option("--nodes", spec.nodes);
  kern->add_option("--oversample", spec.inner_oversample);
  kern->add_option("--m1", m1s);
  kern->add_option("--m2", m2s);
  kern->add_option("--out", outp);

  auto* cdump = app.add_subcommand("cover-dump", "induced cover as CSV");
  cdump->add_option("--system", system)->required();
  cdump->add_option("--window", window, "f_lo f_hi t_lo t_hi")->expected(4);
  cdump->add_option("--out", outp);

  auto* spect = app.add_subcommand("spectrogram", "coefficient magnitudes as CSV");
  spect->add_option("--system", system)->required();
  spect->add_option("--signal", signal)->required();
  spect->add_option("--out", outp)->required();
  spect->add_option("--atom-cache", atom_cache);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  const unsigned saved_threads = thread_count();
  if (threads > 0) {
    set_thread_count(static_cast<unsigned>(threads));
  } else if (const char* env = std::getenv("WARPFT_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end && *end == '\0' && v > 0) set_thread_count(static_cast<unsigned>(v));
  }

  int code = 0;
  try {
    if (*design) {
      const WarpedSystem sys = build_system(load_config(config));
      write_descriptor(sys, outp);
      out << "channels = " << sys.size() << "\n";
      out << "delta = " << fmt(sys.delta()) << "\n";
      out << "painless = " << jbool(sys.painless.painless) << "\n";
      if (!sys.painless.painless) out << "# " << sys.painless.summary() << "\n";
    } else if (*analyze_cmd) {
      const WarpedSystem sys = load_system(system, atom_cache);
      write_coefficients(analyze(read_signal(signal), sys), outp);
    } else if (*synth) {
      const WarpedSystem sys = load_system(system, atom_cache);
      const Coefficients c = read_coefficients(coeffs);
      Signal f;
      if (iterative) {
        const IterativeResult r = synthesize_iterative(c, sys);
        out << "iterations = " << r.iterations << "\n";
        out << "relative_residual = " << fmt(r.relative_residual) << "\n";
        out << "converged = " << jbool(r.converged) << "\n";
        f = r.signal;
      } else {
        f = synthesize(c, sys);
      }
      write_signal(f, outp);
      if (!verify.empty()) {
        const Signal ref = project_active(read_signal(verify), sys.grid(), sys.warp().domain());
        require(ref.size() == f.size(), ErrorKind::Shape, "verify: reference length mismatch");
        out << "round_trip_relative_error = " << fmt(relative_l2_error(f, ref)) << "\n";
      }
    } else if (*diag) {
      const WarpedSystem sys = load_system(system, atom_cache);
      std::ostringstream os;
      Report r(os);
      r.str("warp", sys.warp().name());
      r.str("prototype", sys.theta.name());
      r.num("delta", sys.delta());
      r.integer("length", sys.grid().N);
      r.num("sample_rate", sys.grid().fs);
      r.integer("channels", sys.size());
      r.integer("dropped_channels", sys.dropped_channels);
      r.boolean("painless", sys.painless.painless);
      r.integer("painless_violations", sys.painless.violating.size());
      if (sys.painless.painless) {
        const FrameBounds d = frame_bounds_painless(sys);
        r.num("frame_bounds.diagonal.A", d.A);
        r.num("frame_bounds.diagonal.B", d.B);
        r.num("frame_bounds.diagonal.B/A", d.ratio());
      } else {
        r.str("frame_bounds.diagonal", "skipped: not painless");
      }
      const FrameBounds lz = frame_bounds_power_iteration(sys);
      r.num("frame_bounds.lanczos.A", lz.A);
      r.num("frame_bounds.lanczos.B", lz.B);
      r.num("frame_bounds.lanczos.B/A", lz.ratio());
      r.integer("frame_bounds.lanczos.iterations", static_cast<std::size_t>(lz.iterations));
      r.boolean("frame_bounds.lanczos.converged", lz.converged);
      r.boolean("A>0", lz.A > 1e-12 * lz.B);

      const auto [blo, bhi] = interior_band(sys);
      if (bhi > blo) {
        const Signal f = random_bandlimited(sys.grid(), blo, bhi, probe_seed);
        const MoyalTerms mt = moyal_terms(f, f, sys, sys);
        r.num("moyal.band_lo_hz", blo);
        r.num("moyal.band_hi_hz", bhi);
        r.num("moyal.pairing", mt.pairing.real());
        r.num("moyal.reference", mt.reference.real());
        r.num("moyal.relative_residual", mt.residual / std::abs(mt.reference));
      } else {
        r.str("moyal", "skipped: empty interior band");
      }

      const Cover cov = cover_for(sys, window);
      const bool brute = cov.elements.size() <= 20000;
      const CoverReport cr = check_cover_admissible(cov, brute);
      r.integer("cover.elements", cr.elements);
      r.integer("cover.max_neighbors", cr.max_neighbors);
      if (brute)
        r.integer("cover.brute_force_max_neighbors", cr.brute_force_max_neighbors);
      else
        r.str("cover.brute_force_max_neighbors", "skipped: more than 20000 elements");
      r.num("cover.moderateness", cr.moderateness);
      r.num("cover.max_measure_deviation", cr.max_measure_deviation);
      r.boolean("cover.covers_window", cr.covers_window);
      r.boolean("cover.nonvoid_interiors", cr.nonvoid_interiors);
      const WeightBound wb = weight_bound_C(cov, parse_weight(m1s), parse_weight(m2s), parse_weight(v1s),
                                            parse_weight(v2s));
      r.num("C_{m,U}", wb.sampled);
      r.num("C_{m,U}.analytic", wb.analytic);

      const Signal probe = random_bandlimited(sys.grid(), -sys.grid().fs, sys.grid().fs, probe_seed);
      const StftCheck sc = stft_equivalence(sys, probe);
      if (sc.applicable) {
        r.num("stft_equivalence.max_dev", sc.max_dev);
        r.integer("stft_equivalence.channels_compared", sc.compared);
        r.str("stft_equivalence", std::string("max_dev ≤ 1e-10: ") + (sc.max_dev <= 1e-10 ? "PASS" : "FAIL"));
      } else {
        r.str("stft_equivalence", "skipped: " + sc.reason);
      }
      r.finish();
      out << os.str();
    } else if (*kern) {
      const WarpedSystem sys = read_descriptor(system);
      const WarpingFunction& F = sys.warp();
      const Prototype& th = sys.theta;
      spec.m1 = parse_weight(m1s);
      spec.m2 = parse_weight(m2s);
      if (deltas.empty()) deltas.push_back(sys.delta());
      std::ofstream file;
      if (!outp.empty()) open_out(outp, file);
      std::ostream& os = outp.empty() ? out : file;
      const bool gamma_on = gamma == "on";
      if (op == "gramian") {
        const std::complex<double> K = gramian(F, th, kx, kxi, ky, komega);
        os << "x,xi,y,omega,re,im\n"
           << fmt(kx) << ',' << fmt(kxi) << ',' << fmt(ky) << ',' << fmt(komega) << ',' << fmt(K.real()) << ','
           << fmt(K.imag()) << '\n';
      } else if (op == "amnorm") {
        const KernelNormResult kr = kernel_norm_I(F, th, spec, ku, kxi0);
        os << "u,xi,value,tail_estimate,inconclusive\n"
           << fmt(ku) << ',' << fmt(kxi0) << ',' << fmt(kr.value) << ',' << fmt(kr.tail_estimate) << ','
           << jbool(kr.inconclusive) << '\n';
        if (kr.inconclusive) err << "warning: " << kr.note << "\n";
      } else if (op == "osc") {
        os << "delta,value\n";
        for (double d : deltas)
          os << fmt(d) << ',' << fmt(oscillation(F, th, d, gamma_on, kx, kxi, ky, komega, kq, sys.params.time_scale))
             << '\n';
      } else if (op == "oscnorm") {
        std::vector<std::pair<double, double>> pr;
        for (const std::string& p : probes) {
          const auto comma = p.find(',');
          require(comma != std::string::npos, ErrorKind::Config, "--probe expects u,xi");
          pr.emplace_back(std::stod(p.substr(0, comma)), std::stod(p.substr(comma + 1)));
        }
        if (pr.empty()) pr.emplace_back(ku, kxi0);
        os << "delta,value\n";
        for (double d : deltas) {
          const OscNormResult o = osc_norm_estimate(F, th, d, spec, gamma_on, pr, kq, sys.params.time_scale);
          os << fmt(d) << ',' << fmt(o.value) << '\n';
          if (o.inconclusive)
            err << "warning: delta " << fmt(d) << ": tail estimate " << fmt(o.tail_estimate)
                << " exceeds 10% of the value\n";
        }
      } else {
        const StatPhaseReport sp = stationary_phase_check(F, th, kn, ku, kz, etas.empty() ? default_eta_grid() : etas);
        require(sp.eligible, ErrorKind::Capability, "statphase: " + sp.reason);
        os << "eta,lhs,rhs,status\n";
        for (const auto& p : sp.points)
          os << fmt(p.eta) << ',' << fmt(p.lhs) << ',' << fmt(p.rhs) << ','
             << (p.pass && p.l1_pass ? "PASS" : "FAIL") << '\n';
        err << "slope = " << fmt(sp.slope) << (sp.slope_pass ? " PASS" : " FAIL") << "\n";
      }
      require(static_cast<bool>(os), ErrorKind::Internal, "write failed");
    } else if (*cdump) {
      const WarpedSystem sys = read_descriptor(system);
      const Cover cov = cover_for(sys, window);
      if (outp.empty()) {
        dump_cover(cov, out);
      } else {
        std::ofstream file;
        open_out(outp, file);
        dump_cover(cov, file);
      }
    } else if (*spect) {
      const WarpedSystem sys = load_system(system, atom_cache);
      export_spectrogram(analyze(read_signal(signal), sys), outp);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    code = exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    code = 1;
  }
  set_thread_count(saved_threads);
  return code;
}

}  // namespace warpft
