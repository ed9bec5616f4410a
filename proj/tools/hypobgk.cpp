// Command-line front end: certification of decay rates, spectrum studies,
// kinetic simulations, entropy traces, and parameter sweeps. Emits a JSON
// report per run plus CSV traces; identical configs produce identical bytes.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hypobgk/basis.hpp"
#include "hypobgk/config.hpp"
#include "hypobgk/discrete_models.hpp"
#include "hypobgk/entropy.hpp"
#include "hypobgk/lyapunov.hpp"
#include "hypobgk/mode_operators.hpp"
#include "hypobgk/simulator.hpp"
#include "hypobgk/trace.hpp"

namespace {

using namespace hypobgk;
using nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitCertification = 2;
constexpr int kExitBlowup = 3;
constexpr int kExitUsage = 64;

Vec parse_density(const std::string& spec) {
  const auto values = parse_number_list(spec);
  Vec rho(static_cast<int>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) rho[static_cast<int>(i)] = values[i];
  return rho;
}

EntropyGenerator make_generator(const RunConfig& config) {
  if (config.generator == "log") return EntropyGenerator::log_entropy();
  if (config.generator == "quadratic") return EntropyGenerator::quadratic();
  if (config.generator == "power") return EntropyGenerator::power(config.p);
  if (config.generator == "abs-power") return EntropyGenerator::abs_power(config.p);
  throw std::invalid_argument("unknown generator '" + config.generator + "'");
}

void write_json(const std::string& path, const ordered_json& doc) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << doc.dump(2) << '\n';
}

ordered_json base_report(const RunConfig& config) {
  ordered_json report;
  report["config"] = config_to_json(config);
  report["config_hash"] = config_hash(config);
  report["rng"] = Rng::algorithm();
  return report;
}

std::string out_prefix(const RunConfig& config) {
  return config.out.empty() ? "hypobgk_" + config.command : config.out;
}

// --- certify ---------------------------------------------------------------

int cmd_certify(const RunConfig& config) {
  ordered_json report = base_report(config);
  Real margin = 0.0;
  bool valid = false;

  if (config.model == "discrete") {
    // per-mode eigenvector construction for the lattice model
    const Real mu =
        spectral_gap(build_mode_operator(ModeModel::DiscreteVelocity, 1, config.nvelocity).matrix)
            .gap;
    Real worst_margin = std::numeric_limits<Real>::infinity();
    int worst_k = 1;
    Real p_min = std::numeric_limits<Real>::infinity(), p_max = 0.0;
    for (int k = 1; k <= config.kmax; ++k) {
      const auto op = build_mode_operator(ModeModel::DiscreteVelocity, k, config.nvelocity);
      const auto cert = construct_P(op.matrix);
      const Real m = verify_inequality(op.matrix, cert.P, mu);
      if (m < worst_margin) {
        worst_margin = m;
        worst_k = k;
      }
      p_min = std::min(p_min, cert.p_min);
      p_max = std::max(p_max, cert.p_max);
    }
    margin = worst_margin;
    valid = margin >= -1e-10;
    report["mu"] = mu;
    report["two_mu"] = 2.0 * mu;
    report["worst_k"] = worst_k;
    report["margin"] = margin;
    report["p_min"] = p_min;
    report["p_max"] = p_max;
    report["envelope_c"] = std::sqrt(p_max / p_min);
  } else {
    ModeModel model;
    PkAnsatz family = PkAnsatz::two_block(config.alpha);
    std::string natural_ansatz;
    if (config.model == "two-velocity") {
      model = ModeModel::TwoVelocity;
      family = PkAnsatz::exact_two_by_two();
      natural_ansatz = "exact";
    } else if (config.model == "continuous-linear") {
      model = ModeModel::ContinuousLinear;
      family = PkAnsatz::two_block(config.alpha);
      natural_ansatz = "two-block";
    } else if (config.model == "continuous-linearized") {
      model = ModeModel::ContinuousLinearized;
      const Real a = config.alpha > 0.0 ? config.alpha : 1.0 / 3.0;
      const Real b = config.beta > 0.0 ? config.beta : 1.0 / 3.0;
      family = PkAnsatz::four_block(a, b);
      natural_ansatz = "four-block";
    } else {
      throw std::invalid_argument("unknown certification model '" + config.model + "'");
    }
    if (!config.ansatz.empty() && config.ansatz != natural_ansatz) {
      throw std::invalid_argument("model '" + config.model + "' pairs with the '" +
                                  natural_ansatz + "' ansatz");
    }
    const auto cert = certify_uniform_rate(model, family, config.kmax, config.nhermite,
                                           config.optimize, config.sigma, config.temperature);
    margin = cert.margin;
    valid = cert.margin >= -1e-10 && cert.tail_certified;
    report["mu"] = cert.mu;
    report["two_mu"] = cert.two_mu();
    report["alpha"] = cert.alpha;
    report["beta"] = cert.beta;
    report["per_mode_alpha"] = cert.per_mode_alpha;
    report["worst_k"] = cert.worst_k;
    report["margin"] = cert.margin;
    report["minors_at_worst"] = cert.minors_at_worst;
    report["p_min"] = cert.p_min;
    report["p_max"] = cert.p_max;
    report["envelope_c"] = cert.envelope;
    report["tail_certified"] = cert.tail_certified;
  }

  report["valid"] = valid;
  write_json(out_prefix(config) + ".json", report);
  std::printf("certify %s: mu = %s margin = %s %s\n", config.model.c_str(),
              format_double(report["mu"].get<Real>()).c_str(), format_double(margin).c_str(),
              valid ? "OK" : "FAILED");
  return valid ? kExitOk : kExitCertification;
}

// --- spectrum ---------------------------------------------------------------

int cmd_spectrum(const RunConfig& config) {
  std::vector<int> orders;
  if (!config.nlist.empty()) {
    for (Real v : parse_number_list(config.nlist)) orders.push_back(static_cast<int>(v));
  } else {
    orders.push_back(config.nhermite);
  }

  std::ofstream csv(out_prefix(config) + ".csv");
  if (!csv) throw std::runtime_error("cannot open output CSV");
  csv << "k,n,gap,real_eigenvalue\n";

  Real inf_gap = std::numeric_limits<Real>::infinity();
  if (config.model == "four-state") {
    const auto sys = build_four_state();
    const Real gap = spectral_gap(sys.generator.cast<Complex>()).gap;
    inf_gap = gap;
    csv << "0,4," << format_double(gap) << ",\n";
  } else {
    for (int order : orders) {
      std::vector<std::string> rows(config.kmax);
      std::vector<Real> gaps(config.kmax);
      parallel_for(config.kmax, [&](int i) {
        const int k = i + 1;
        Real gap = 0.0;
        std::string real_part;
        if (config.model == "two-velocity") {
          gap = spectral_gap(two_velocity_mode_matrix(config.sigma, k)).gap;
          const auto ev = two_velocity_eigenvalues(config.sigma, k);
          if (std::abs(ev.slow.imag()) < 1e-12) real_part = format_double(ev.slow.real());
        } else if (config.model == "discrete") {
          const auto op = build_mode_operator(ModeModel::DiscreteVelocity, k, config.nvelocity);
          gap = spectral_gap(op.matrix).gap;
          if (config.nvelocity == 4) real_part = format_double(discrete_real_eigenvalue(k));
        } else {
          const ModeModel model = config.model == "continuous-linearized"
                                      ? ModeModel::ContinuousLinearized
                                      : ModeModel::ContinuousLinear;
          const auto op = build_mode_operator(model, k, order, config.temperature);
          gap = spectral_gap(op.matrix).gap;
        }
        gaps[i] = gap;
        rows[i] = std::to_string(k) + "," + std::to_string(order) + "," + format_double(gap) +
                  "," + real_part + "\n";
      });
      for (int i = 0; i < config.kmax; ++i) {
        csv << rows[i];
        inf_gap = std::min(inf_gap, gaps[i]);
      }
    }
  }

  ordered_json report = base_report(config);
  report["inf_gap"] = inf_gap;
  write_json(out_prefix(config) + ".json", report);
  std::printf("spectrum %s: inf gap over swept modes = %s\n", config.model.c_str(),
              format_double(inf_gap).c_str());
  return kExitOk;
}

// --- simulate ---------------------------------------------------------------

int cmd_simulate(const RunConfig& config) {
  ordered_json report = base_report(config);
  Real fitted = 0.0;
  Real certified = 0.0;

  if (config.model == "two-velocity") {
    const auto run = simulate_two_velocity(config.sigma, config.kmax, config.dt, config.tmax,
                                           config.stride, config.seed);
    write_trace_csv(out_prefix(config) + ".csv", run.rows);
    fitted = run.fitted_norm_rate;
    certified = run.certified_rate;
    report["fitted_norm_rate"] = fitted;
  } else {
    FlowModel model;
    EntropyFunctional functional = EntropyFunctional::mass_only(config.gamma);
    if (config.model == "linear") {
      model = FlowModel::Linear;
    } else if (config.model == "linearized") {
      model = FlowModel::Linearized;
      functional = EntropyFunctional::energy_conserving(config.gamma);
    } else if (config.model == "nonlinear") {
      model = FlowModel::Nonlinear;
      functional = EntropyFunctional::energy_conserving(config.gamma);
      functional.certified_rate = 1.0 / 25.0;
    } else {
      throw std::invalid_argument("unknown simulation model '" + config.model + "'");
    }

    SpectralState state =
        random_state(config.kmax, config.nhermite, config.temperature, config.seed);
    if (model == FlowModel::Nonlinear) {
      state.scale(config.eps / std::sqrt(state.sobolev_norm_squared(config.gamma)));
    }
    const auto result = simulate(model, state, config.dt, config.tmax, config.stride, functional);
    write_trace_csv(out_prefix(config) + ".csv", result.rows);
    fitted = result.fitted_rate_e_gamma;
    certified = functional.certified_rate;
    report["fitted_rate_e"] = result.fitted_rate_e;
    report["fitted_rate_e_gamma"] = result.fitted_rate_e_gamma;
    report["fitted_norm_rate"] = result.fitted_norm_rate;
    report["max_tail_fraction"] = result.max_tail_fraction;
    if (model == FlowModel::Nonlinear) {
      report["remainder_ratio"] = result.initial_remainder_ratio;
    }
  }

  report["certified_rate"] = certified;
  report["fitted_rate"] = fitted;
  const bool ok = fitted >= certified - 1e-3;
  report["rate_confirmed"] = ok;
  write_json(out_prefix(config) + ".json", report);
  std::printf("simulate %s: fitted rate %s vs certified %s %s\n", config.model.c_str(),
              format_double(fitted).c_str(), format_double(certified).c_str(),
              ok ? "OK" : "FAILED");
  return ok ? kExitOk : kExitCertification;
}

// --- entropy-trace ------------------------------------------------------------

int cmd_entropy_trace(const RunConfig& config) {
  const Vec rho = parse_density(config.rho);
  const auto sys = build_homogeneous(rho, config.lambda);
  const auto gen = make_generator(config);

  Rng rng(config.seed);
  Vec f0(rho.size());
  for (int j = 0; j < f0.size(); ++j) f0[j] = rng.uniform(0.05, 1.0);
  f0 /= f0.sum();

  const int samples = std::max(2, static_cast<int>(config.tmax / config.dt) + 1);
  Vec t_grid(samples);
  for (int i = 0; i < samples; ++i) t_grid[i] = config.dt * i;
  const auto trace = entropy_decay_trace(sys, f0, gen, t_grid);
  write_entropy_trace_csv(out_prefix(config) + ".csv", trace);

  ordered_json report = base_report(config);
  report["fitted_rate"] = trace.fitted_rate;
  report["optimal_rate"] = 4.0 * config.lambda;
  report["admissibility_mu_ratio"] = admissibility_mu(rho, gen);
  std::vector<Real> f0_list(f0.data(), f0.data() + f0.size());
  report["f0"] = f0_list;
  write_json(out_prefix(config) + ".json", report);
  std::printf("entropy-trace %s: fitted rate %s (4 lambda = %s)\n", gen.name().c_str(),
              format_double(trace.fitted_rate).c_str(),
              format_double(4.0 * config.lambda).c_str());
  return kExitOk;
}

// --- sweep --------------------------------------------------------------------

int cmd_sweep(const RunConfig& config) {
  const auto values = parse_number_list(config.values);
  if (values.empty()) throw std::invalid_argument("sweep needs --values");
  std::ofstream csv(out_prefix(config) + ".csv");
  if (!csv) throw std::runtime_error("cannot open output CSV");

  if (config.param == "alpha") {
    csv << "alpha,mu,two_mu,margin\n";
    for (Real alpha : values) {
      const auto cert = certify_uniform_rate(ModeModel::ContinuousLinear,
                                             PkAnsatz::two_block(alpha), config.kmax,
                                             config.nhermite, false);
      csv << format_double(alpha) << ',' << format_double(cert.mu) << ','
          << format_double(cert.two_mu()) << ',' << format_double(cert.margin) << '\n';
    }
  } else if (config.param == "rho2") {
    const auto gen = make_generator(config);
    csv << "rho2,mu_ratio\n";
    for (Real rho2 : values) {
      Vec rho(2);
      rho << 1.0 - rho2, rho2;
      csv << format_double(rho2) << ',' << format_double(admissibility_mu(rho, gen)) << '\n';
    }
  } else {
    throw std::invalid_argument("sweep supports --param alpha or rho2");
  }

  ordered_json report = base_report(config);
  report["points"] = values.size();
  write_json(out_prefix(config) + ".json", report);
  std::printf("sweep over %s: %zu points\n", config.param.c_str(), values.size());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"BGK relaxation models: decay certificates and simulations"};
  app.require_subcommand(1);

  RunConfig config;
  std::string config_path;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "key = value file or JSON mirror");
    cmd->add_option("--model", config.model);
    cmd->add_option("--ansatz", config.ansatz);
    cmd->add_option("--alpha", config.alpha);
    cmd->add_option("--beta", config.beta);
    cmd->add_option("--gamma", config.gamma);
    cmd->add_option("--sigma", config.sigma);
    cmd->add_option("--temperature", config.temperature);
    cmd->add_option("--lambda", config.lambda);
    cmd->add_option("--rho", config.rho);
    cmd->add_option("--generator", config.generator);
    cmd->add_option("--p", config.p);
    cmd->add_option("--kmax", config.kmax);
    cmd->add_option("--nhermite", config.nhermite);
    cmd->add_option("--nvelocity", config.nvelocity);
    cmd->add_option("--dt", config.dt);
    cmd->add_option("--tmax", config.tmax);
    cmd->add_option("--eps", config.eps);
    cmd->add_option("--seed", config.seed);
    cmd->add_option("--stride", config.stride);
    cmd->add_flag("--optimize", config.optimize);
    cmd->add_option("--param", config.param);
    cmd->add_option("--values", config.values);
    cmd->add_option("--nlist", config.nlist);
    cmd->add_option("--out", config.out);
  };

  CLI::App* certify = app.add_subcommand("certify", "build and verify a decay certificate");
  CLI::App* spectrum = app.add_subcommand("spectrum", "spectral gaps of the mode operators");
  CLI::App* simulate_cmd = app.add_subcommand("simulate", "run a model and fit its decay rate");
  CLI::App* entropy_trace =
      app.add_subcommand("entropy-trace", "relative entropy along a relaxation flow");
  CLI::App* sweep = app.add_subcommand("sweep", "parameter grids for certificates");
  for (CLI::App* cmd : {certify, spectrum, simulate_cmd, entropy_trace, sweep}) add_common(cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (!config_path.empty()) {
      config = load_config_file(config_path);
      app.clear();
      app.parse(argc, argv);  // flags win over file values
    }
    CLI::App* active = app.get_subcommands().front();
    config.command = active->get_name();

    if (config.command == "certify") return cmd_certify(config);
    if (config.command == "spectrum") return cmd_spectrum(config);
    if (config.command == "simulate") return cmd_simulate(config);
    if (config.command == "entropy-trace") return cmd_entropy_trace(config);
    if (config.command == "sweep") return cmd_sweep(config);
    return kExitUsage;
  } catch (const CLI::ParseError&) {
    return kExitUsage;
  } catch (const BlowupError& e) {
    std::fprintf(stderr, "blowup: %s (last valid time %s)\n", e.what(),
                 format_double(e.last_valid_time()).c_str());
    return kExitBlowup;
  } catch (const CertificationError& e) {
    std::fprintf(stderr, "certification failure: %s\n", e.what());
    return kExitCertification;
  } catch (const ResolutionError& e) {
    std::fprintf(stderr, "resolution failure: %s\n", e.what());
    return kExitCertification;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitCertification;
  }
}
