// hbound: tight lower bounds for the squared Hellinger distance between
// probability laws with prescribed means and variances, plus the numerical
// verification commands (bound, compare, verify, sequence).

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hbound/hbound.hpp"
#include "hbound/json_io.hpp"

namespace {

using hbound::json;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitConvergence = 3;
constexpr int kExitViolation = 4;

enum class Format { table, json_fmt, csv };

struct OutputOptions {
  Format format = Format::table;
  std::string out_path;
};

struct SpecOptions {
  double mean_p = 0.0, mean_q = 0.0;
  std::optional<double> sd_p, var_p, sd_q, var_q;
};

struct ConfigOptions {
  hbound::VerificationConfig config;
  bool radius_set = false;
};

std::string format_full(double x) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", x);
  return buffer;
}

std::string format3(double x) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.3f", x);
  return buffer;
}

void add_format_options(CLI::App* cmd, OutputOptions& out) {
  std::map<std::string, Format> formats{
      {"table", Format::table}, {"json", Format::json_fmt}, {"csv", Format::csv}};
  cmd->add_option("--format", out.format, "Output format")
      ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
  cmd->add_option("--out", out.out_path, "Write output to this path instead of stdout");
}

void add_spec_options(CLI::App* cmd, SpecOptions& spec, bool need_means) {
  auto* mp = cmd->add_option("--mean-p", spec.mean_p, "Mean of the first law");
  auto* mq = cmd->add_option("--mean-q", spec.mean_q, "Mean of the second law");
  if (need_means) {
    mp->required();
    mq->required();
  }
  auto* sdp = cmd->add_option("--sd-p", spec.sd_p, "Standard deviation of the first law");
  auto* varp = cmd->add_option("--var-p", spec.var_p, "Variance of the first law");
  auto* sdq = cmd->add_option("--sd-q", spec.sd_q, "Standard deviation of the second law");
  auto* varq = cmd->add_option("--var-q", spec.var_q, "Variance of the second law");
  sdp->excludes(varp);
  varp->excludes(sdp);
  sdq->excludes(varq);
  varq->excludes(sdq);
}

void add_config_options(CLI::App* cmd, ConfigOptions& options) {
  cmd->add_option("--points", options.config.n_points, "Support size n");
  cmd->add_option("--trials", options.config.n_trials, "Number of sampled pairs");
  cmd->add_option("--restarts", options.config.n_restarts, "Optimizer restarts");
  cmd->add_option("--radius", options.config.radius, "Support box half-width")
      ->each([&options](const std::string&) { options.radius_set = true; });
}

hbound::MomentSpec resolve_spec(const SpecOptions& options) {
  const auto sigma = [](const std::optional<double>& sd, const std::optional<double>& var,
                        const char* which) {
    if (sd) {
      if (*sd < 0.0) throw hbound::InvalidSpec("negative sd");
      return *sd;
    }
    if (var) {
      if (*var < 0.0) throw hbound::InvalidSpec("negative variance");
      return std::sqrt(*var);
    }
    throw hbound::InvalidSpec(std::string("missing --sd-") + which + " or --var-" + which);
  };
  return hbound::MomentSpec{options.mean_p, sigma(options.sd_p, options.var_p, "p"),
                            options.mean_q, sigma(options.sd_q, options.var_q, "q")};
}

/// Half-width that satisfies the sampler's |m| + 10 sigma requirement and
/// leaves the attainer support strictly inside the box.
double auto_radius(const hbound::MomentSpec& spec) {
  double radius = std::max({1.0, std::abs(spec.mean_p) + 10.0 * spec.sigma_p,
                            std::abs(spec.mean_q) + 10.0 * spec.sigma_q});
  if (hbound::mean_gap(spec) != 0.0) {
    const hbound::BinaryAttainer att = hbound::binary_attainer(spec);
    radius = std::max(radius, 2.0 * std::max(std::abs(att.u1), std::abs(att.u2)));
  }
  return radius;
}

void emit(const OutputOptions& options, const std::string& text) {
  if (options.out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream file(options.out_path);
  if (!file) throw hbound::Error("cannot open output path " + options.out_path);
  file << text;
}

std::string csv_join(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += cells[i];
  }
  line += '\n';
  return line;
}

// --- bound -----------------------------------------------------------------

int run_bound(const SpecOptions& spec_options, const OutputOptions& out) {
  const hbound::MomentSpec spec = resolve_spec(spec_options);
  hbound::validate(spec);
  const hbound::BoundReport report = hbound::bound_report(spec);
  const bool equal_means = hbound::mean_gap(spec) == 0.0;

  std::ostringstream text;
  switch (out.format) {
    case Format::json_fmt: {
      json j{{"command", "bound"}, {"spec", spec}, {"results", json::array({report})}};
      j["summary"] = json{{"equal_means", equal_means},
                          {"note", equal_means ? "infimum, not attained" : ""}};
      text << j.dump(2) << '\n';
      break;
    }
    case Format::csv: {
      text << csv_join({"hellinger_lb", "bhattacharyya_ub", "comparison_lb", "beta_min",
                        "beta_max", "r", "s", "u1", "u2"});
      std::vector<std::string> row{format_full(report.hellinger_lb),
                                   format_full(report.bhattacharyya_ub),
                                   format_full(report.comparison_lb)};
      if (report.betas) {
        row.push_back(format_full(report.betas->beta_min));
        row.push_back(format_full(report.betas->beta_max));
      } else {
        row.insert(row.end(), {"", ""});
      }
      if (report.attainer) {
        row.push_back(format_full(report.attainer->r));
        row.push_back(format_full(report.attainer->s));
        row.push_back(format_full(report.attainer->u1));
        row.push_back(format_full(report.attainer->u2));
      } else {
        row.insert(row.end(), {"", "", "", ""});
      }
      text << csv_join(row);
      break;
    }
    case Format::table: {
      text << "hellinger_lb      " << format3(report.hellinger_lb) << '\n';
      text << "bhattacharyya_ub  " << format3(report.bhattacharyya_ub) << '\n';
      text << "comparison_lb     " << format3(report.comparison_lb) << '\n';
      if (report.betas) {
        text << "beta_min          " << format3(report.betas->beta_min) << '\n';
        text << "beta_max          " << format3(report.betas->beta_max) << '\n';
      } else {
        text << "beta_min          n/a\nbeta_max          n/a\n";
      }
      if (report.attainer) {
        text << "attainer r        " << format_full(report.attainer->r) << '\n';
        text << "attainer s        " << format_full(report.attainer->s) << '\n';
        text << "attainer u1       " << format_full(report.attainer->u1) << '\n';
        text << "attainer u2       " << format_full(report.attainer->u2) << '\n';
      } else {
        text << "attainer          none (infimum, not attained)\n";
      }
      break;
    }
  }
  emit(out, text.str());
  return kExitOk;
}

// --- compare ---------------------------------------------------------------

int run_compare(const SpecOptions& spec_options, const OutputOptions& out) {
  const hbound::MomentSpec spec = resolve_spec(spec_options);
  hbound::validate(spec);

  const double tight = hbound::hellinger_lower_bound(spec);
  const double weak = hbound::comparison_bound(spec);
  const bool degenerate = (spec.sigma_p == 0.0 || spec.sigma_q == 0.0);

  std::optional<double> gaussian, exponential;
  std::optional<hbound::BetaFactors> betas;
  if (!degenerate) {
    gaussian = hbound::gaussian_h2(hbound::GaussianLaw{spec.mean_p, spec.sigma_p},
                                   hbound::GaussianLaw{spec.mean_q, spec.sigma_q});
    const auto [ep, eq] = hbound::match_moments_exponential(spec);
    exponential = hbound::shifted_exponential_h2(ep, eq);
    if (hbound::mean_gap(spec) != 0.0) betas = hbound::beta_factors(spec);
  }

  const auto dominates = [&](std::optional<double> value) {
    return value && *value >= tight - 1e-9 && *value >= weak - 1e-9;
  };
  const bool sandwich_ok = !betas || (betas->beta_min * weak <= tight * (1.0 + 1e-9) &&
                                      tight <= betas->beta_max * weak * (1.0 + 1e-9));

  std::ostringstream text;
  switch (out.format) {
    case Format::json_fmt: {
      json row{{"hellinger_lb", tight}, {"comparison_lb", weak}};
      row["gaussian_h2"] = gaussian ? json(*gaussian) : json(nullptr);
      row["exponential_h2"] = exponential ? json(*exponential) : json(nullptr);
      row["gaussian_above_bounds"] = gaussian ? json(dominates(gaussian)) : json(nullptr);
      row["exponential_above_bounds"] =
          exponential ? json(dominates(exponential)) : json(nullptr);
      row["sandwich_ok"] = sandwich_ok;
      json j{{"command", "compare"}, {"spec", spec}, {"results", json::array({row})}};
      j["summary"] = json{{"degenerate_sigma", degenerate}};
      text << j.dump(2) << '\n';
      break;
    }
    case Format::csv: {
      text << csv_join({"hellinger_lb", "comparison_lb", "gaussian_h2", "exponential_h2",
                        "gaussian_above_bounds", "exponential_above_bounds", "sandwich_ok"});
      text << csv_join({format_full(tight), format_full(weak),
                        gaussian ? format_full(*gaussian) : "",
                        exponential ? format_full(*exponential) : "",
                        gaussian ? (dominates(gaussian) ? "true" : "false") : "",
                        exponential ? (dominates(exponential) ? "true" : "false") : "",
                        sandwich_ok ? "true" : "false"});
      break;
    }
    case Format::table: {
      text << "tight_bound  comparison_bound  gaussian_h2  exponential_h2\n";
      text << format3(tight) << "        " << format3(weak) << "             "
           << (gaussian ? format3(*gaussian) : std::string("n/a")) << "        "
           << (exponential ? format3(*exponential) : std::string("n/a")) << '\n';
      text << "gaussian >= both bounds:    "
           << (gaussian ? (dominates(gaussian) ? "yes" : "NO") : "n/a") << '\n';
      text << "exponential >= both bounds: "
           << (exponential ? (dominates(exponential) ? "yes" : "NO") : "n/a") << '\n';
      text << "beta sandwich consistent:   " << (sandwich_ok ? "yes" : "NO") << '\n';
      break;
    }
  }
  emit(out, text.str());
  return degenerate ? kExitInput : kExitOk;
}

// --- verify ----------------------------------------------------------------

int run_verify(const SpecOptions& spec_options, ConfigOptions& config_options,
               const OutputOptions& out) {
  const hbound::MomentSpec spec = resolve_spec(spec_options);
  hbound::validate(spec);
  if (!config_options.radius_set) {
    config_options.config.radius = auto_radius(spec);
  }
  const hbound::VerificationConfig& config = config_options.config;
  hbound::validate(config);

  const hbound::VerificationRun run = hbound::run_verification(spec, config);
  const bool violation = run.summary.violation_count > 0;

  std::ostringstream text;
  switch (out.format) {
    case Format::json_fmt: {
      json j{{"command", "verify"},
             {"spec", spec},
             {"config", config},
             {"results", run.records},
             {"summary", run.summary}};
      text << j.dump(2) << '\n';
      break;
    }
    case Format::csv: {
      text << csv_join({"index", "kind", "achieved_h2", "bound", "gap", "moment_residual"});
      for (std::size_t i = 0; i < run.records.size(); ++i) {
        const hbound::VerificationRecord& record = run.records[i];
        text << csv_join({std::to_string(i), json(record.kind).get<std::string>(),
                          format_full(record.achieved_h2), format_full(record.bound),
                          format_full(record.gap), format_full(record.moment_residual)});
      }
      break;
    }
    case Format::table: {
      text << "index  kind       achieved_h2        bound              gap                residual\n";
      for (std::size_t i = 0; i < run.records.size(); ++i) {
        const hbound::VerificationRecord& record = run.records[i];
        char line[256];
        std::snprintf(line, sizeof(line), "%-6zu %-10s %-18.12g %-18.12g %-18.12g %-10.3g\n", i,
                      json(record.kind).get<std::string>().c_str(), record.achieved_h2,
                      record.bound, record.gap, record.moment_residual);
        text << line;
      }
      text << "min gap:          " << format_full(run.summary.min_gap) << '\n';
      text << "violations:       " << run.summary.violation_count << '\n';
      text << "optimizer ok:     " << (run.summary.optimizer_converged ? "yes" : "NO") << '\n';
      text << "two-point mass:   " << (run.summary.two_point_concentrated ? "yes" : "NO")
           << '\n';
      for (const std::string& err : run.summary.errors) {
        text << "error: " << err << '\n';
      }
      break;
    }
  }
  emit(out, text.str());

  if (violation) return kExitViolation;
  if (!run.summary.optimizer_converged) return kExitConvergence;
  return kExitOk;
}

// --- sequence ---------------------------------------------------------------

int run_sequence(const SpecOptions& spec_options, const std::vector<long>& j_list,
                 const OutputOptions& out) {
  const auto sigma = [](const std::optional<double>& sd, const std::optional<double>& var,
                        const char* which) {
    if (sd) return *sd;
    if (var) {
      if (*var < 0.0) throw hbound::InvalidSpec("negative variance");
      return std::sqrt(*var);
    }
    throw hbound::InvalidSpec(std::string("missing --sd-") + which + " or --var-" + which);
  };
  const double sigma_p = sigma(spec_options.sd_p, spec_options.var_p, "p");
  const double sigma_q = sigma(spec_options.sd_q, spec_options.var_q, "q");
  const double xi = hbound::equal_means_xi(sigma_p, sigma_q);

  struct Row {
    long j;
    double h2;
    double binary;
  };
  std::vector<Row> rows;
  for (long j : j_list) {
    const hbound::DiscretePair pair = hbound::equal_means_sequence(sigma_p, sigma_q, j);
    rows.push_back(
        {j, hbound::hellinger_sq(pair), hbound::binary_h2(xi / static_cast<double>(j),
                                                          1.0 / static_cast<double>(j))});
  }

  bool equality_ok = true;
  bool monotone = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (std::abs(rows[i].h2 - rows[i].binary) > 1e-10) equality_ok = false;
    if (i > 0 && rows[i].j > rows[i - 1].j && xi != 1.0 && rows[i].h2 >= rows[i - 1].h2) {
      monotone = false;
    }
  }

  std::ostringstream text;
  switch (out.format) {
    case Format::json_fmt: {
      json results = json::array();
      for (const Row& row : rows) {
        results.push_back(json{{"j", row.j}, {"h2", row.h2}, {"binary_h2", row.binary}});
      }
      json j{{"command", "sequence"},
             {"spec", json{{"sigma_p", sigma_p}, {"sigma_q", sigma_q}, {"xi", xi}}},
             {"results", results},
             {"summary", json{{"equality_ok", equality_ok}, {"monotone", monotone}}}};
      text << j.dump(2) << '\n';
      break;
    }
    case Format::csv: {
      text << csv_join({"j", "h2", "binary_h2"});
      for (const Row& row : rows) {
        text << csv_join({std::to_string(row.j), format_full(row.h2),
                          format_full(row.binary)});
      }
      break;
    }
    case Format::table: {
      text << "j          h2                  binary_h2(xi/j, 1/j)\n";
      for (const Row& row : rows) {
        char line[160];
        std::snprintf(line, sizeof(line), "%-10ld %-19.12g %-19.12g\n", row.j, row.h2,
                      row.binary);
        text << line;
      }
      text << "xi:        " << format_full(xi) << '\n';
      text << "equality within 1e-10: " << (equality_ok ? "yes" : "NO") << '\n';
      text << "monotone decreasing:   " << (monotone ? "yes" : "NO") << '\n';
      break;
    }
  }
  emit(out, text.str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tight squared-Hellinger lower bounds under mean and variance constraints"};
  app.require_subcommand(1);

  OutputOptions out;
  SpecOptions bound_spec, compare_spec, verify_spec, sequence_spec;
  ConfigOptions verify_config;
  std::vector<long> j_list{10, 100, 1000, 10000};

  // Global flags; subcommand fallthrough lets them appear in either position.
  add_format_options(&app, out);
  app.add_option("--seed", verify_config.config.seed, "RNG seed");
  app.add_option("--tol-moments", verify_config.config.tol_moments,
                 "Moment residual tolerance");
  app.add_option("--tol-gap", verify_config.config.tol_gap, "Bound gap tolerance");

  CLI::App* bound = app.add_subcommand("bound", "Tight bound, factors, and attainer");
  bound->fallthrough();
  add_spec_options(bound, bound_spec, true);

  CLI::App* compare =
      app.add_subcommand("compare", "Bounds next to the Gaussian and exponential closed forms");
  compare->fallthrough();
  add_spec_options(compare, compare_spec, true);

  CLI::App* verify = app.add_subcommand("verify", "Sampled and optimized verification records");
  verify->fallthrough();
  add_spec_options(verify, verify_spec, true);
  add_config_options(verify, verify_config);

  CLI::App* sequence =
      app.add_subcommand("sequence", "Equal-means vanishing sequence h2 table");
  sequence->fallthrough();
  add_spec_options(sequence, sequence_spec, false);
  sequence->add_option("--j", j_list, "Sequence indices");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (bound->parsed()) return run_bound(bound_spec, out);
    if (compare->parsed()) return run_compare(compare_spec, out);
    if (verify->parsed()) return run_verify(verify_spec, verify_config, out);
    if (sequence->parsed()) return run_sequence(sequence_spec, j_list, out);
  } catch (const hbound::ConvergenceFailure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConvergence;
  } catch (const hbound::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}
