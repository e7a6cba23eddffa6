#include <rra/cli.hpp>

#include <rra/channels.hpp>
#include <rra/convexity.hpp>
#include <rra/core.hpp>
#include <rra/experiments.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <utility>

namespace rra::cli {
namespace {

using ordered_json = nlohmann::ordered_json;

Direction parse_direction(const std::string& s) {
  if (s == "dl") return Direction::DL;
  if (s == "ul") return Direction::UL;
  throw std::invalid_argument("--direction must be dl or ul");
}

// Locale-independent fixed-significant-digit formatting so identical configs
// always produce identical bytes.
std::string format_number(double v, int precision) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res =
      std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, precision);
  return std::string(buf, res.ptr);
}

std::string csv_row(const std::vector<std::string>& cells) {
  std::string line;
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += cells[i];
  }
  line += '\n';
  return line;
}

void apply_json_config(const nlohmann::json& j, RunConfig& cfg) {
  if (!j.is_object()) throw std::invalid_argument("config file must hold a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "direction")
      cfg.direction = parse_direction(value.get<std::string>());
    else if (key == "model")
      cfg.model = value.get<std::string>();
    else if (key == "M")
      cfg.M = value.get<int>();
    else if (key == "snr_db") {
      cfg.snr_db = value.get<double>();
      cfg.snr_db_given = true;
    } else if (key == "d_h")
      cfg.d_h = value.get<double>();
    else if (key == "theta1_deg")
      cfg.theta1_deg = value.get<double>();
    else if (key == "theta2_deg")
      cfg.theta2_deg = value.get<double>();
    else if (key == "beta1")
      cfg.beta1 = value.get<double>();
    else if (key == "beta2")
      cfg.beta2 = value.get<double>();
    else if (key == "gamma1")
      cfg.gamma1 = value.get<double>();
    else if (key == "gamma2")
      cfg.gamma2 = value.get<double>();
    else if (key == "alpha1")
      cfg.alpha1 = value.get<double>();
    else if (key == "alpha2")
      cfg.alpha2 = value.get<double>();
    else if (key == "mu11")
      cfg.mu11 = value.get<double>();
    else if (key == "mu12")
      cfg.mu12 = value.get<double>();
    else if (key == "mu21")
      cfg.mu21 = value.get<double>();
    else if (key == "mu22")
      cfg.mu22 = value.get<double>();
    else if (key == "grid_n")
      cfg.grid_n = value.get<long long>();
    else if (key == "grid_step_deg")
      cfg.grid_step_deg = value.get<double>();
    else if (key == "oracle")
      cfg.oracle = value.get<bool>();
    else if (key == "out")
      cfg.out = value.get<std::string>();
    else if (key == "format")
      cfg.format = value.get<std::string>();
    else if (key == "precision")
      cfg.precision = value.get<int>();
    else if (key == "M_list")
      cfg.M_list = value.get<std::vector<int>>();
    else if (key == "separations_deg")
      cfg.separations_deg = value.get<std::vector<double>>();
    else
      throw std::invalid_argument("unknown config key: " + key);
  }
}

double linear_snr(const RunConfig& cfg) { return std::pow(10.0, cfg.snr_db / 10.0); }

GeneralRateModel<double> build_model(const RunConfig& cfg) {
  if (cfg.model == "general") {
    GeneralRateModel<double> m{cfg.alpha1, cfg.alpha2, cfg.mu11, cfg.mu12,
                               cfg.mu21,   cfg.mu22,   cfg.direction};
    validate(m);
    return m;
  }
  const double rho = linear_snr(cfg);
  if (cfg.model == "rayleigh") {
    RayleighScenario<double> s{cfg.M,
                               rho,
                               cfg.beta1,
                               cfg.beta2,
                               cfg.gamma1.value_or(cfg.beta1),
                               cfg.gamma2.value_or(cfg.beta2),
                               cfg.direction};
    return rayleigh_model(s);
  }
  if (cfg.model == "los") {
    LoSScenario<double> s{cfg.M,
                          cfg.d_h,
                          rho,
                          cfg.beta1,
                          cfg.beta2,
                          degrees_to_radians(cfg.theta1_deg),
                          degrees_to_radians(cfg.theta2_deg),
                          cfg.direction};
    return los_model(s);
  }
  if (cfg.model.empty())
    throw std::invalid_argument("--model is required (general, rayleigh or los)");
  throw std::invalid_argument("--model must be one of general, rayleigh, los");
}

ordered_json model_json(const GeneralRateModel<double>& m) {
  return ordered_json{{"alpha1", m.alpha1}, {"alpha2", m.alpha2}, {"mu11", m.mu11},
                      {"mu12", m.mu12},     {"mu21", m.mu21},     {"mu22", m.mu22}};
}

int write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return std::cout.good() ? 0 : 3;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) {
    std::cerr << "error: cannot open output file: " << out_path << "\n";
    return 3;
  }
  f << text;
  f.flush();
  if (!f.good()) {
    std::cerr << "error: write failed: " << out_path << "\n";
    return 3;
  }
  return 0;
}

int cmd_boundary(const RunConfig& cfg) {
  const GeneralRateModel<double> model = build_model(cfg);
  const Eigen::Index n = cfg.grid_n > 0 ? static_cast<Eigen::Index>(cfg.grid_n) : 201;
  const ParetoBoundary<double> boundary = sample_boundary(model, n);

  std::string text;
  if (cfg.format == "json") {
    ordered_json doc{{"command", "boundary"},
                     {"direction", to_string(model.direction)},
                     {"model", model_json(model)}};
    ordered_json segs = ordered_json::array();
    for (const auto& seg : boundary.segments) {
      ordered_json points = ordered_json::array();
      for (Eigen::Index i = 0; i < seg.eta.size(); ++i)
        points.push_back(ordered_json{{"eta", seg.eta[i]}, {"r1", seg.r1[i]}, {"r2", seg.r2[i]}});
      segs.push_back(ordered_json{
          {"id", seg.id}, {"parameter", seg.parameter}, {"points", std::move(points)}});
    }
    doc["segments"] = std::move(segs);
    text = doc.dump(2) + "\n";
  } else {
    text = csv_row({"segment", "parameter", "eta", "R1_bits_per_s_per_Hz",
                    "R2_bits_per_s_per_Hz"});
    for (const auto& seg : boundary.segments)
      for (Eigen::Index i = 0; i < seg.eta.size(); ++i)
        text += csv_row({seg.id, seg.parameter, format_number(seg.eta[i], cfg.precision),
                         format_number(seg.r1[i], cfg.precision),
                         format_number(seg.r2[i], cfg.precision)});
  }
  return write_output(text, cfg.out);
}

// Always emits JSON: a verdict is a record, not a table.
int cmd_check(const RunConfig& cfg) {
  const GeneralRateModel<double> model = build_model(cfg);
  const Eigen::Index n = cfg.grid_n > 0 ? static_cast<Eigen::Index>(cfg.grid_n) : kDefaultGridN;
  const ConvexityVerdict<double> v = check_convexity(model, n);

  ordered_json doc{{"command", "check"},
                   {"direction", to_string(model.direction)},
                   {"model", model_json(model)},
                   {"grid_n", n},
                   {"convex", v.convex},
                   {"method", to_string(v.method)},
                   {"worst_second_derivative", v.worst_second_derivative},
                   {"worst_location", v.worst_location},
                   {"worst_segment", v.worst_segment}};
  if (v.kink_margin && std::isfinite(*v.kink_margin)) doc["kink_margin"] = *v.kink_margin;
  doc["marginal"] = v.marginal;
  doc["degenerate"] = v.degenerate;

  if (cfg.oracle) {
    const ConvexityVerdict<double> o = chord_oracle(model, kDefaultOracleN);
    doc["oracle"] = ordered_json{{"resolution", kDefaultOracleN},
                                 {"convex", o.convex},
                                 {"worst_chord_excess", o.worst_second_derivative},
                                 {"worst_location_r2", o.worst_location},
                                 {"marginal", o.marginal},
                                 {"agrees", o.convex == v.convex}};
  }

  const int io = write_output(doc.dump(2) + "\n", cfg.out);
  if (io != 0) return io;
  return v.convex ? 0 : 1;
}

int cmd_sweep(const RunConfig& cfg) {
  const double step = cfg.grid_step_deg > 0 ? cfg.grid_step_deg : 0.01;
  const AngleSweepResult res =
      angle_sweep(cfg.M, linear_snr(cfg), cfg.direction, step, cfg.d_h);

  std::string text;
  if (cfg.format == "json") {
    ordered_json points = ordered_json::array();
    for (Eigen::Index i = 0; i < res.theta2_deg.size(); ++i)
      points.push_back(ordered_json{{"theta2_deg", res.theta2_deg[i]},
                                    {"g", res.gain[i]},
                                    {"convex", bool(res.convex[i])}});
    ordered_json doc{{"command", "sweep"},
                     {"M", res.M},
                     {"snr_db", cfg.snr_db},
                     {"snr", res.snr},
                     {"direction", to_string(res.direction)},
                     {"d_h", cfg.d_h},
                     {"grid_step_deg", step},
                     {"theta1_rad", res.theta1},
                     {"points", std::move(points)},
                     {"nonconvex_fraction", res.nonconvex_fraction},
                     {"nonconvex_interval_count", res.nonconvex_interval_count}};
    text = doc.dump(2) + "\n";
  } else {
    text = csv_row({"row_type", "theta2_deg", "g", "convex", "nonconvex_fraction",
                    "nonconvex_interval_count"});
    for (Eigen::Index i = 0; i < res.theta2_deg.size(); ++i)
      text += csv_row({"point", format_number(res.theta2_deg[i], cfg.precision),
                       format_number(res.gain[i], cfg.precision), res.convex[i] ? "1" : "0",
                       "", ""});
    text += csv_row({"summary", "", "", "",
                     format_number(res.nonconvex_fraction, cfg.precision),
                     std::to_string(res.nonconvex_interval_count)});
  }
  return write_output(text, cfg.out);
}

int cmd_sumrate(const RunConfig& cfg) {
  std::vector<double> separations;
  if (cfg.separations_deg) {
    separations = *cfg.separations_deg;
    if (separations.empty())
      throw std::invalid_argument("separations_deg must not be empty");
  } else {
    const double step = cfg.grid_step_deg > 0 ? cfg.grid_step_deg : 0.1;
    if (!(std::isfinite(step) && step > 0))
      throw std::invalid_argument("--grid-step-deg must be positive");
    for (double x = 0;
         x <= 90.0 + 1e-9; x += step)
      separations.push_back(x);
  }

  const double snr = linear_snr(cfg);
  const SumRateComparison res = sum_rate_comparison(cfg.M, snr, separations, cfg.d_h);
  const LoSScenario<double> coincident{cfg.M, cfg.d_h, snr, 1.0, 1.0,
                                       0.0,   0.0,     Direction::DL};
  const double mux0 = sum_rate_multiplexing(coincident);
  const double sched = sum_rate_scheduling(coincident);
  const double gain0 = scheduling_gain(coincident);

  std::string text;
  if (cfg.format == "json") {
    ordered_json points = ordered_json::array();
    for (Eigen::Index i = 0; i < res.separation_deg.size(); ++i)
      points.push_back(ordered_json{{"separation_deg", res.separation_deg[i]},
                                    {"multiplexing", res.multiplexing[i]},
                                    {"scheduling", res.scheduling[i]},
                                    {"gain", res.scheduling[i] / res.multiplexing[i]}});
    ordered_json doc{{"command", "sumrate"},
                     {"M", res.M},
                     {"snr_db", cfg.snr_db},
                     {"snr", res.snr},
                     {"d_h", cfg.d_h},
                     {"points", std::move(points)},
                     {"crossover_separations_deg", res.crossover_separations_deg},
                     {"zero_separation_gain", gain0}};
    text = doc.dump(2) + "\n";
  } else {
    text = csv_row({"row_type", "separation_deg", "sum_rate_multiplexing_bits_per_s_per_Hz",
                    "sum_rate_scheduling_bits_per_s_per_Hz", "gain"});
    for (Eigen::Index i = 0; i < res.separation_deg.size(); ++i)
      text += csv_row({"point", format_number(res.separation_deg[i], cfg.precision),
                       format_number(res.multiplexing[i], cfg.precision),
                       format_number(res.scheduling[i], cfg.precision),
                       format_number(res.scheduling[i] / res.multiplexing[i], cfg.precision)});
    for (double x : res.crossover_separations_deg)
      text += csv_row({"crossover", format_number(x, cfg.precision), "", "", ""});
    text += csv_row({"summary", "0", format_number(mux0, cfg.precision),
                     format_number(sched, cfg.precision), format_number(gain0, cfg.precision)});
  }
  return write_output(text, cfg.out);
}

int cmd_scaling(const RunConfig& cfg) {
  if (cfg.M_list.empty())
    throw std::invalid_argument("scaling requires at least one --M value");
  // Documented default for this experiment is the low-power regime snr = 0.01.
  const double snr = cfg.snr_db_given ? linear_snr(cfg) : 0.01;
  const double step = cfg.grid_step_deg > 0 ? cfg.grid_step_deg : 0.01;
  const std::vector<ScalingRow> rows =
      scaling_check(cfg.M_list, snr, cfg.direction, step, cfg.d_h);

  std::string text;
  if (cfg.format == "json") {
    ordered_json arr = ordered_json::array();
    for (const ScalingRow& r : rows)
      arr.push_back(ordered_json{{"M", r.M},
                                 {"nonconvex_fraction", r.nonconvex_fraction},
                                 {"fraction_times_M", r.fraction_times_M}});
    ordered_json doc{{"command", "scaling"},
                     {"snr", snr},
                     {"direction", to_string(cfg.direction)},
                     {"grid_step_deg", step},
                     {"d_h", cfg.d_h},
                     {"rows", std::move(arr)}};
    text = doc.dump(2) + "\n";
  } else {
    text = csv_row({"M", "nonconvex_fraction", "fraction_times_M"});
    for (const ScalingRow& r : rows)
      text += csv_row({std::to_string(r.M), format_number(r.nonconvex_fraction, cfg.precision),
                       format_number(r.fraction_times_M, cfg.precision)});
  }
  return write_output(text, cfg.out);
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Two-user massive MIMO rate regions: boundaries, convexity verdicts, "
               "angle sweeps and sum-rate comparisons"};
  app.name("rra");
  app.require_subcommand(1);

  RunConfig cfg;

  // Staging area for raw flag values; a flag only lands in cfg if it was
  // actually given, so file values survive unless overridden.
  struct Staging {
    std::string direction, model, format, out, config;
    int M{0};
    double snr_db{0}, d_h{0}, theta1{0}, theta2{0};
    double beta1{0}, beta2{0}, gamma1{0}, gamma2{0};
    double alpha1{0}, alpha2{0}, mu11{0}, mu12{0}, mu21{0}, mu22{0};
    long long grid_n{0};
    double grid_step{0};
    bool oracle{false};
    std::vector<int> M_list;
  } st;
  std::vector<std::pair<CLI::Option*, std::function<void()>>> appliers;

  const auto add_common = [&](CLI::App* sub, bool m_is_list) {
    const auto reg = [&](CLI::Option* opt, std::function<void()> apply) {
      appliers.emplace_back(opt, std::move(apply));
    };
    reg(sub->add_option("--direction", st.direction, "dl or ul"),
        [&] { cfg.direction = parse_direction(st.direction); });
    reg(sub->add_option("--model", st.model, "general, rayleigh or los"),
        [&] { cfg.model = st.model; });
    if (m_is_list)
      reg(sub->add_option("--M", st.M_list, "antenna counts (repeatable)"),
          [&] { cfg.M_list = st.M_list; });
    else
      reg(sub->add_option("--M", st.M, "antenna count"), [&] { cfg.M = st.M; });
    reg(sub->add_option("--snr-db", st.snr_db, "SNR in dB (linear rho = 10^(dB/10))"),
        [&] {
          cfg.snr_db = st.snr_db;
          cfg.snr_db_given = true;
        });
    reg(sub->add_option("--d-h", st.d_h, "antenna spacing in wavelengths"),
        [&] { cfg.d_h = st.d_h; });
    reg(sub->add_option("--theta1-deg", st.theta1, "user 1 angle in degrees"),
        [&] { cfg.theta1_deg = st.theta1; });
    reg(sub->add_option("--theta2-deg", st.theta2, "user 2 angle in degrees"),
        [&] { cfg.theta2_deg = st.theta2; });
    reg(sub->add_option("--beta1", st.beta1, "large-scale gain of user 1"),
        [&] { cfg.beta1 = st.beta1; });
    reg(sub->add_option("--beta2", st.beta2, "large-scale gain of user 2"),
        [&] { cfg.beta2 = st.beta2; });
    reg(sub->add_option("--gamma1", st.gamma1, "estimate quality of user 1 (default beta1)"),
        [&] { cfg.gamma1 = st.gamma1; });
    reg(sub->add_option("--gamma2", st.gamma2, "estimate quality of user 2 (default beta2)"),
        [&] { cfg.gamma2 = st.gamma2; });
    reg(sub->add_option("--alpha1", st.alpha1, "general model: signal gain of user 1"),
        [&] { cfg.alpha1 = st.alpha1; });
    reg(sub->add_option("--alpha2", st.alpha2, "general model: signal gain of user 2"),
        [&] { cfg.alpha2 = st.alpha2; });
    reg(sub->add_option("--mu11", st.mu11, "general model: interference coefficient"),
        [&] { cfg.mu11 = st.mu11; });
    reg(sub->add_option("--mu12", st.mu12, "general model: interference coefficient"),
        [&] { cfg.mu12 = st.mu12; });
    reg(sub->add_option("--mu21", st.mu21, "general model: interference coefficient"),
        [&] { cfg.mu21 = st.mu21; });
    reg(sub->add_option("--mu22", st.mu22, "general model: interference coefficient"),
        [&] { cfg.mu22 = st.mu22; });
    reg(sub->add_option("--grid-n", st.grid_n,
                        "points per segment (boundary: 201, check: 1001)"),
        [&] { cfg.grid_n = st.grid_n; });
    reg(sub->add_option("--grid-step-deg", st.grid_step,
                        "sweep step in degrees (sweep/scaling: 0.01, sumrate: 0.1)"),
        [&] { cfg.grid_step_deg = st.grid_step; });
    reg(sub->add_flag("--oracle", st.oracle, "cross-check the verdict with the chord oracle"),
        [&] { cfg.oracle = st.oracle; });
    reg(sub->add_option("--out", st.out, "output file (default stdout)"),
        [&] { cfg.out = st.out; });
    reg(sub->add_option("--format", st.format, "csv or json")
            ->check(CLI::IsMember({"csv", "json"})),
        [&] { cfg.format = st.format; });
    sub->add_option("--config", st.config, "JSON config file; flags override its values");
  };

  CLI::App* boundary =
      app.add_subcommand("boundary", "Sample the Pareto boundary of the rate region");
  CLI::App* check = app.add_subcommand("check", "Decide convexity of the rate region");
  CLI::App* sweep =
      app.add_subcommand("sweep", "Convexity across user angles (theta1 = 0, LoS)");
  CLI::App* sumrate = app.add_subcommand(
      "sumrate", "Multiplexing vs. scheduling sum rate across angle separations (LoS, DL)");
  CLI::App* scaling = app.add_subcommand(
      "scaling", "Non-convex angle fraction times M across antenna counts (LoS)");
  for (CLI::App* sub : {boundary, check, sweep, sumrate, scaling})
    add_common(sub, sub == scaling);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (!st.config.empty()) {
      std::ifstream f(st.config);
      if (!f) {
        std::cerr << "error: cannot read config file: " << st.config << "\n";
        return 3;
      }
      nlohmann::json doc;
      f >> doc;
      apply_json_config(doc, cfg);
    }
    for (const auto& [opt, apply] : appliers)
      if (opt->count() > 0) apply();

    if (boundary->parsed()) return cmd_boundary(cfg);
    if (check->parsed()) return cmd_check(cfg);
    if (sweep->parsed()) return cmd_sweep(cfg);
    if (sumrate->parsed()) return cmd_sumrate(cfg);
    return cmd_scaling(cfg);
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace rra::cli
