// Command-line front end: sampling, spectra, transforms and the acceptance
// suites. JSON goes to --out (or stdout); errors go to stderr as JSON.

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <iostream>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sinepalm/dirac.hpp"
#include "sinepalm/ensembles.hpp"
#include "sinepalm/io.hpp"
#include "sinepalm/opuc.hpp"
#include "sinepalm/parallel.hpp"
#include "sinepalm/verify.hpp"

namespace {

using namespace sinepalm;

struct Options {
  std::optional<std::uint64_t> seed;
  std::string out = "-";
  unsigned jobs = 0;
  std::size_t n = 8;
  double beta = 2.0;
  std::vector<double> window;
  std::string side = "right";
  double eta = 0.0;
  double epsilon = 0.1;
  double t_min = 1e-4;
  std::size_t cells = 4096;
  std::size_t replicas = 10000;
  std::string suite = "all";
  std::string measure_file;
  std::string coeffs_file;
  std::string operator_file;
  std::string config_file;
  std::string kind = "modified";
  std::string q = "cauchy";
  std::string format = "json";
};

// Values from a JSON experiment config fill every flag not given explicitly.
void apply_config(Options& o, const CLI::App& cmd) {
  if (o.config_file.empty()) return;
  const json cfg = read_json_file(o.config_file);
  if (!cfg.is_object()) throw std::invalid_argument("config must be a JSON object");
  auto take = [&](const char* key, const char* flag, auto& target) {
    if (cfg.contains(key) && cmd.count(flag) == 0) cfg.at(key).get_to(target);
  };
  if (cfg.contains("seed") && cmd.count("--seed") == 0) o.seed = cfg.at("seed").get<std::uint64_t>();
  take("n", "--n", o.n);
  take("beta", "--beta", o.beta);
  take("replicas", "--replicas", o.replicas);
  take("epsilon", "--epsilon", o.epsilon);
  take("t_min", "--t-min", o.t_min);
  take("cells", "--cells", o.cells);
}

std::uint64_t resolve_seed(Options& o) {
  if (!o.seed) o.seed = entropy_seed();
  return *o.seed;
}

unsigned jobs_of(const Options& o) { return o.jobs == 0 ? default_jobs() : o.jobs; }

void emit(const Options& o, const json& j) { write_text(o.out, j.dump(2) + "\n"); }

CoefficientSequence load_coeffs(const Options& o) {
  if (o.coeffs_file.empty()) throw std::invalid_argument("--coeffs is required");
  return coefficients_from_json(read_json_file(o.coeffs_file));
}

CoefficientSequence as_kind(const CoefficientSequence& c, CoefficientKind k) {
  return c.kind() == k ? c : convert_coefficients(c, k);
}

std::pair<double, double> window_of(const Options& o, double a, double b) {
  if (o.window.empty()) return {a, b};
  if (!(o.window[0] < o.window[1])) throw std::invalid_argument("--window needs a < b");
  return {o.window[0], o.window[1]};
}

CoefficientKind kind_of(const std::string& s) {
  return s == "verblunsky" ? CoefficientKind::verblunsky : CoefficientKind::modified;
}

std::string spectrum_csv(const SpectralMeasure& s) {
  CsvWriter csv({"lambda", "weight"});
  for (const auto& [lam, w] : s.atoms) csv.add_row({lam, w});
  return csv.str();
}

int cmd_kn_sample(Options& o) {
  const std::uint64_t seed = resolve_seed(o);
  json j = to_json(sample_kn(o.n, o.beta, SeedSpec{seed, 0}));
  j["seed"] = seed;
  emit(o, j);
  return 0;
}

int cmd_measure(Options& o) {
  if (!o.coeffs_file.empty() == !o.measure_file.empty())
    throw std::invalid_argument("give exactly one of --coeffs and --measure");
  if (!o.coeffs_file.empty()) {
    const CoefficientSequence c = load_coeffs(o);
    emit(o, to_json(c.kind() == CoefficientKind::modified
                        ? measure_of(c)
                        : alpha_to_measure(c)));
  } else {
    const UnitCircleMeasure mu = measure_from_json(read_json_file(o.measure_file));
    emit(o, to_json(as_kind(measure_to_alpha(mu), kind_of(o.kind))));
  }
  return 0;
}

// Accepts a bare operator or the {"operator": ...} record written by sine-beta.
DiracOperator load_operator(const std::string& path) {
  const json j = read_json_file(path);
  if (j.is_object() && j.contains("operator") && !j.contains("grid")) return operator_from_json(j.at("operator"));
  return operator_from_json(j);
}

int cmd_spectrum(Options& o) {
  if (!o.operator_file.empty() == !o.measure_file.empty())
    throw std::invalid_argument("give exactly one of --operator and --measure");
  const DiracOperator op = o.operator_file.empty()
                               ? operator_from_measure(measure_from_json(read_json_file(o.measure_file)))
                               : load_operator(o.operator_file);
  const auto [a, b] = window_of(o, -10.0, 10.0);
  const SpectralMeasure s = spectral_measure(op, a, b, side_from_string(o.side));
  if (o.format == "csv") {
    write_text(o.out, spectrum_csv(s));
  } else {
    emit(o, to_json(s));
  }
  return 0;
}

int cmd_palm(Options& o) {
  emit(o, to_json(palm_transform(as_kind(load_coeffs(o), CoefficientKind::modified))));
  return 0;
}

int cmd_aleksandrov(Options& o) {
  emit(o, to_json(aleksandrov_transform(load_coeffs(o), std::polar(1.0, o.eta))));
  return 0;
}

QMode q_mode_of(const std::string& s) {
  if (s == "cauchy") return QMode::cauchy();
  if (s == "infinity") return QMode::infinity();
  std::size_t used = 0;
  double q = 0.0;
  try {
    q = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || !std::isfinite(q))
    throw std::invalid_argument("--q must be 'cauchy', 'infinity' or a number");
  return QMode::fixed(q);
}

int cmd_sine_beta(Options& o) {
  const std::uint64_t seed = resolve_seed(o);
  SinePathSpec spec;
  spec.beta = o.beta;
  spec.t_min = o.t_min;
  spec.cells = o.cells;
  spec.q_mode = q_mode_of(o.q);
  spec.validate();
  const DiracOperator op = sample_sine_operator(spec, SeedSpec{seed, 0});
  const auto [a, b] = window_of(o, -20.0 * std::numbers::pi, 20.0 * std::numbers::pi);
  const SpectralMeasure s = spectral_measure(op, a, b, side_from_string(o.side));
  emit(o, json{{"seed", seed}, {"operator", to_json(op)}, {"spectrum", to_json(s)}});
  return 0;
}

int cmd_bias(Options& o) {
  const std::uint64_t seed = resolve_seed(o);
  if (o.n < 2) throw std::invalid_argument("--n must be at least 2");
  const WeightedSample ws = bias_by_window(kn_sampler(o.n, o.beta), o.epsilon, o.replicas, seed, jobs_of(o));
  if (o.format == "csv") {
    std::vector<std::string> header = {"replica", "weight"};
    for (std::size_t k = 0; k + 1 < o.n; ++k) {
      header.push_back("re_gamma" + std::to_string(k));
      header.push_back("im_gamma" + std::to_string(k));
    }
    CsvWriter csv(header);
    for (std::size_t i = 0; i < ws.draws.size(); ++i) {
      std::vector<CsvCell> row = {static_cast<long long>(ws.replica_index[i]), ws.weights[i]};
      for (std::size_t k = 0; k + 1 < o.n; ++k) {
        row.emplace_back(ws.draws[i].features[k].real());
        row.emplace_back(ws.draws[i].features[k].imag());
      }
      csv.add_row(row);
    }
    write_text(o.out, csv.str());
    std::cerr << json{{"seed", seed}}.dump() << "\n";
    return 0;
  }
  // Compare each coordinate with an equally large direct draw of the Palm law.
  std::vector<TestReport> reports;
  std::vector<CoefficientSequence> ref(o.replicas, CoefficientSequence(CoefficientKind::modified, {1.0}));
  const std::uint64_t ref_seed = seed ^ 0x5DEECE66Dull;
  parallel_for(o.replicas, jobs_of(o),
               [&](std::size_t i) { ref[i] = sample_biased_direct(o.n, o.beta, SeedSpec{ref_seed, i}); });
  const std::vector<double> ones(o.replicas, 1.0);
  for (std::size_t k = 0; k + 1 < o.n; ++k) {
    for (int part = 0; part < 2; ++part) {
      std::vector<double> x, r;
      for (const BiasDraw& d : ws.draws) x.push_back(part == 0 ? d.features[k].real() : d.features[k].imag());
      for (const auto& c : ref) r.push_back(part == 0 ? c[k].real() : c[k].imag());
      TestReport rep = ks_test_weighted(x, ws.weights, r, ones);
      rep.name = std::string(part == 0 ? "Re" : "Im") + " gamma_" + std::to_string(k) + " vs Palm law";
      reports.push_back(rep);
    }
  }
  json j = aggregate_report("bias", seed, reports);
  j["epsilon"] = o.epsilon;
  j["n"] = o.n;
  j["beta"] = o.beta;
  j["replicas"] = ws.replicas;
  j["kept"] = ws.draws.size();
  j["mean_arc_mass"] = ws.mean_arc_mass;
  j["effective_size"] = ws.effective_size();
  emit(o, j);
  return 0;
}

int cmd_verify(Options& o) {
  const std::vector<TestReport> reports = run_suite(o.suite, *o.seed, jobs_of(o));
  const json j = aggregate_report(o.suite, *o.seed, reports);
  emit(o, j);
  return j.at("pass").get<bool>() ? 0 : 1;
}

void error_record(const std::string& command, const std::string& kind, const std::string& message) {
  std::cerr << json{{"error", {{"command", command}, {"type", kind}, {"message", message}}}}.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random measures on the circle, Dirac operators and Palm transforms"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* c) {
    c->add_option("--seed", o.seed, "Master seed (u64)");
    c->add_option("--out", o.out, "Output path, '-' for stdout");
    c->add_option("--jobs", o.jobs, "Worker threads (default: hardware concurrency)")
        ->check(CLI::PositiveNumber);
    c->add_option("--config", o.config_file, "JSON experiment config")->check(CLI::ExistingFile);
  };
  auto n_beta = [&](CLI::App* c) {
    c->add_option("--n", o.n, "Number of atoms")->check(CLI::PositiveNumber);
    c->add_option("--beta", o.beta, "Inverse temperature")->check(CLI::PositiveNumber);
  };
  auto window_side = [&](CLI::App* c) {
    c->add_option("--window", o.window, "Spectral window a b")->expected(2);
    c->add_option("--side", o.side, "Spectral side")->check(CLI::IsMember({"left", "right"}));
  };
  auto fmt = [&](CLI::App* c) {
    c->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  };

  auto* kn = app.add_subcommand("kn-sample", "Sample Killip-Nenciu modified coefficients");
  common(kn);
  n_beta(kn);

  auto* meas = app.add_subcommand("measure", "Convert between coefficients and measures");
  common(meas);
  meas->add_option("--coeffs", o.coeffs_file, "Coefficients JSON")->check(CLI::ExistingFile);
  meas->add_option("--measure", o.measure_file, "Measure JSON")->check(CLI::ExistingFile);
  meas->add_option("--kind", o.kind, "Output coefficient kind")
      ->check(CLI::IsMember({"verblunsky", "modified"}));

  auto* spec = app.add_subcommand("spectrum", "Eigenvalues and spectral weights in a window");
  common(spec);
  spec->add_option("--measure", o.measure_file, "Measure JSON")->check(CLI::ExistingFile);
  spec->add_option("--operator", o.operator_file, "Operator JSON")->check(CLI::ExistingFile);
  window_side(spec);
  fmt(spec);

  auto* palm = app.add_subcommand("palm", "Palm transform of modified coefficients");
  common(palm);
  palm->add_option("--coeffs", o.coeffs_file, "Coefficients JSON")->check(CLI::ExistingFile);

  auto* alek = app.add_subcommand("aleksandrov", "Rotate coefficients by e^{i eta}");
  common(alek);
  alek->add_option("--coeffs", o.coeffs_file, "Coefficients JSON")->check(CLI::ExistingFile);
  alek->add_option("--eta", o.eta, "Rotation angle");

  auto* sine = app.add_subcommand("sine-beta", "Sample a Sine_beta operator and its spectrum");
  common(sine);
  sine->add_option("--beta", o.beta, "Inverse temperature")->check(CLI::PositiveNumber);
  sine->add_option("--t-min", o.t_min, "Smallest resolved time");
  sine->add_option("--cells", o.cells, "Number of cells");
  sine->add_option("--q", o.q, "Right boundary: cauchy, infinity or a number");
  window_side(sine);

  auto* bias = app.add_subcommand("bias", "Window-biased Killip-Nenciu replicas");
  common(bias);
  n_beta(bias);
  bias->add_option("--epsilon", o.epsilon, "Half-width of the arc around 1")->check(CLI::PositiveNumber);
  bias->add_option("--replicas", o.replicas, "Number of replicas")->check(CLI::PositiveNumber);
  fmt(bias);

  auto* ver = app.add_subcommand("verify", "Run an acceptance suite");
  common(ver);
  ver->add_option("--suite", o.suite, "Suite name")->check(CLI::IsMember({"core", "statistical", "all"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n";
    const CLI::App* failing = &app;
    for (CLI::App* sub : app.get_subcommands()) failing = sub;
    std::cerr << failing->help();
    return 2;
  }

  CLI::App* cmd = app.get_subcommands().front();
  const std::string name = cmd->get_name();
  try {
    apply_config(o, *cmd);
    // A reproducible seed is mandatory here, and --config may supply it, so
    // this usage check runs after the config merge.
    if (name == "verify" && !o.seed) {
      std::cerr << "error: verify requires --seed\n\n" << cmd->help();
      return 2;
    }
    if (name == "kn-sample") return cmd_kn_sample(o);
    if (name == "measure") return cmd_measure(o);
    if (name == "spectrum") return cmd_spectrum(o);
    if (name == "palm") return cmd_palm(o);
    if (name == "aleksandrov") return cmd_aleksandrov(o);
    if (name == "sine-beta") return cmd_sine_beta(o);
    if (name == "bias") return cmd_bias(o);
    return cmd_verify(o);
  } catch (const std::invalid_argument& e) {
    error_record(name, "invalid_argument", e.what());
  } catch (const std::domain_error& e) {
    error_record(name, "domain_error", e.what());
  } catch (const std::exception& e) {
    error_record(name, "runtime_error", e.what());
  }
  return 1;
}
