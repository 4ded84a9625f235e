#include "cli.hpp"

#include "msunmix/abundance.hpp"
#include "msunmix/band_sim.hpp"
#include "msunmix/error.hpp"
#include "msunmix/extraction.hpp"
#include "msunmix/io.hpp"
#include "msunmix/metrics.hpp"
#include "msunmix/scene_gen.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>

namespace msunmix::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

fs::path prepare_out(const std::string& dir) {
  const fs::path out(dir);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec || !fs::is_directory(out)) {
    throw IoError("cannot create output directory '" + dir + "'");
  }
  return out;
}

std::string display_label(Method m) {
  switch (m) {
    case Method::vca: return "VCA";
    case Method::nfindr: return "N-FINDR";
    case Method::nmf: return "NMF";
  }
  return std::string(to_string(m));
}

std::vector<Method> parse_method_list(const std::string& list) {
  std::vector<Method> methods;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      methods.push_back(parse_method(item));
    } catch (const InvalidArgument&) {
      throw UsageError("unknown method '" + item + "' (expected vca, nfindr or nmf)");
    }
  }
  if (methods.empty()) throw UsageError("--methods lists no method");
  return methods;
}

Matrix normalize_pixels(const Matrix& data) {
  Matrix out = data;
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    const double n = out.col(j).norm();
    if (n > 0.0) out.col(j) /= n;
  }
  return out;
}

std::string aligned(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> widths;
  for (const auto& row : rows) {
    widths.resize(std::max(widths.size(), row.size()), 0);
    for (std::size_t c = 0; c < row.size(); ++c) widths[c] = std::max(widths[c], row[c].size());
  }
  std::string out;
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      const std::string pad(widths[c] - row[c].size(), ' ');
      out += c == 0 ? row[c] + pad : pad + row[c];
      out += c + 1 < row.size() ? "   " : "\n";
    }
  }
  return out;
}

std::string fixed(double v, int digits) {
  std::ostringstream ss;
  ss.setf(std::ios::fixed);
  ss.precision(digits);
  ss << v;
  return ss.str();
}

// --- generate --------------------------------------------------------------

struct GenerateArgs {
  std::string spec;
  std::string out;
};

void cmd_generate(const GenerateArgs& a) {
  const Scene scene = generate(io::read_scene_spec(a.spec));
  const fs::path out = prepare_out(a.out);
  io::write_cube(scene.cube, out / "scene.cube");
  io::write_endmembers(scene.endmembers, out / "truth_endmembers.csv");
  io::write_abundances(scene.abundances, out / "truth_abundances.csv");
}

// --- simulate --------------------------------------------------------------

struct SimulateArgs {
  std::string cube;
  std::string camera;
  std::string illumination;
  std::string endmembers;
  bool normalize = false;
  std::string out;
};

void cmd_simulate(const SimulateArgs& a) {
  const SpectralCube cube = io::read_cube(a.cube);
  SensitivityModel camera = io::read_curves(a.camera);
  if (!a.illumination.empty()) camera.illumination = io::read_illumination(a.illumination);
  const SimulationOptions options{a.normalize};
  const SpectralCube simulated = simulate_cube(cube, camera, options);
  std::optional<EndmemberSet> endmembers;
  if (!a.endmembers.empty()) {
    endmembers = simulate_endmembers(io::read_endmembers(a.endmembers), camera, options);
  }
  const fs::path out = prepare_out(a.out);
  io::write_cube(simulated, out / "multispectral.cube");
  if (endmembers) io::write_endmembers(*endmembers, out / "simulated_endmembers.csv");
}

// --- unmix -----------------------------------------------------------------

struct UnmixArgs {
  std::string cube;
  std::string method;
  std::size_t p = 0;
  std::uint64_t seed = 0;
  std::size_t max_iter = 1000;
  double tol = 1e-9;
  bool normalize_pixels = false;
  bool include_pan = false;
  std::string out;
};

void cmd_unmix(const UnmixArgs& a) {
  const SpectralCube cube = io::read_cube(a.cube);
  const Method method = parse_method(a.method);
  ExtractionConfig config;
  config.p = a.p;
  config.seed = a.seed;
  config.max_iter = a.max_iter;
  config.tol = a.tol;

  const Matrix data = a.normalize_pixels ? normalize_pixels(cube.data()) : cube.data();
  ExtractionResult r = extract(method, data, cube.axis(), config);
  EndmemberSet endmembers = r.endmembers;
  if (a.normalize_pixels && r.pixel_indices) {
    // Report the selected pixels as measured, not as normalised.
    Matrix sig(cube.data().rows(), static_cast<Eigen::Index>(r.pixel_indices->size()));
    for (std::size_t k = 0; k < r.pixel_indices->size(); ++k) {
      sig.col(static_cast<Eigen::Index>(k)) =
          cube.data().col(static_cast<Eigen::Index>((*r.pixel_indices)[k]));
    }
    endmembers = EndmemberSet(cube.axis(), std::move(sig), endmembers.names(), r.pixel_indices);
  }

  json run;
  run["method"] = std::string(to_string(method));
  run["cube"] = a.cube;
  run["endmembers"] = a.p;
  run["seed"] = a.seed;
  run["max_iter"] = a.max_iter;
  run["tol"] = a.tol;
  run["normalize_pixels"] = a.normalize_pixels;
  run["iterations"] = r.iterations;
  run["pixel_indices"] = r.pixel_indices ? json(*r.pixel_indices) : json(nullptr);
  run["objective_trace"] = r.objective_trace;

  const fs::path out = prepare_out(a.out);
  io::write_endmembers(endmembers, out / "endmembers.csv");
  io::write_file_atomic(out / "spectra.csv",
                        io::format_spectra(endmembers.axis(), endmembers.names(),
                                           endmembers.signatures(), a.include_pan));
  io::write_file_atomic(out / "run.json", run.dump(2) + "\n");
}

// --- abundance -------------------------------------------------------------

struct AbundanceArgs {
  std::string cube;
  std::string endmembers;
  bool no_sum_to_one = false;
  double sto_weight = 1e3;
  std::string out;
};

void cmd_abundance(const AbundanceArgs& a) {
  const SpectralCube cube = io::read_cube(a.cube);
  const EndmemberSet endmembers = io::read_endmembers(a.endmembers);
  AbundanceConfig config;
  config.sum_to_one = !a.no_sum_to_one;
  config.sto_weight = a.sto_weight;
  const AbundanceField field = solve_cube(cube, endmembers, config);
  const fs::path out = prepare_out(a.out);
  io::write_abundances(field, out / "abundances.csv");
  io::write_abundance_maps(field, out / "maps");
}

// --- evaluation shared by evaluate and report ------------------------------

struct RunInput {
  std::string label;
  EndmemberSet endmembers;
  std::optional<io::AbundanceTable> abundances;
};

struct Truth {
  EndmemberSet endmembers;
  std::optional<io::AbundanceTable> abundances;
};

struct RunEvaluation {
  std::string label;
  MatchResult match;
  std::optional<SavdReport> savd;
  std::optional<double> rmse;
};

RunInput load_run_dir(const std::string& label, const fs::path& dir) {
  const fs::path abundances = dir / "abundances.csv";
  return RunInput{label, io::read_endmembers(dir / "endmembers.csv"),
                  fs::exists(abundances) ? std::optional(io::read_abundances(abundances))
                                         : std::nullopt};
}

RunEvaluation evaluate_run(const RunInput& run, const Truth& truth, const SpectralCube* cube) {
  RunEvaluation ev;
  ev.label = run.label;
  ev.match = match_endmembers(run.endmembers, truth.endmembers);
  if (run.abundances && static_cast<std::size_t>(run.abundances->fractions.rows()) !=
                            run.endmembers.count()) {
    throw InvalidArgument(run.label + ": abundance file has " +
                          std::to_string(run.abundances->fractions.rows()) +
                          " columns for " + std::to_string(run.endmembers.count()) +
                          " endmembers");
  }
  if (run.abundances && truth.abundances) {
    ev.savd = savd_report(align_rows(run.abundances->fractions, ev.match.permutation),
                          truth.abundances->fractions, truth.endmembers.names());
  }
  if (run.abundances && cube) {
    if (!cube->axis().matches(run.endmembers.axis())) {
      throw InvalidArgument(run.label + ": cube axis does not match the endmember axis");
    }
    ev.rmse = reconstruction_rmse(cube->data(), run.endmembers.signatures(),
                                  run.abundances->fractions);
  }
  return ev;
}

// SAD of each truth endmember against its matched estimate.
std::vector<double> sad_by_truth(const MatchResult& m) {
  std::vector<double> out(m.permutation.size());
  for (std::size_t i = 0; i < m.permutation.size(); ++i) out[m.permutation[i]] = m.per_pair_sad[i];
  return out;
}

void write_evaluation(const fs::path& out, const Truth& truth,
                      const std::vector<RunEvaluation>& evals) {
  const auto& names = truth.endmembers.names();

  std::string sad_csv = "endmember";
  std::vector<std::vector<std::string>> sad_rows{{"Endmember"}};
  for (const auto& ev : evals) {
    sad_csv += "," + ev.label;
    sad_rows.front().push_back(ev.label);
  }
  sad_csv += "\n";
  std::vector<std::vector<double>> per_truth;
  for (const auto& ev : evals) per_truth.push_back(sad_by_truth(ev.match));
  for (std::size_t k = 0; k < names.size(); ++k) {
    sad_csv += names[k];
    sad_rows.push_back({names[k]});
    for (std::size_t r = 0; r < evals.size(); ++r) {
      sad_csv += "," + io::format_number(per_truth[r][k]);
      sad_rows.back().push_back(fixed(per_truth[r][k], 4));
    }
    sad_csv += "\n";
  }
  sad_csv += "Total";
  sad_rows.push_back({"Total"});
  for (const auto& ev : evals) {
    sad_csv += "," + io::format_number(ev.match.total_sad);
    sad_rows.back().push_back(fixed(ev.match.total_sad, 4));
  }
  sad_csv += "\n";

  std::vector<io::LabelledReport> savd;
  for (const auto& ev : evals) {
    if (ev.savd) savd.push_back({ev.label, *ev.savd});
  }

  std::string text = "Spectral angle of matched endmembers (radians)\n\n" + aligned(sad_rows);
  if (!savd.empty()) {
    text += "\nSAVD (percent)\n\n" + io::format_savd_text(savd);
    io::write_file_atomic(out / "evaluation.csv", io::format_savd_csv(savd));
  }
  std::vector<std::vector<std::string>> rmse_rows;
  for (const auto& ev : evals) {
    if (ev.rmse) rmse_rows.push_back({ev.label, io::format_number(*ev.rmse)});
  }
  if (!rmse_rows.empty()) text += "\nReconstruction RMSE\n\n" + aligned(rmse_rows);
  for (const auto& ev : evals) {
    if (truth.abundances && !ev.savd) text += "\n" + ev.label + ": no abundance file, SAVD skipped\n";
  }

  json doc = json::array();
  for (const auto& ev : evals) {
    json j;
    j["label"] = ev.label;
    j["permutation"] = ev.match.permutation;
    j["per_pair_sad"] = ev.match.per_pair_sad;
    j["total_sad"] = ev.match.total_sad;
    if (ev.savd) {
      json means = json::array();
      for (const auto& m : ev.savd->per_endmember_mean) means.push_back(m ? json(*m) : json(nullptr));
      j["savd"] = {{"names", ev.savd->names},
                   {"per_endmember_mean", means},
                   {"overall_mean", ev.savd->overall_mean},
                   {"overall_std", ev.savd->overall_std}};
    } else {
      j["savd"] = nullptr;
    }
    j["reconstruction_rmse"] = ev.rmse ? json(*ev.rmse) : json(nullptr);
    doc.push_back(std::move(j));
  }

  io::write_file_atomic(out / "sad.csv", sad_csv);
  io::write_file_atomic(out / "evaluation.txt", text);
  io::write_file_atomic(out / "evaluation.json", doc.dump(2) + "\n");
}

Truth load_truth(const std::string& endmembers, const std::string& abundances) {
  Truth t{io::read_endmembers(endmembers), std::nullopt};
  if (!abundances.empty()) {
    t.abundances = io::read_abundances(abundances);
    if (static_cast<std::size_t>(t.abundances->fractions.rows()) != t.endmembers.count()) {
      throw InvalidArgument("truth abundance file has " +
                            std::to_string(t.abundances->fractions.rows()) + " columns for " +
                            std::to_string(t.endmembers.count()) + " truth endmembers");
    }
  }
  return t;
}

// --- evaluate --------------------------------------------------------------

struct EvaluateArgs {
  std::string truth_endmembers;
  std::string truth_abundances;
  std::vector<std::string> runs;
  std::string est_endmembers;
  std::string est_abundances;
  std::string label = "estimate";
  std::string cube;
  std::string out;
};

void cmd_evaluate(const EvaluateArgs& a) {
  if (a.runs.empty() && a.est_endmembers.empty()) {
    throw UsageError("evaluate needs --run LABEL=DIR or --est-endmembers");
  }
  if (!a.est_abundances.empty() && a.est_endmembers.empty()) {
    throw UsageError("--est-abundances requires --est-endmembers");
  }
  const Truth truth = load_truth(a.truth_endmembers, a.truth_abundances);
  std::optional<SpectralCube> cube;
  if (!a.cube.empty()) cube = io::read_cube(a.cube);

  std::vector<RunInput> inputs;
  for (const auto& spec : a.runs) {
    const std::size_t eq = spec.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size()) {
      throw UsageError("--run expects LABEL=DIR, got '" + spec + "'");
    }
    inputs.push_back(load_run_dir(spec.substr(0, eq), spec.substr(eq + 1)));
  }
  if (!a.est_endmembers.empty()) {
    inputs.push_back(RunInput{a.label, io::read_endmembers(a.est_endmembers),
                              a.est_abundances.empty()
                                  ? std::nullopt
                                  : std::optional(io::read_abundances(a.est_abundances))});
  }

  std::vector<RunEvaluation> evals;
  for (const auto& in : inputs) evals.push_back(evaluate_run(in, truth, cube ? &*cube : nullptr));
  write_evaluation(prepare_out(a.out), truth, evals);
}

// --- report ----------------------------------------------------------------

struct ReportArgs {
  std::string runs;
  std::string methods = "vca,nmf,nfindr";
  std::string truth_endmembers;
  std::string truth_abundances;
  bool include_pan = false;
  std::string out;
};

void cmd_report(const ReportArgs& a) {
  const std::vector<Method> methods = parse_method_list(a.methods);
  if (!a.truth_abundances.empty() && a.truth_endmembers.empty()) {
    throw UsageError("--truth-abundances requires --truth-endmembers");
  }
  std::optional<Truth> truth;
  if (!a.truth_endmembers.empty()) truth = load_truth(a.truth_endmembers, a.truth_abundances);

  std::string summary;
  std::vector<RunInput> present;
  for (Method m : methods) {
    const fs::path dir = fs::path(a.runs) / std::string(to_string(m));
    const bool found = fs::exists(dir / "endmembers.csv");
    summary += display_label(m) + ": " + (found ? "present" : "absent") + " (" + dir.string() + ")\n";
    if (found) present.push_back(load_run_dir(display_label(m), dir));
  }

  // Merged plot-ready spectra, truth first, estimates in truth order when a
  // truth set is available.
  std::optional<WavelengthAxis> axis;
  if (truth) axis = truth->endmembers.axis();
  for (const auto& r : present) {
    if (!axis) axis = r.endmembers.axis();
    if (!axis->matches(r.endmembers.axis())) {
      throw InvalidArgument(r.label + ": endmember axis differs from the other runs");
    }
  }
  std::vector<RunEvaluation> evals;
  if (truth) {
    for (const auto& r : present) evals.push_back(evaluate_run(r, *truth, nullptr));
  }

  const fs::path out = prepare_out(a.out);
  if (axis) {
    std::vector<std::string> names;
    std::vector<Vector> columns;
    if (truth) {
      for (std::size_t k = 0; k < truth->endmembers.count(); ++k) {
        names.push_back("truth:" + truth->endmembers.names()[k]);
        columns.push_back(truth->endmembers.signatures().col(static_cast<Eigen::Index>(k)));
      }
    }
    for (std::size_t r = 0; r < present.size(); ++r) {
      const EndmemberSet& e = present[r].endmembers;
      std::vector<std::size_t> order(e.count());
      std::vector<std::string> labels = e.names();
      for (std::size_t i = 0; i < e.count(); ++i) order[i] = i;
      if (truth) {
        for (std::size_t i = 0; i < e.count(); ++i) {
          order[evals[r].match.permutation[i]] = i;
          labels[evals[r].match.permutation[i]] = truth->endmembers.names()[evals[r].match.permutation[i]];
        }
      }
      for (std::size_t k = 0; k < e.count(); ++k) {
        names.push_back(present[r].label + ":" + labels[k]);
        columns.push_back(e.signatures().col(static_cast<Eigen::Index>(order[k])));
      }
    }
    Matrix values(static_cast<Eigen::Index>(axis->size()), static_cast<Eigen::Index>(columns.size()));
    for (std::size_t c = 0; c < columns.size(); ++c) values.col(static_cast<Eigen::Index>(c)) = columns[c];
    io::write_file_atomic(out / "spectra.csv",
                          io::format_spectra(*axis, names, values, a.include_pan));
  }
  if (truth && !evals.empty()) write_evaluation(out, *truth, evals);
  io::write_file_atomic(out / "summary.txt", summary);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multispectral band simulation, endmember extraction and abundance estimation"};
  app.name("msunmix");
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate_cmd = app.add_subcommand("generate", "Write a synthetic scene with ground truth");
  generate_cmd->add_option("--spec", gen.spec, "Scene spec file (key: value)")->required();
  generate_cmd->add_option("--out", gen.out, "Output directory")->required();

  SimulateArgs sim;
  auto* simulate_cmd = app.add_subcommand("simulate", "Simulate a multispectral cube");
  simulate_cmd->add_option("--cube", sim.cube, "Hyperspectral cube file")->required();
  simulate_cmd->add_option("--camera", sim.camera, "Camera sensitivity curve file")->required();
  simulate_cmd->add_option("--illumination", sim.illumination, "Single-column illumination curve file");
  simulate_cmd->add_option("--endmembers", sim.endmembers,
                           "Endmember file to simulate alongside the cube");
  simulate_cmd->add_flag("--normalize", sim.normalize, "Divide each channel by its integrated sensitivity");
  simulate_cmd->add_option("--out", sim.out, "Output directory")->required();

  UnmixArgs unmix;
  auto* unmix_cmd = app.add_subcommand("unmix", "Extract endmembers");
  unmix_cmd->add_option("--cube", unmix.cube, "Cube file")->required();
  unmix_cmd->add_option("--method", unmix.method, "vca, nfindr or nmf")
      ->required()
      ->check(CLI::IsMember({"vca", "nfindr", "nmf"}));
  unmix_cmd->add_option("--endmembers", unmix.p, "Number of endmembers")
      ->required()
      ->check(CLI::PositiveNumber);
  unmix_cmd->add_option("--seed", unmix.seed, "Random seed")->required();
  unmix_cmd->add_option("--max-iter", unmix.max_iter, "N-FINDR sweeps / NMF iterations")
      ->check(CLI::PositiveNumber);
  unmix_cmd->add_option("--tol", unmix.tol, "NMF relative decrease threshold")
      ->check(CLI::PositiveNumber);
  unmix_cmd->add_flag("--normalize-pixels", unmix.normalize_pixels, "L2-normalise pixels before extraction");
  unmix_cmd->add_flag("--include-pan", unmix.include_pan, "Keep panchromatic bands in spectra.csv");
  unmix_cmd->add_option("--out", unmix.out, "Output directory")->required();

  AbundanceArgs ab;
  auto* abundance_cmd = app.add_subcommand("abundance", "Estimate abundances for fixed endmembers");
  abundance_cmd->add_option("--cube", ab.cube, "Cube file")->required();
  abundance_cmd->add_option("--endmembers", ab.endmembers, "Endmember file")->required();
  abundance_cmd->add_flag("--no-sum-to-one", ab.no_sum_to_one, "Drop the sum-to-one constraint");
  abundance_cmd->add_option("--sto-weight", ab.sto_weight, "Weight of the sum-to-one row")
      ->check(CLI::PositiveNumber);
  abundance_cmd->add_option("--out", ab.out, "Output directory")->required();

  EvaluateArgs ev;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Compare estimates with ground truth");
  evaluate_cmd->add_option("--truth-endmembers", ev.truth_endmembers, "Ground-truth endmember file")
      ->required();
  evaluate_cmd->add_option("--truth-abundances", ev.truth_abundances, "Ground-truth abundance file");
  evaluate_cmd->add_option("--run", ev.runs, "LABEL=DIR with endmembers.csv [and abundances.csv]");
  evaluate_cmd->add_option("--est-endmembers", ev.est_endmembers, "Estimated endmember file");
  evaluate_cmd->add_option("--est-abundances", ev.est_abundances, "Estimated abundance file");
  evaluate_cmd->add_option("--label", ev.label, "Column label for --est-* inputs");
  evaluate_cmd->add_option("--cube", ev.cube, "Cube for reconstruction RMSE");
  evaluate_cmd->add_option("--out", ev.out, "Output directory")->required();

  ReportArgs rep;
  auto* report_cmd = app.add_subcommand("report", "Merge per-method runs into one comparison");
  report_cmd->add_option("--runs", rep.runs, "Directory holding one sub-directory per method")
      ->required();
  report_cmd->add_option("--methods", rep.methods, "Comma-separated method order");
  report_cmd->add_option("--truth-endmembers", rep.truth_endmembers, "Ground-truth endmember file");
  report_cmd->add_option("--truth-abundances", rep.truth_abundances, "Ground-truth abundance file");
  report_cmd->add_flag("--include-pan", rep.include_pan, "Keep panchromatic bands in spectra.csv");
  report_cmd->add_option("--out", rep.out, "Output directory")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kOk;
    }
    err << "msunmix: " << e.what() << " (run with --help for usage)\n";
    return kUsage;
  }

  try {
    if (*generate_cmd) cmd_generate(gen);
    else if (*simulate_cmd) cmd_simulate(sim);
    else if (*unmix_cmd) cmd_unmix(unmix);
    else if (*abundance_cmd) cmd_abundance(ab);
    else if (*evaluate_cmd) cmd_evaluate(ev);
    else if (*report_cmd) cmd_report(rep);
  } catch (const UsageError& e) {
    err << "msunmix: " << e.what() << "\n";
    return kUsage;
  } catch (const NumericalError& e) {
    err << "msunmix: numerical failure: " << e.what() << "\n";
    return kNumericalError;
  } catch (const std::exception& e) {
    err << "msunmix: error: " << e.what() << "\n";
    return kDataError;
  }
  return kOk;
}

}  // namespace msunmix::cli
