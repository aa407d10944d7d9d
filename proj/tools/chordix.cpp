// chordix: transfer integrals and signed chord statistics over body collections.
//
// Subcommands: measure, hist, transfer, verify.  Machine output (JSON or CSV)
// goes to --out or standard output; human-readable summaries go to the other
// stream so the machine output stays parseable.  Fixed seed + fixed flags give
// bit-identical output at any thread count.

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "chordix/estimators.hpp"
#include "chordix/scene.hpp"
#include "chordix/signed_hist.hpp"
#include "chordix/transfer.hpp"
#include "chordix/verify.hpp"

namespace {

using nlohmann::ordered_json;

struct CommonOpts {
  std::string scene_path;
  std::uint64_t samples = 1000000;
  std::size_t bins = 200;
  double l_max = 0.0;
  std::uint64_t seed = 42;
  int threads = 0;
  std::string pair;
  std::string out;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_samples = true) {
  cmd->add_option("scene", o.scene_path, "scene description (JSON)")->required();
  if (with_samples) {
    cmd->add_option("--samples", o.samples, "primary sampling events")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--bins", o.bins, "histogram bins")->check(CLI::Range(10, 1000000));
    cmd->add_option("--l-max", o.l_max, "histogram range (default: scene diameter + margin)");
    cmd->add_option("--threads", o.threads,
                    "worker threads (default: CHORDIX_THREADS or all cores)");
  }
  cmd->add_option("--seed", o.seed, "random seed");
  cmd->add_option("--out", o.out, "write machine output to this file instead of stdout");
}

int resolve_threads(int flag) {
  if (flag > 0) return flag;
  const char* env = std::getenv("CHORDIX_THREADS");
  if (env == nullptr || *env == '\0') return 0;
  int v = 0;
  const auto [p, ec] = std::from_chars(env, env + std::string_view(env).size(), v);
  if (ec != std::errc{} || *p != '\0' || v < 1)
    throw chordix::ParseError("CHORDIX_THREADS must be a positive integer, got '" +
                              std::string(env) + "'");
  return v;
}

chordix::EstimatorOptions estimator_opts(const CommonOpts& o) {
  chordix::EstimatorOptions opt;
  opt.samples = o.samples;
  opt.bins = o.bins;
  opt.l_max = o.l_max;
  opt.threads = resolve_threads(o.threads);
  return opt;
}

std::pair<std::size_t, std::size_t> parse_pair(const std::string& text, std::size_t n) {
  const auto comma = text.find(',');
  if (comma == std::string::npos)
    throw chordix::ParseError("--pair expects 'i,j', got '" + text + "'");
  std::size_t i = 0, j = 0;
  const char* b = text.data();
  auto r1 = std::from_chars(b, b + comma, i);
  auto r2 = std::from_chars(b + comma + 1, b + text.size(), j);
  if (r1.ec != std::errc{} || r1.ptr != b + comma || r2.ec != std::errc{} ||
      r2.ptr != b + text.size())
    throw chordix::ParseError("--pair expects 'i,j', got '" + text + "'");
  if (i >= n || j >= n)
    throw chordix::ParseError("--pair index out of range for " + std::to_string(n) +
                              " bodies");
  return {i, j};
}

/// Rounded to nine significant digits so identical runs print identically;
/// non-finite values become JSON null.
ordered_json jnum(double v) {
  if (!std::isfinite(v)) return nullptr;
  return std::stod(chordix::fmt9(v));
}

/// Stream for machine output: --out file, or stdout.
class OutStream {
 public:
  explicit OutStream(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw chordix::ParseError("cannot open output file '" + path + "'");
    }
  }
  std::ostream& os() { return file_.is_open() ? file_ : std::cout; }
  bool to_file() const { return file_.is_open(); }

 private:
  std::ofstream file_;
};

int cmd_measure(const CommonOpts& o) {
  const chordix::Scene scene = chordix::build_scene_file(o.scene_path);
  ordered_json doc;
  doc["bodies"] = ordered_json::array();
  for (std::size_t k = 0; k < scene.size(); ++k) {
    const chordix::Measures& m = scene.measures[k];
    ordered_json b;
    b["id"] = scene.ids[k];
    b["volume"] = jnum(m.volume);
    b["volume_stderr"] = jnum(m.volume_stderr);
    b["surface"] = jnum(m.surface);
    b["surface_stderr"] = jnum(m.surface_stderr);
    b["mass"] = jnum(m.mass);
    b["mass_stderr"] = jnum(m.mass_stderr);
    doc["bodies"].push_back(std::move(b));
  }
  doc["v_union"] = jnum(scene.v_union);
  doc["s_union"] = jnum(scene.s_union);
  doc["m_union"] = jnum(scene.m_union);
  doc["diameter"] = jnum(scene.diameter);

  OutStream out(o.out);
  out.os() << doc.dump(2) << "\n";

  std::ostream& log = out.to_file() ? std::cout : std::cerr;
  log << std::left << std::setw(16) << "body" << std::right << std::setw(14) << "volume"
      << std::setw(14) << "surface" << std::setw(14) << "mass" << "\n";
  for (std::size_t k = 0; k < scene.size(); ++k) {
    const chordix::Measures& m = scene.measures[k];
    log << std::left << std::setw(16) << scene.ids[k] << std::right << std::setw(14)
        << chordix::fmt9(m.volume) << std::setw(14) << chordix::fmt9(m.surface)
        << std::setw(14) << chordix::fmt9(m.mass) << "\n";
  }
  log << std::left << std::setw(16) << "union" << std::right << std::setw(14)
      << chordix::fmt9(scene.v_union) << std::setw(14) << chordix::fmt9(scene.s_union)
      << std::setw(14) << chordix::fmt9(scene.m_union) << "\n";
  return 0;
}

int cmd_hist(const CommonOpts& o, const std::string& kind) {
  const chordix::Scene scene = chordix::build_scene_file(o.scene_path);
  const chordix::EstimatorOptions opt = estimator_opts(o);
  const chordix::RandomStream rng(o.seed, 0);

  chordix::MatrixDensity matrix;
  if (kind == "eta") {
    matrix = chordix::estimate_eta(scene, opt, rng).matrix;
  } else if (kind == "gamma") {
    matrix = chordix::gamma_from_eta(chordix::estimate_eta(scene, opt, rng).matrix, scene);
  } else if (kind == "radii") {
    matrix = chordix::estimate_radii(scene, opt, rng).matrix;
  } else if (kind == "chords") {
    matrix = chordix::estimate_chords(scene, opt, rng).matrix;
  } else if (kind == "lambda") {
    matrix = chordix::lambda_from_mu(chordix::estimate_chords(scene, opt, rng).matrix, scene);
  } else {
    throw chordix::ParseError("unknown histogram kind '" + kind + "'");
  }

  OutStream out(o.out);
  if (!o.pair.empty()) {
    const auto [i, j] = parse_pair(o.pair, scene.size());
    chordix::write_csv(out.os(), matrix.cell(i, j), matrix.kind(), i, j, matrix.seed);
  } else {
    chordix::write_csv(out.os(), matrix);
  }
  std::ostream& log = out.to_file() ? std::cout : std::cerr;
  log << kind << ": " << matrix.n_events() << " events, " << matrix.bins() << " bins, l_max "
      << chordix::fmt9(matrix.l_max()) << "\n";
  return 0;
}

ordered_json transfer_row(const chordix::TransferResult& t) {
  ordered_json row;
  row["route"] = chordix::to_string(t.route);
  row["value"] = jnum(t.value);
  row["stderr"] = jnum(t.std_err);
  row["n_samples"] = t.n_samples;
  if (t.has_alt) {
    row["alt_value"] = jnum(t.alt_value);
    row["alt_stderr"] = jnum(t.alt_std_err);
  }
  if (!t.warning.empty()) row["warning"] = t.warning;
  return row;
}

int cmd_transfer(const CommonOpts& o, const std::string& kernel_spec,
                 const std::string& route_name) {
  const chordix::Scene scene = chordix::build_scene_file(o.scene_path);
  if (o.pair.empty()) throw chordix::ParseError("transfer requires --pair i,j");
  const auto [i, j] = parse_pair(o.pair, scene.size());
  const chordix::Kernel kernel = chordix::Kernel::parse(kernel_spec);
  const chordix::EstimatorOptions opt = estimator_opts(o);
  const chordix::RandomStream rng(o.seed, 0);

  std::vector<chordix::TransferResult> results;
  if (route_name == "all") {
    results = chordix::transfer_all_routes(scene, i, j, kernel, opt, rng);
  } else {
    // Route substreams match the positions transfer_all_routes gives them,
    // so a single-route run reproduces the corresponding row.
    const chordix::Route route = chordix::parse_route(route_name);
    switch (route) {
      case chordix::Route::Direct:
        results.push_back(
            chordix::transfer_direct(scene, i, j, kernel, opt, rng.substream(1)));
        break;
      case chordix::Route::Eta: {
        const chordix::EtaResult eta = chordix::estimate_eta(scene, opt, rng.substream(2));
        results.push_back(chordix::transfer_via_eta(scene, i, j, kernel, eta.matrix));
        break;
      }
      case chordix::Route::Gamma:
        results.push_back(chordix::transfer_via_gamma(scene, i, j, kernel));
        break;
      case chordix::Route::Radii:
        results.push_back(
            chordix::transfer_via_radii(scene, i, j, kernel, opt, rng.substream(3)));
        break;
      case chordix::Route::Chords:
        results.push_back(
            chordix::transfer_via_chords(scene, i, j, kernel, opt, rng.substream(4)));
        break;
      case chordix::Route::Lambda: {
        const chordix::ChordsResult ch = chordix::estimate_chords(scene, opt, rng.substream(4));
        const chordix::MatrixDensity lambda = chordix::lambda_from_mu(ch.matrix, scene);
        results.push_back(chordix::transfer_via_lambda(scene, i, j, kernel, lambda));
        break;
      }
    }
  }

  ordered_json doc;
  doc["pair"] = ordered_json::array({i, j});
  doc["kernel"] = kernel.name();
  doc["seed"] = o.seed;
  doc["routes"] = ordered_json::array();
  for (const chordix::TransferResult& t : results) doc["routes"].push_back(transfer_row(t));

  OutStream out(o.out);
  out.os() << doc.dump(2) << "\n";

  std::ostream& log = out.to_file() ? std::cout : std::cerr;
  log << std::left << std::setw(9) << "route" << std::right << std::setw(14) << "value"
      << std::setw(13) << "stderr" << std::setw(12) << "samples" << std::setw(10)
      << "wall_s" << "\n";
  for (const chordix::TransferResult& t : results) {
    log << std::left << std::setw(9) << chordix::to_string(t.route) << std::right
        << std::setw(14) << chordix::fmt9(t.value) << std::setw(13)
        << chordix::fmt9(t.std_err) << std::setw(12) << t.n_samples << std::setw(10)
        << std::setprecision(2) << std::fixed << t.wall_seconds << std::defaultfloat;
    if (!t.warning.empty()) log << "  ! " << t.warning;
    log << "\n";
  }
  return 0;
}

int cmd_verify(const CommonOpts& o, const std::string& suite) {
  const chordix::Scene scene = chordix::build_scene_file(o.scene_path);
  chordix::VerifyOptions vopt;
  vopt.samples = o.samples;
  vopt.bins = o.bins;
  vopt.threads = resolve_threads(o.threads);
  vopt.seed = o.seed;

  std::vector<chordix::VerificationReport> reports;
  if (suite == "identities" || suite == "all")
    reports.push_back(chordix::verify_identities(scene, vopt));
  if (suite == "oracles" || suite == "all")
    reports.push_back(chordix::verify_oracles(scene, vopt));
  if (reports.empty()) throw chordix::ParseError("unknown suite '" + suite + "'");

  ordered_json arr = ordered_json::array();
  bool ok = true;
  for (const chordix::VerificationReport& r : reports) {
    ok = ok && r.all_passed();
    const ordered_json part = ordered_json::parse(chordix::report_json(r));
    for (const auto& row : part) arr.push_back(row);
  }

  OutStream out(o.out);
  out.os() << arr.dump(2) << "\n";
  std::ostream& log = out.to_file() ? std::cout : std::cerr;
  for (const chordix::VerificationReport& r : reports) chordix::report_table(log, r);
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"transfer integrals and signed chord statistics over body collections"};
  app.require_subcommand(1);

  CommonOpts mo, ho, to, vo;
  std::string kind, kernel_spec = "ball", route = "all", suite = "all";

  CLI::App* measure = app.add_subcommand("measure", "body and union measures");
  add_common(measure, mo, false);

  CLI::App* hist = app.add_subcommand("hist", "estimate a distribution family as CSV");
  add_common(hist, ho);
  hist->add_option("--kind", kind, "eta | gamma | radii | chords | lambda")->required();
  hist->add_option("--pair", ho.pair, "restrict output to one cell: i,j");

  CLI::App* transfer = app.add_subcommand("transfer", "transfer integral between two bodies");
  add_common(transfer, to);
  transfer->add_option("--pair", to.pair, "source and target body: i,j")->required();
  transfer->add_option("--kernel", kernel_spec, "ball | const | exp:sigma=<s>");
  transfer->add_option("--route", route, "direct | eta | gamma | radii | chords | lambda | all");

  CLI::App* verify = app.add_subcommand("verify", "identity and oracle batteries");
  add_common(verify, vo);
  verify->add_option("--suite", suite, "identities | oracles | all");

  try {
    app.parse(argc, argv);
    if (measure->parsed()) return cmd_measure(mo);
    if (hist->parsed()) return cmd_hist(ho, kind);
    if (transfer->parsed()) return cmd_transfer(to, kernel_spec, route);
    if (verify->parsed()) return cmd_verify(vo, suite);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const chordix::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
