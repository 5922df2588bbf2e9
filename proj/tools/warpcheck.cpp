// warpcheck: run verification scenarios for warped-product Einstein metrics.

#include "warpcheck/catalog.hpp"
#include "warpcheck/scenario.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

using nlohmann::json;
using namespace warpcheck;

struct Globals {
  std::optional<std::string> tolerance;
  std::optional<std::string> mode;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  bool serial = false;
};

RunOptions to_options(const Globals& g) {
  RunOptions o;
  if (g.tolerance) o.tolerance = parse_number(json(*g.tolerance), "--tolerance");
  if (g.mode) o.mode = parse_mode(*g.mode);
  if (g.out) o.output = *g.out;
  o.seed = g.seed;
  o.exec = g.serial ? Execution::serial : Execution::parallel;
  return o;
}

template <class T>
void put(json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical checks for Einstein warped products with conformally flat bases"};
  app.set_version_flag("--version", std::string(library_version()));
  app.require_subcommand(1);

  Globals g;
  app.add_option("--tolerance", g.tolerance, "Residual tolerance (number or decimal string)");
  app.add_option("--mode", g.mode, "Derivative mode")->check(CLI::IsMember({"analytic", "fd"}));
  app.add_option("--out", g.out, "Write the report (or scan table) here instead of stdout");
  app.add_option("--seed", g.seed, "Grid seed");
  app.add_flag("--serial", g.serial, "Evaluate grid points on one thread");

  std::string verify_file;
  auto* verify = app.add_subcommand("verify", "Run a scenario file of any kind");
  verify->add_option("file", verify_file, "Scenario JSON")->required();

  std::string scan_file;
  auto* scan = app.add_subcommand("scan", "Tabulate admissible initial data over parameter ranges");
  scan->add_option("file", scan_file, "Scan scenario JSON")->required();

  auto* catalog = app.add_subcommand("catalog", "Check a named solution family");
  std::optional<std::string> name;
  std::optional<int> cn, cm, ckappa;
  std::optional<double> cG, cC, ctheta, cA;
  bool list = false;
  catalog->add_option("--name", name, "Family name (see --list)");
  catalog->add_option("--n", cn, "Base dimension");
  catalog->add_option("--m", cm, "Fiber dimension");
  catalog->add_option("--G", cG);
  catalog->add_option("--C", cC);
  catalog->add_option("--Theta", ctheta);
  catalog->add_option("--A", cA);
  catalog->add_option("--kappa", ckappa)->check(CLI::IsMember({-1, 1}));
  catalog->add_flag("--list", list, "Print family names and exit");

  auto* integrate = app.add_subcommand("integrate", "Integrate the reduced system and lift the result");
  double phi0 = 0, dphi0 = 0, G0 = 0, ilambda = 0, step = 1e-3;
  int in = 3, im = 2, ikappa = 1;
  std::vector<double> span;
  std::optional<std::string> csv;
  std::optional<double> monitor_bound;
  bool no_lift = false;
  integrate->add_option("--phi0", phi0)->required();
  integrate->add_option("--dphi0", dphi0)->required();
  integrate->add_option("--G0", G0)->required();
  integrate->add_option("--lambda", ilambda)->required();
  integrate->add_option("--kappa", ikappa)->check(CLI::IsMember({-1, 1}));
  integrate->add_option("--n", in);
  integrate->add_option("--m", im);
  integrate->add_option("--step", step);
  integrate->add_option("--span", span, "Start and end of the xi range")->expected(2)->required();
  integrate->add_option("--csv", csv, "Trajectory CSV path");
  integrate->add_option("--monitor-bound", monitor_bound);
  integrate->add_flag("--no-lift", no_lift, "Skip the lifted Einstein check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  try {
    RunOptions options = to_options(g);
    if (verify->parsed()) return run_file(verify_file, options, std::cout);
    if (scan->parsed()) {
      options.kind = "scan";
      return run_file(scan_file, options, std::cout);
    }
    if (catalog->parsed()) {
      if (list) {
        for (const auto& n : catalog_names()) std::cout << n << '\n';
        return kExitPass;
      }
      if (!name) {
        std::cerr << "catalog: --name is required (see --list)\n";
        return kExitError;
      }
      json s{{"kind", "catalog"}, {"name", *name}};
      put(s, "n", cn);
      put(s, "m", cm);
      put(s, "G", cG);
      put(s, "C", cC);
      put(s, "Theta", ctheta);
      put(s, "A", cA);
      put(s, "kappa", ckappa);
      return run_and_write(s, options, std::cout);
    }
    json s{{"kind", "integrate"}, {"phi0", phi0}, {"dphi0", dphi0}, {"G0", G0},
           {"lambda", ilambda}, {"kappa", ikappa}, {"n", in}, {"m", im},
           {"step", step}, {"span", span}, {"lift", !no_lift}};
    put(s, "monitor_bound", monitor_bound);
    if (csv) options.csv = *csv;
    return run_and_write(s, options, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "warpcheck: " << e.what() << '\n';
    return kExitError;
  }
}
