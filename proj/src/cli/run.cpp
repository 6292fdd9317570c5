#include "edrlab/cli.hpp"

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>
#include <variant>

#include <CLI11.hpp>
#include <json.hpp>

#include "edrlab/grid.hpp"
#include "edrlab/model_io.hpp"
#include "edrlab/povm.hpp"
#include "edrlab/unbiasing.hpp"

namespace edrlab::cli {

namespace {

using Value = std::variant<double, std::string, bool, long long>;

struct Column {
  std::string name;  // includes the unit tag, e.g. "epsilon[length]"
  Value value;
};
using Row = std::vector<Column>;

struct Table {
  std::vector<Row> rows;
  nlohmann::json summary = nlohmann::json::object();
};

std::string format_value(const Value& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        std::ostringstream os;
        os.imbue(std::locale::classic());
        if constexpr (std::is_same_v<T, double>) {
          os << std::setprecision(17) << x;
        } else if constexpr (std::is_same_v<T, bool>) {
          os << (x ? "true" : "false");
        } else {
          os << x;
        }
        return os.str();
      },
      v);
}

nlohmann::json to_json(const Value& v) {
  return std::visit([](const auto& x) { return nlohmann::json(x); }, v);
}

void write_table(const Table& t, Format format, const std::string& command, std::ostream& out) {
  if (format == Format::kJson) {
    nlohmann::json doc = nlohmann::json::object();
    doc["command"] = command;
    doc["rows"] = nlohmann::json::array();
    for (const auto& row : t.rows) {
      nlohmann::json r = nlohmann::json::object();
      for (const auto& c : row) r[c.name] = to_json(c.value);
      doc["rows"].push_back(std::move(r));
    }
    for (const auto& [k, v] : t.summary.items()) doc[k] = v;
    out << doc.dump(2) << '\n';
    return;
  }
  if (t.rows.empty()) return;
  const auto& head = t.rows.front();
  for (std::size_t i = 0; i < head.size(); ++i) out << (i ? "," : "") << head[i].name;
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_value(row[i].value);
    out << '\n';
  }
}

bool is_model_kind(const std::string& name) {
  try {
    const auto kind = parse_model_kind(name);
    return kind != ModelKind::kCustom;
  } catch (const Error&) {
    return false;
  }
}

QState object_state(const RunConfig& config, const ModelSpec& spec, const MeasurementProcess& proc) {
  if (!config.psi.empty()) {
    std::vector<double> nums;
    std::stringstream ss(config.psi);
    std::string item;
    bool numeric = true;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        nums.push_back(std::stod(item, &used));
        if (used != item.size()) numeric = false;
      } catch (const std::exception&) {
        numeric = false;
      }
    }
    if (numeric && nums.size() == 3) {
      GridSpec g = spec.grid_obj;
      if (g.n != proc.dims().object) throw Error(ErrorCode::kConfig, "--psi Gaussian needs the model's object grid");
      return gaussian_state(g, nums[0], nums[1], nums[2]);
    }
    std::ifstream in(config.psi);
    if (!in) throw Error(ErrorCode::kConfig, "--psi is neither x0,p0,sigma nor a readable state file");
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParse, std::string("state file is not valid JSON: ") + e.what());
    }
    QState s = state_from_json(doc, config.tol);
    if (s.dim() != proc.dims().object) throw Error(ErrorCode::kDimMismatch, "state file dimension mismatch");
    return s;
  }
  if (spec.kind == ModelKind::kCustom) {
    CVector flat = CVector::Ones(proc.dims().object);
    return QState::normalized(std::move(flat));
  }
  return gaussian_state(spec.grid_obj, 0.0, 0.0, spec.grid_obj.window() / 16.0);
}

MeasurementProcess build(const ModelSpec& spec, const Tolerances& tol) {
  if (spec.kind == ModelKind::kCustom) return load_custom(spec.custom_path, tol);
  MeasurementProcess proc = build_model(spec);
  return MeasurementProcess(proc.dims(), proc.probe_state(), proc.interaction(), proc.meter(), proc.measured(),
                            proc.disturbed(), proc.hbar(), tol);
}

MeterFunction resolve_function(const RunConfig& config, const MeasurementProcess& proc) {
  if (config.f == "solve") return solve_unbiased_f(proc).f_star;
  return MeterFunction::parse(config.f);
}

Row report_row(const EDRReport& r) {
  return {{"epsilon[length]", r.epsilon},
          {"delta[length]", r.delta},
          {"eta[momentum]", r.eta},
          {"epsilon_sq[length^2]", r.epsilon_sq},
          {"delta_sq[length^2]", r.delta_sq},
          {"eta_sq[momentum^2]", r.eta_sq},
          {"sigma_x[length]", r.sigma_x},
          {"sigma_p[momentum]", r.sigma_p},
          {"prod_eps_eta[action]", r.prod_eps_eta},
          {"prod_delta_eta[action]", r.prod_delta_eta},
          {"deficit[length]", r.unbiasedness_deficit},
          {"hbar_half[action]", r.hbar_half},
          {"h[action]", r.h}};
}

Table cmd_report(const RunConfig& config) {
  const auto spec = model_spec(config);
  const auto proc = build(spec, config.tol);
  const auto psi = object_state(config, spec, proc);
  const auto f = resolve_function(config, proc);
  Row row{{"model", std::string(model_kind_name(spec.kind))}, {"f", config.f}};
  for (auto& c : report_row(edr_report(proc, psi, f))) row.push_back(std::move(c));
  return Table{{std::move(row)}, {}};
}

Table cmd_sweep(const RunConfig& config) {
  if (config.sweep_points < 1) throw Error(ErrorCode::kConfig, "--points must be positive");
  std::string label;
  if (config.sweep_param == "lambda") {
    label = "lambda[dimensionless]";
  } else if (config.sweep_param == "probe-sigma") {
    label = "probe_sigma[length]";
  } else if (config.sweep_param == "probe-offset") {
    label = "probe_offset[length]";
  } else {
    throw Error(ErrorCode::kConfig, "--param must be lambda, probe-sigma or probe-offset");
  }

  std::vector<double> values(static_cast<std::size_t>(config.sweep_points));
  for (int i = 0; i < config.sweep_points; ++i) {
    const double t = config.sweep_points == 1 ? 0.0 : static_cast<double>(i) / (config.sweep_points - 1);
    values[static_cast<std::size_t>(i)] = config.sweep_from + t * (config.sweep_to - config.sweep_from);
  }

  std::vector<EDRReport> reports(values.size());
  std::vector<std::exception_ptr> failures(values.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < values.size(); i = next++) {
      try {
        RunConfig point = config;
        if (config.sweep_param == "lambda") point.lambda = values[i];
        if (config.sweep_param == "probe-sigma") point.probe_sigma = values[i];
        if (config.sweep_param == "probe-offset") point.probe_offset = values[i];
        const auto spec = model_spec(point);
        const auto proc = build(spec, point.tol);
        const auto psi = object_state(point, spec, proc);
        reports[i] = edr_report(proc, psi, resolve_function(point, proc));
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  const unsigned workers = std::min<unsigned>(thread_budget(), static_cast<unsigned>(values.size()));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : failures)
    if (e) std::rethrow_exception(e);

  Table table;
  for (std::size_t i = 0; i < values.size(); ++i) {
    Row row{{label, values[i]}};
    for (auto& c : report_row(reports[i])) row.push_back(std::move(c));
    table.rows.push_back(std::move(row));
  }
  return table;
}

Table cmd_povm(const RunConfig& config) {
  const auto spec = model_spec(config);
  const auto proc = build(spec, config.tol);
  const auto psi = object_state(config, spec, proc);
  const auto povm = extract_povm(proc);
  Table table;
  const auto probs = povm.probabilities(psi);
  for (std::size_t k = 0; k < povm.outcomes.size(); ++k) {
    const auto& o = povm.outcomes[k];
    table.rows.push_back({{"outcome[length]", o.value},
                          {"element_norm[dimensionless]", o.element.operator_norm()},
                          {"element_trace[dimensionless]", o.element.matrix().trace().real()},
                          {"probability[dimensionless]", probs[k]}});
  }
  table.summary["completeness_defect"] = povm.completeness_defect();
  table.summary["min_eigenvalue"] = povm.min_eigenvalue();
  return table;
}

Table cmd_born(const RunConfig& config) {
  const auto spec = model_spec(config);
  const auto proc = build(spec, config.tol);
  const auto b = born_check(proc);
  return Table{{{{"model", std::string(model_kind_name(spec.kind))},
                 {"max_deviation[dimensionless]", b.max_deviation},
                 {"is_born", b.is_born}}},
               {}};
}

Table cmd_search_f(const RunConfig& config) {
  const auto spec = model_spec(config);
  const auto proc = build(spec, config.tol);
  const auto psi = object_state(config, spec, proc);
  const auto sol = solve_unbiased_f(proc);
  const auto delta_star = delta(proc, psi, sol.f_star).value;
  const auto& table_f = std::get<MeterFunction::Tabulated>(sol.f_star.form());
  Table table;
  for (std::size_t k = 0; k < table_f.values.size(); ++k) {
    table.rows.push_back({{"cluster_value[length]", table_f.values[k]},
                          {"f_star[length]", table_f.images[k]},
                          {"residual[length]", sol.residual},
                          {"delta_at_f_star[length]", delta_star},
                          {"feasible", sol.feasible}});
  }
  table.summary["residual"] = sol.residual;
  table.summary["feasible"] = sol.feasible;
  table.summary["delta_at_f_star"] = delta_star;
  return table;
}

void print_line(std::ostream& out, const std::string& label, double value, const std::string& note = {}) {
  out << "  " << std::left << std::setw(26) << label << std::setprecision(10) << value;
  if (!note.empty()) out << "   " << note;
  out << '\n';
}

void print_report(std::ostream& out, const EDRReport& r) {
  print_line(out, "epsilon (error)", r.epsilon, "rms of X(t) - x(0)");
  print_line(out, "delta (resolution)", r.delta, "rms of f(X)(t) - x(t)");
  print_line(out, "eta (disturbance)", r.eta, "rms of p(t) - p(0)");
  print_line(out, "sigma_x(psi)", r.sigma_x);
  print_line(out, "sigma_p(psi)", r.sigma_p);
  print_line(out, "epsilon * eta", r.prod_eps_eta, "Heisenberg relation eps*eta ~ h (reported, not asserted)");
  print_line(out, "delta * eta", r.prod_delta_eta, "predictive relation delta*eta >= hbar/2 when unbiased");
  print_line(out, "unbiasedness deficit", r.unbiasedness_deficit, "||<xi|f(X)(t) - x(t)|xi>||");
  print_line(out, "hbar/2", r.hbar_half);
  print_line(out, "h = 2 pi hbar", r.h);
}

int cmd_demo(const RunConfig& config, std::ostream& out) {
  RunConfig demo = config;
  demo.psi.clear();
  demo.f = "identity";
  const std::string& name = config.demo_name;
  if (name == "swap") {
    demo.model = "swap";
    demo.grid_n = 32;
    demo.dx = 0.5;
    demo.probe_sigma = 1.0;
    demo.probe_offset = 1.0;
    demo.psi = "-1,0,1.5";
  } else if (name == "vonneumann") {
    demo.model = "vonneumann";
    demo.grid_n = 64;
    demo.dx = 0.4;
    demo.obj_dx = 1.0 / 32.0;
    demo.probe_sigma = 1.0;
    demo.probe_offset = 0.0;
    demo.lambda = 1.0;
  } else if (name == "identity") {
    demo.model = "identity";
    demo.grid_n = 16;
    demo.dx = 0.5;
    demo.probe_sigma = 1.0;
  } else if (name == "offset") {
    demo.model = "vonneumann";
    demo.grid_n = 16;
    demo.obj_n = 4;
    demo.dx = 1.0;
    demo.obj_dx = 1.0;
    demo.probe_sigma = 0.16;
    demo.probe_offset = 3.0;
  } else {
    throw Error(ErrorCode::kConfig, "unknown demo '" + name + "' (swap, vonneumann, identity, offset)");
  }

  const auto spec = model_spec(demo);
  const auto proc = build(spec, demo.tol);
  const auto psi = object_state(demo, spec, proc);
  const auto report = edr_report(proc, psi, MeterFunction::identity());
  const auto born = born_check(proc);

  out << "demo " << name << ": model " << model_kind_name(spec.kind) << ", object dim " << proc.dims().object
      << ", probe dim " << proc.dims().probe << ", hbar " << proc.hbar() << "\n";
  print_report(out, report);
  print_line(out, "Born max deviation", born.max_deviation, born.is_born ? "is_born = true" : "is_born = false");

  if (name == "swap") {
    out << "\n  The outcome distribution equals the Born distribution of x for every input state\n"
           "  (epsilon = 0, Born check passes), yet delta > 0: after the swap the object holds the\n"
           "  probe's old state, so the reading says nothing about the post-measurement position.\n";
  } else if (name == "vonneumann") {
    out << "\n  Impulsive position coupling with a minimal Gaussian probe: epsilon = delta = sigma_X,\n"
           "  eta = sigma_P, the deficit vanishes, and delta * eta sits at hbar/2.\n";
  } else if (name == "identity") {
    out << "\n  No coupling: nothing is disturbed (eta = 0) and nothing is learned; the POVM is a\n"
           "  multiple of the identity.\n";
  } else {
    const auto deficit = unbiasedness_deficit(proc);
    const auto sol = solve_unbiased_f(proc);
    print_line(out, "deficit with f = identity", deficit.norm, "equals the probe offset");
    print_line(out, "least-squares residual", sol.residual, sol.feasible ? "feasible" : "infeasible");
    out << "\n  Offset probe: the raw reading is biased by the probe offset; the least-squares\n"
           "  meter function f(m) = m - offset removes the bias on every reachable outcome.\n";
  }
  return kOk;
}

int dispatch(const RunConfig& config, std::ostream& out) {
  if (config.command == "demo") return cmd_demo(config, out);
  Table table;
  if (config.command == "report") {
    table = cmd_report(config);
  } else if (config.command == "sweep") {
    table = cmd_sweep(config);
  } else if (config.command == "povm") {
    table = cmd_povm(config);
  } else if (config.command == "born-check") {
    table = cmd_born(config);
  } else if (config.command == "search-f") {
    table = cmd_search_f(config);
  } else {
    throw Error(ErrorCode::kConfig, "unknown command '" + config.command + "'");
  }
  write_table(table, config.format, config.command, out);
  return kOk;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfig:
    case ErrorCode::kUndefinedFunction:
      return kConfigError;
    case ErrorCode::kParse:
    case ErrorCode::kDimMismatch:
    case ErrorCode::kNonUnitary:
    case ErrorCode::kNonHermitian:
    case ErrorCode::kUnnormalized:
      return kValidationError;
    case ErrorCode::kNumericalInconsistency:
      return 1;
  }
  return 1;
}

}  // namespace

unsigned thread_budget() {
  if (const char* env = std::getenv("EDRLAB_NUM_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

ModelSpec model_spec(const RunConfig& config) {
  ModelSpec spec;
  if (is_model_kind(config.model)) {
    spec.kind = parse_model_kind(config.model);
  } else {
    spec.kind = ModelKind::kCustom;
    spec.custom_path = config.model;
  }
  spec.grid_probe = GridSpec{config.grid_n, config.dx, config.hbar};
  // The von Neumann shift needs the object range well inside the probe
  // window, so its object grid defaults to a finer spacing.
  const double default_obj_dx = spec.kind == ModelKind::kVonNeumann ? config.dx / 8.0 : config.dx;
  spec.grid_obj = GridSpec{config.obj_n.value_or(config.grid_n), config.obj_dx.value_or(default_obj_dx), config.hbar};
  spec.coupling = config.lambda;
  spec.probe = GaussianParams{config.probe_offset, 0.0, config.probe_sigma};
  spec.seed = config.seed;
  return spec;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    if (config.out.empty()) return dispatch(config, out);
    std::ostringstream buffer;
    const int code = dispatch(config, buffer);
    std::ofstream file(config.out, std::ios::binary);
    if (!file) throw Error(ErrorCode::kConfig, "cannot write " + config.out);
    file << buffer.str();
    return code;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig config;
  CLI::App app{"edrlab: error, resolution and disturbance of indirect measurements"};
  app.require_subcommand(1);

  std::vector<std::string> tol_overrides;
  std::string format = "csv";
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--model", config.model, "vonneumann | swap | identity | haar | path to a process file");
    sub->add_option("--psi", config.psi, "object state: x0,p0,sigma (Gaussian) or a state file");
    sub->add_option("--hbar", config.hbar, "reduced Planck constant (h = 2 pi hbar)");
    sub->add_option("--grid-n", config.grid_n, "grid points (probe, and object unless --obj-n)");
    sub->add_option("--dx", config.dx, "probe grid spacing");
    sub->add_option("--obj-n", config.obj_n, "object grid points");
    sub->add_option("--obj-dx", config.obj_dx, "object grid spacing (default dx/8 for vonneumann, else dx)");
    sub->add_option("--lambda", config.lambda, "coupling strength");
    sub->add_option("--probe-sigma", config.probe_sigma, "probe position spread");
    sub->add_option("--probe-offset", config.probe_offset, "probe mean position");
    sub->add_option("--f", config.f, "meter function: identity | affine:a,b | poly:c0,c1,... | solve");
    sub->add_option("--seed", config.seed, "seed for random interactions");
    sub->add_option("--tol", tol_overrides, "tolerance override KEY=VAL (repeatable)");
    sub->add_option("--out", config.out, "output file (default stdout)");
    sub->add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  };

  auto* report = app.add_subcommand("report", "error/resolution/disturbance report");
  auto* sweep = app.add_subcommand("sweep", "single-parameter sweep, one row per point");
  auto* povm = app.add_subcommand("povm", "outcome values and POVM element norms");
  auto* born = app.add_subcommand("born-check", "compare the POVM with the spectral measure of x");
  auto* search = app.add_subcommand("search-f", "least-squares meter function for unbiasedness");
  auto* demo = app.add_subcommand("demo", "canned annotated reports");
  for (auto* sub : {report, sweep, povm, born, search, demo}) add_common(sub);
  sweep->add_option("--param", config.sweep_param, "lambda | probe-sigma | probe-offset")->required();
  sweep->add_option("--from", config.sweep_from, "first value")->required();
  sweep->add_option("--to", config.sweep_to, "last value")->required();
  sweep->add_option("--points", config.sweep_points, "number of points");
  demo->add_option("name", config.demo_name, "swap | vonneumann | identity | offset")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }

  for (auto* sub : {report, sweep, povm, born, search, demo}) {
    if (sub->parsed()) config.command = sub->get_name();
  }
  config.format = format == "json" ? Format::kJson : Format::kCsv;
  try {
    for (const auto& kv : tol_overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw Error(ErrorCode::kConfig, "--tol expects KEY=VAL");
      std::size_t used = 0;
      const std::string text = kv.substr(eq + 1);
      double v = 0.0;
      try {
        v = std::stod(text, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != text.size()) throw Error(ErrorCode::kConfig, "bad tolerance value in " + kv);
      config.tol.set(kv.substr(0, eq), v);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
  return run(config, out, err);
}

}  // namespace edrlab::cli
