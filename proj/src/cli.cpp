#include "cocycle/cli.hpp"

#include <algorithm>
#include <cstdint>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "cocycle/compact.hpp"
#include "cocycle/radii.hpp"
#include "cocycle/report.hpp"
#include "cocycle/spec_file.hpp"

namespace cocycle::cli {

namespace {

class EnvelopeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string file;
  std::string direction;
  bool force = false;
  std::vector<double> orders{1.0};
  double order = 1.0;
  int depth = 8;
  int orbits = 6;
  std::vector<int> depths;
  std::vector<int> orbit_list;
  std::vector<double> epsilons;
  double alpha = 0.0;
  int max_period = 0;
  std::vector<int> ranks;
  int length = 0;
  std::vector<int> checkpoints;
  std::uint64_t seed = 0;
};

void check_envelope(const io::CocycleSpec& spec, int depth, int orbits, bool force) {
  if (force) return;
  const Envelope env;
  std::ostringstream msg;
  if (spec.alphabet > env.alphabet) msg << "alphabet " << spec.alphabet << " > " << env.alphabet << "; ";
  if (spec.dim > env.dim) msg << "dim " << spec.dim << " > " << env.dim << "; ";
  if (spec.window > env.window) msg << "window " << spec.window << " > " << env.window << "; ";
  if (depth > env.depth) msg << "depth " << depth << " > " << env.depth << "; ";
  if (orbits > env.orbits) msg << "orbit horizon " << orbits << " > " << env.orbits << "; ";
  if (!msg.str().empty()) throw EnvelopeError("input exceeds the desk-scale envelope (" + msg.str() + "pass --force)");
}

void require_positive(int value, const char* name) {
  if (value < 1) throw DomainError(std::string(name) + " must be >= 1");
}

std::string cmd_radii(const Options& o) {
  const auto spec = io::load_spec(o.file);
  require_positive(o.depth, "--depth");
  require_positive(o.orbits, "--orbits");
  check_envelope(spec, o.depth, o.orbits, o.force);
  const auto rows = brackets(spec.cocycle(), o.orders, o.depth, o.orbits);
  io::CsvTable table({"s", "lower", "lower_witness_cycle", "upper", "upper_witness_word", "gap", "depth", "K"});
  for (const auto& b : rows)
    table.row()
        .cell(b.s)
        .cell(b.lower)
        .cell(to_string(b.lower_witness.cycle))
        .cell(b.upper)
        .cell(to_string(b.upper_witness))
        .cell(b.gap)
        .cell(b.depth)
        .cell(b.horizon);
  return table.str();
}

std::string cmd_berger_wang(const Options& o) {
  const auto spec = io::load_spec(o.file);
  if (o.depths.empty() || o.orbit_list.empty()) throw DomainError("--depths and --orbits must be non-empty");
  const std::size_t count = std::max(o.depths.size(), o.orbit_list.size());
  auto pick = [count](const std::vector<int>& v, std::size_t i, const char* name) {
    if (v.size() == 1) return v.front();
    if (v.size() != count) throw DomainError(std::string(name) + " must have one entry or match the other list");
    return v[i];
  };
  std::vector<std::pair<int, int>> schedule;
  for (std::size_t i = 0; i < count; ++i) {
    const int n = pick(o.depths, i, "--depths");
    const int K = pick(o.orbit_list, i, "--orbits");
    require_positive(n, "--depths entries");
    require_positive(K, "--orbits entries");
    if (!schedule.empty() && (n < schedule.back().first || K < schedule.back().second))
      throw DomainError("(depth, orbits) pairs must be non-decreasing");
    check_envelope(spec, n, K, o.force);
    schedule.emplace_back(n, K);
  }
  const auto A = spec.cocycle();
  io::CsvTable table({"n", "K", "lower", "upper", "gap"});
  double previous_gap = 0, previous_upper = 0;
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const auto [n, K] = schedule[i];
    const auto b = bracket(A, o.order, n, K);
    if (i > 0 && b.gap > previous_gap + kSandwichTolerance * previous_upper) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "gap increased from " << previous_gap << " to " << b.gap << " at n=" << n << ", K=" << K;
      throw InvariantError(msg.str());
    }
    previous_gap = b.gap;
    previous_upper = b.upper;
    table.row().cell(n).cell(K).cell(b.lower).cell(b.upper).cell(b.gap);
  }
  return table.str();
}

std::string cmd_continuity(const Options& o) {
  const auto spec = io::load_spec(o.file);
  const auto dir = io::load_spec(o.direction);
  if (spec.alphabet != dir.alphabet || spec.transition != dir.transition || spec.dim != dir.dim ||
      spec.window != dir.window)
    throw InvalidInput("direction file must share alphabet, transition, dim and window with the cocycle file");
  require_positive(o.depth, "--depth");
  require_positive(o.orbits, "--orbits");
  check_envelope(spec, o.depth, o.orbits, o.force);
  const double alpha = o.alpha > 0 ? o.alpha : spec.alpha;
  const auto report = continuity_probe(spec.cocycle(), dir.cocycle(), alpha, o.order, o.depth, o.orbits, o.epsilons);
  io::CsvTable table({"eps", "lower", "upper", "midpoint", "drift", "holder_distance"});
  const auto& ref = report.reference;
  table.row().cell(0.0).cell(ref.lower).cell(ref.upper).cell(ref.midpoint()).cell(0.0).cell(0.0);
  for (const auto& r : report.rows)
    table.row()
        .cell(r.eps)
        .cell(r.bracket.lower)
        .cell(r.bracket.upper)
        .cell(r.bracket.midpoint())
        .cell(r.drift)
        .cell(r.holder_distance);
  return table.str();
}

std::string cmd_orbits(const Options& o) {
  const auto spec = io::load_spec(o.file);
  require_positive(o.max_period, "--max-period");
  check_envelope(spec, 1, o.max_period, o.force);
  for (double s : o.orders) require_positive_order(s);
  const auto A = spec.cocycle();

  struct Entry {
    PeriodicOrbit orbit;
    std::vector<double> rho;
    std::vector<double> per_step;
  };
  std::vector<Entry> entries;
  for (int k = 1; k <= o.max_period; ++k) {
    for_each_periodic_orbit(A.shift(), k, [&](const PeriodicOrbit& p) {
      const auto product = cycle_product(A, p);
      Entry e{p, {}, {}};
      for (double s : o.orders) {
        e.rho.push_back(rho_s(product, s));
        e.per_step.push_back(periodic_lower_contribution(A, p, s));
      }
      entries.push_back(std::move(e));
    });
  }
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.per_step.front() != b.per_step.front()) return a.per_step.front() > b.per_step.front();
    if (a.orbit.period() != b.orbit.period()) return a.orbit.period() < b.orbit.period();
    return a.orbit.cycle < b.orbit.cycle;
  });

  std::vector<std::string> header{"k", "cycle"};
  for (double s : o.orders) {
    header.push_back("rho_s=" + io::format_real(s));
    header.push_back("per_step_s=" + io::format_real(s));
  }
  io::CsvTable table(header);
  for (const auto& e : entries) {
    table.row().cell(e.orbit.period()).cell(to_string(e.orbit.cycle));
    for (std::size_t i = 0; i < o.orders.size(); ++i) table.cell(e.rho[i]).cell(e.per_step[i]);
  }
  return table.str();
}

std::string cmd_truncate(const Options& o) {
  const auto spec = io::load_spec(o.file);
  if (!spec.compact) throw io::SpecError("compact_model", "missing; truncate needs a compact model file");
  const auto rows = spectral_convergence(spec.compact->model, o.order, o.ranks);
  io::CsvTable table({"m", "rho_s", "error_bound"});
  for (const auto& r : rows) table.row().cell(r.rank).cell(r.rho).cell(r.error);
  return table.str();
}

std::string cmd_kingman(const Options& o) {
  const auto spec = io::load_spec(o.file);
  require_positive(o.length, "--length");
  check_envelope(spec, 1, 1, o.force);
  const auto A = spec.cocycle();
  const auto checkpoints = o.checkpoints.empty() ? std::vector<int>{o.length} : o.checkpoints;
  const auto trajectory =
      sample_trajectory(A.shift(), uniform_weights(A.shift()), o.length + A.window() - 1, o.seed);
  const auto points = kingman_estimate(A, trajectory, o.order, checkpoints);
  io::CsvTable table({"n", "average_log_volume"});
  for (const auto& p : points) table.row().cell(p.n).cell(p.value);
  return table.str();
}

std::string cmd_emit(const Options& o) { return io::emit_spec(io::load_spec(o.file)); }

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Certified brackets for s-joint spectral radii of window cocycles over subshifts of finite type",
               "cocycle"};
  app.require_subcommand(1);

  auto add_file = [&](CLI::App* sub) {
    sub->add_option("file", o.file, "cocycle JSON file")->required();
    sub->add_flag("--force", o.force, "allow inputs beyond the desk-scale envelope");
  };

  auto* radii = app.add_subcommand("radii", "bracket rho_hat_s for each requested s");
  add_file(radii);
  radii->add_option("--s", o.orders, "orders s")->delimiter(',');
  radii->add_option("--depth", o.depth, "word depth n for the upper bound");
  radii->add_option("--orbits", o.orbits, "maximal period K for the lower bound");

  auto* bw = app.add_subcommand("berger-wang", "gap table along increasing (depth, orbits)");
  add_file(bw);
  bw->add_option("--s", o.order, "order s");
  bw->add_option("--depths", o.depths, "depths n")->delimiter(',')->required();
  bw->add_option("--orbits", o.orbit_list, "orbit horizons K")->delimiter(',')->required();

  auto* cont = app.add_subcommand("continuity", "brackets along A + eps B");
  add_file(cont);
  cont->add_option("--direction", o.direction, "direction cocycle JSON file")->required();
  cont->add_option("--s", o.order, "order s");
  cont->add_option("--eps", o.epsilons, "strictly decreasing positive epsilons")->delimiter(',')->required();
  cont->add_option("--depth", o.depth, "word depth n");
  cont->add_option("--orbits", o.orbits, "orbit horizon K");
  cont->add_option("--alpha", o.alpha, "Hoelder exponent (default: the file's alpha)");

  auto* orbits = app.add_subcommand("orbits", "periodic orbits ranked by lower-bound contribution");
  add_file(orbits);
  orbits->add_option("--max-period", o.max_period, "maximal period K")->required();
  orbits->add_option("--s", o.orders, "orders s")->delimiter(',');

  auto* trunc = app.add_subcommand("truncate", "spectral data of finite sections of a compact model");
  add_file(trunc);
  trunc->add_option("--ranks", o.ranks, "increasing truncation ranks")->delimiter(',')->required();
  trunc->add_option("--s", o.order, "order s");

  auto* kingman = app.add_subcommand("kingman", "subadditive averages along a sampled Markov trajectory");
  add_file(kingman);
  kingman->add_option("--s", o.order, "order s");
  kingman->add_option("--length", o.length, "number of steps")->required();
  kingman->add_option("--checkpoints", o.checkpoints, "step counts to report")->delimiter(',');
  kingman->add_option("--seed", o.seed, "random seed")->required();

  auto* emit = app.add_subcommand("emit", "re-emit the file in canonical form");
  add_file(emit);

  std::vector<const char*> argv{"cocycle"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInvalidInput;
  }

  try {
    std::string result;
    if (radii->parsed()) result = cmd_radii(o);
    else if (bw->parsed()) result = cmd_berger_wang(o);
    else if (cont->parsed()) result = cmd_continuity(o);
    else if (orbits->parsed()) result = cmd_orbits(o);
    else if (trunc->parsed()) result = cmd_truncate(o);
    else if (kingman->parsed()) result = cmd_kingman(o);
    else if (emit->parsed()) result = cmd_emit(o);
    out << result;
    return kOk;
  } catch (const EnvelopeError& e) {
    err << "error: " << e.what() << "\n";
    return kEnvelopeExceeded;
  } catch (const InvariantError& e) {
    err << "invariant violation: " << e.what() << "\n";
    return kInvariantViolation;
  } catch (const ConsistencyError& e) {
    err << "invariant violation: " << e.what() << "\n";
    return kInvariantViolation;
  } catch (const NumericError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kInvariantViolation;
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace cocycle::cli
