#include "ldsim/cli.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ldsim/analytics.h"
#include "ldsim/distributions.h"
#include "ldsim/errors.h"
#include "ldsim/format.h"
#include "ldsim/inference.h"
#include "ldsim/limits.h"
#include "ldsim/parallel.h"
#include "ldsim/simulate.h"

namespace ldsim {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Output tables

using Cell = std::variant<int64_t, double, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  auto add(std::vector<Cell> row) -> void { rows.push_back(std::move(row)); }
};

auto cell_text(const Cell& c) -> std::string {
  if (auto i = std::get_if<int64_t>(&c)) { return std::to_string(*i); }
  if (auto d = std::get_if<double>(&c)) { return format_double(*d); }
  return std::get<std::string>(c);
}

auto cell_json(const Cell& c) -> json {
  if (auto i = std::get_if<int64_t>(&c)) { return *i; }
  if (auto d = std::get_if<double>(&c)) { return std::isfinite(*d) ? json(*d) : json(nullptr); }
  const auto& s = std::get<std::string>(c);
  return s.empty() ? json(nullptr) : json(s);
}

struct Run_context {
  uint64_t seed = 1;
  fs::path out_dir = ".";
  unsigned threads = 1;
  std::string format = "csv";
  std::ostream* out = nullptr;
};

auto open_output(const fs::path& path) -> std::ofstream {
  auto f = std::ofstream{path, std::ios::binary};
  if (!f) { throw Io_error{"cannot write " + path.string()}; }
  return f;
}

auto prepare_out_dir(const Run_context& ctx) -> void {
  auto ec = std::error_code{};
  fs::create_directories(ctx.out_dir, ec);
  if (ec || !fs::is_directory(ctx.out_dir)) { throw Io_error{"cannot create output directory " + ctx.out_dir.string()}; }
}

// Writes `stem`.csv or `stem`.json depending on --format; returns the path.
auto write_table(const Run_context& ctx, const std::string& stem, const Table& table) -> fs::path {
  auto path = ctx.out_dir / (stem + (ctx.format == "json" ? ".json" : ".csv"));
  auto f = open_output(path);
  if (ctx.format == "json") {
    auto rows = json::array();
    for (const auto& row : table.rows) {
      auto obj = json::object();
      for (auto k = size_t{0}; k != table.columns.size(); ++k) { obj[table.columns[k]] = cell_json(row[k]); }
      rows.push_back(std::move(obj));
    }
    f << rows.dump(1) << '\n';
  } else {
    for (auto k = size_t{0}; k != table.columns.size(); ++k) { f << (k ? "," : "") << table.columns[k]; }
    f << '\n';
    for (const auto& row : table.rows) {
      for (auto k = size_t{0}; k != row.size(); ++k) { f << (k ? "," : "") << cell_text(row[k]); }
      f << '\n';
    }
  }
  if (!f) { throw Io_error{"failed writing " + path.string()}; }
  return path;
}

auto write_json(const Run_context& ctx, const std::string& stem, const json& j) -> fs::path {
  auto path = ctx.out_dir / (stem + ".json");
  auto f = open_output(path);
  f << j.dump(1) << '\n';
  if (!f) { throw Io_error{"failed writing " + path.string()}; }
  return path;
}

// ---------------------------------------------------------------------------
// Argument helpers

// Counts are accepted in scientific notation (1e9).
auto to_count(double v, const char* name, int64_t min_value) -> int64_t {
  if (!std::isfinite(v) || v != std::floor(v) || v < static_cast<double>(min_value) || v > 9.2e18) {
    throw Config_error{std::string{"--"} + name + " must be an integer >= " + std::to_string(min_value)};
  }
  return static_cast<int64_t>(v);
}

auto parse_window(const std::string& text) -> Window {
  auto colon = text.find(':');
  if (colon == std::string::npos) { throw Config_error{"window must be written a:b"}; }
  try {
    auto w = Window{std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))};
    w.validate();
    return w;
  } catch (const std::logic_error&) {
    throw Config_error{"window must be written a:b with 0 < a < b <= 1, got " + text};
  }
}

auto parse_real_list(const std::string& text, const char* name) -> std::vector<double> {
  auto out = std::vector<double>{};
  auto in = std::stringstream{text};
  auto item = std::string{};
  while (std::getline(in, item, ',')) {
    try {
      size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) { throw std::invalid_argument{item}; }
    } catch (const std::logic_error&) {
      throw Config_error{std::string{"--"} + name + ": cannot parse `" + item + "`"};
    }
  }
  if (out.empty()) { throw Config_error{std::string{"--"} + name + " is empty"}; }
  return out;
}

auto grid_or_default(const std::string& text) -> std::vector<double> {
  auto grid = text.empty() ? log_grid() : parse_real_list(text, "grid");
  for (auto a : grid) {
    if (!(a > 0.0 && a < 1.0)) { throw Config_error{"grid values must lie strictly inside (0,1)"}; }
  }
  return grid;
}

auto read_json_file(const fs::path& path) -> json {
  auto in = std::ifstream{path};
  if (!in) { throw Io_error{"cannot open " + path.string()}; }
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Data_error{path.string() + ": " + e.what()};
  }
}

auto parse_genome_text(const std::string& text) -> Genome_diff {
  auto out = Genome_diff{};
  auto in = std::stringstream{text};
  auto item = std::string{};
  while (std::getline(in, item, ';')) {
    auto colon = item.find(':');
    if (colon == std::string::npos || colon + 2 != item.size()) {
      throw Data_error{"genotype entries are written site:nucleotide, got `" + item + "`"};
    }
    auto n = nucleotide_from_char(item[colon + 1]);
    if (!n) { throw Data_error{"unknown nucleotide in `" + item + "`"}; }
    out.push_back(Site_state{static_cast<Site_index>(std::stoul(item.substr(0, colon))), *n});
  }
  std::sort(out.begin(), out.end());
  return out;
}

auto load_rate_table(const fs::path& path, int64_t sites) -> Mutation_model {
  auto j = read_json_file(path);
  try {
    auto matrices = std::vector<Seq_matrix>{};
    for (const auto& m : j.at("matrices")) {
      auto matrix = Seq_matrix{};
      for (auto r = 0; r != k_num_nucleotides; ++r) {
        for (auto c = 0; c != k_num_nucleotides; ++c) { matrix[r][c] = m.at(r).at(c).get<double>(); }
      }
      matrices.push_back(matrix);
    }
    auto site_matrix = j.value("site_matrix", std::vector<uint32_t>{});
    auto reference = std::vector<Nucleotide>{};
    for (auto ch : j.value("reference", std::string{})) {
      auto n = nucleotide_from_char(ch);
      if (!n) { throw Data_error{path.string() + ": reference must use A,C,G,T"}; }
      reference.push_back(*n);
    }
    return Mutation_model::per_site(sites, std::move(matrices), std::move(site_matrix), std::move(reference));
  } catch (const json::exception& e) {
    throw Data_error{path.string() + ": " + e.what()};
  }
}

auto load_fitness(const fs::path& path) -> Fitness_model {
  auto j = read_json_file(path);
  try {
    auto root = Rates{j.at("root").at("division").get<double>(), j.at("root").at("death").get<double>()};
    auto selective = j.value("selective_sites", std::vector<Site_index>{});
    auto table = std::map<Selective_genotype, Rates>{};
    for (const auto& entry : j.value("table", json::array())) {
      table[parse_genome_text(entry.at("genotype").get<std::string>())] =
          Rates{entry.at("division").get<double>(), entry.at("death").get<double>()};
    }
    return Fitness_model{root, std::move(selective), std::move(table)};
  } catch (const json::exception& e) {
    throw Data_error{path.string() + ": " + e.what()};
  }
}

auto empirical_mass(std::span<const int64_t> sample, int64_t max_k) -> std::vector<double> {
  auto mass = std::vector<double>(static_cast<size_t>(max_k) + 1, 0.0);
  for (auto x : sample) {
    if (x <= max_k) { mass[static_cast<size_t>(x)] += 1.0; }
  }
  for (auto& m : mass) { m /= static_cast<double>(sample.size()); }
  return mass;
}

// Draws `count` values with one stream per draw so the result does not depend
// on the thread count.
template <typename Draw>
auto draw_replicates(const Run_context& ctx, int64_t count, Draw&& draw) -> std::vector<int64_t> {
  auto out = std::vector<int64_t>(static_cast<size_t>(count), 0);
  parallel_for(count, ctx.threads, [&](int64_t i) {
    auto rng = Rng::for_replicate(ctx.seed, static_cast<uint64_t>(i));
    out[static_cast<size_t>(i)] = draw(rng);
  });
  return out;
}

// ---------------------------------------------------------------------------
// simulate

struct Simulate_args {
  double n = 1000;
  double mu = 1e-3;
  std::string rates;
  double sites = 1;
  double birth = 1.0;
  double death = 0.0;
  std::string fitness;
  double replicates = 1;
  bool trees = false;
  std::string grid;
};

auto cmd_simulate(const Run_context& ctx, const Simulate_args& args) -> void {
  auto n = to_count(args.n, "n", 1);
  auto sites = to_count(args.sites, "sites", 1);
  auto replicates = to_count(args.replicates, "replicates", 1);
  auto grid = grid_or_default(args.grid);
  auto mutation = args.rates.empty() ? Mutation_model::uniform(sites, args.mu) : load_rate_table(args.rates, sites);
  auto fitness = args.fitness.empty() ? Fitness_model{Rates{args.birth, args.death}} : load_fitness(args.fitness);
  fitness.validate(sites);
  prepare_out_dir(ctx);

  auto options = Sim_options{.keep_tree = args.trees};
  auto b_table = Table{.columns = {"replicate", "site", "B", "B_hat", "events"}, .rows = {}};
  auto sfs_counts = std::map<int64_t, int64_t>{};
  auto attempts = std::map<int64_t, int64_t>{};
  auto tail_sums = std::vector<double>(grid.size(), 0.0);

  constexpr auto batch = int64_t{256};
  for (auto start = int64_t{0}; start < replicates; start += batch) {
    auto size = std::min(batch, replicates - start);
    auto results = std::vector<Sim_outcome>(static_cast<size_t>(size));
    parallel_for(size, ctx.threads, [&](int64_t i) {
      auto rng = Rng::for_replicate(ctx.seed, static_cast<uint64_t>(start + i));
      results[static_cast<size_t>(i)] = simulate_to_n(mutation, fitness, n, rng, options);
    });
    for (auto i = int64_t{0}; i != size; ++i) {
      const auto& r = results[static_cast<size_t>(i)];
      auto rep = start + i;
      for (auto s = int64_t{0}; s != sites; ++s) {
        b_table.add({rep, s, r.b[s], r.b_hat[s], r.events[s]});
        ++sfs_counts[r.b[s]];
      }
      ++attempts[r.attempts];
      auto tail = sfs_tail_curve(r, grid);
      for (auto k = size_t{0}; k != grid.size(); ++k) { tail_sums[k] += static_cast<double>(tail[k]); }
      if (r.tree) {
        auto f = open_output(ctx.out_dir / ("tree_" + std::to_string(rep) + ".csv"));
        write_tree_csv(*r.tree, mutation, f);
      }
    }
  }

  write_table(ctx, "b", b_table);
  auto sfs_table = Table{.columns = {"k", "count"}, .rows = {}};
  for (const auto& [k, c] : sfs_counts) { sfs_table.add({k, c}); }
  write_table(ctx, "sfs", sfs_table);

  auto uniform_mu = mutation.uniform_mu();
  auto pure_birth = fitness.is_pure_birth();
  auto tail_table = Table{.columns = {"a", "count", "theory_mean"}, .rows = {}};
  for (auto k = size_t{0}; k != grid.size(); ++k) {
    auto theory = Cell{std::string{}};
    if (uniform_mu && pure_birth) { theory = mean_sfs_tail(static_cast<double>(sites) * *uniform_mu, grid[k]); }
    tail_table.add({grid[k], tail_sums[k] / static_cast<double>(replicates), theory});
  }
  write_table(ctx, "tail", tail_table);

  auto hist = json::object();
  for (const auto& [a, c] : attempts) { hist[std::to_string(a)] = c; }
  auto summary = json{
      {"n", n},
      {"mu", uniform_mu ? json(*uniform_mu) : json(nullptr)},
      {"sites", sites},
      {"replicates", replicates},
      {"division_rate", fitness.root().division},
      {"death_rate", fitness.root().death},
      {"attempts_histogram", hist},
      {"seed", ctx.seed},
  };
  write_json(ctx, "summary", summary);
  *ctx.out << "simulated " << replicates << " replicate(s) of n=" << n << " into " << ctx.out_dir.string() << '\n';
}

// ---------------------------------------------------------------------------
// ld / genld

struct Ld_args {
  double c = 1.0;
  double m_max = 100;
  std::string z;
  double draws = 100000;
  double m = 100;
};

auto default_z_grid() -> std::string { return "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9"; }

auto cmd_ld_pmf(const Run_context& ctx, const Ld_args& args) -> void {
  auto pmf = ld_pmf(Ld_params{args.c}, to_count(args.m_max, "max", 0));
  auto table = Table{.columns = {"m", "pmf", "cdf"}, .rows = {}};
  auto cdf = 0.0;
  for (auto m = size_t{0}; m != pmf.size(); ++m) {
    cdf += pmf[m];
    table.add({static_cast<int64_t>(m), pmf[m], cdf});
  }
  prepare_out_dir(ctx);
  *ctx.out << write_table(ctx, "ld_pmf", table).string() << '\n';
}

auto cmd_ld_pgf(const Run_context& ctx, const Ld_args& args) -> void {
  auto table = Table{.columns = {"z", "pgf"}, .rows = {}};
  for (auto z : parse_real_list(args.z.empty() ? default_z_grid() : args.z, "z")) {
    table.add({z, ld_pgf(Ld_params{args.c}, z)});
  }
  prepare_out_dir(ctx);
  *ctx.out << write_table(ctx, "ld_pgf", table).string() << '\n';
}

auto cmd_ld_sample(const Run_context& ctx, const Ld_args& args) -> void {
  auto params = Ld_params{args.c};
  params.validate();
  auto draws = to_count(args.draws, "draws", 1);
  auto sample = draw_replicates(ctx, draws, [&](Rng& rng) { return sample_ld(params, rng); });
  auto max_k = to_count(args.m_max, "max", 0);
  auto empirical = empirical_mass(sample, max_k);
  auto exact = ld_pmf(params, max_k);
  auto table = Table{.columns = {"k", "empirical", "exact"}, .rows = {}};
  for (auto k = int64_t{0}; k <= max_k; ++k) { table.add({k, empirical[k], exact[k]}); }
  prepare_out_dir(ctx);
  write_table(ctx, "ld_sample", table);
  auto ks = ks_distance(sample, ld_pmf(params, *std::max_element(sample.begin(), sample.end())));
  write_json(ctx, "ld_sample_summary", json{{"c", args.c}, {"draws", draws}, {"ks", ks}, {"seed", ctx.seed}});
  *ctx.out << "ks " << format_double(ks) << '\n';
}

auto cmd_ld_tail(const Run_context& ctx, const Ld_args& args) -> void {
  auto params = Ld_params{args.c};
  auto m = to_count(args.m, "m", 1);
  auto pmf = ld_pmf(params, m - 1);
  auto below = 0.0;
  for (auto p : pmf) { below += p; }
  auto exact = std::max(0.0, 1.0 - below);
  auto table = Table{.columns = {"m", "exact_tail", "asymptote", "m_times_tail"}, .rows = {}};
  table.add({m, exact, ld_tail_asymptote(params, m), static_cast<double>(m) * exact});
  prepare_out_dir(ctx);
  *ctx.out << write_table(ctx, "ld_tail", table).string() << '\n';
}

struct Genld_args {
  double lambda = 1.0;
  double a = 1.0;
  double b = 0.0;
  double c = 1.0;
  double draws = 100000;
  double m_max = 100;
  std::optional<double> ld_c;
  std::string z;
};

auto cmd_genld_sample(const Run_context& ctx, const Genld_args& args) -> void {
  auto params = Gen_ld_params{args.lambda, args.a, args.b, args.c};
  params.validate();
  auto draws = to_count(args.draws, "draws", 1);
  auto sample = draw_replicates(ctx, draws, [&](Rng& rng) { return sample_gen_ld(params, rng); });
  auto max_k = to_count(args.m_max, "max", 0);
  auto empirical = empirical_mass(sample, max_k);
  auto reference = Ld_params{args.ld_c.value_or(args.c)};
  auto exact = ld_pmf(reference, max_k);
  auto ks = ks_distance(sample, ld_pmf(reference, *std::max_element(sample.begin(), sample.end())));
  auto table = Table{.columns = {"k", "empirical", "ld_exact", "ks_vs_ld"}, .rows = {}};
  for (auto k = int64_t{0}; k <= max_k; ++k) { table.add({k, empirical[k], exact[k], ks}); }
  prepare_out_dir(ctx);
  write_table(ctx, "genld_sample", table);
  write_json(ctx, "genld_sample_summary",
             json{{"lambda", args.lambda}, {"a", args.a}, {"b", args.b}, {"c", args.c}, {"draws", draws},
                  {"ld_c", reference.c}, {"ks_vs_ld", ks}, {"seed", ctx.seed}});
  *ctx.out << "ks_vs_ld " << format_double(ks) << '\n';
}

auto cmd_genld_pgf(const Run_context& ctx, const Genld_args& args) -> void {
  auto params = Gen_ld_params{args.lambda, args.a, args.b, args.c};
  auto table = Table{.columns = {"z", "pgf"}, .rows = {}};
  for (auto z : parse_real_list(args.z.empty() ? default_z_grid() : args.z, "z")) {
    table.add({z, gen_ld_pgf(params, z)});
  }
  prepare_out_dir(ctx);
  *ctx.out << write_table(ctx, "genld_pgf", table).string() << '\n';
}

// ---------------------------------------------------------------------------
// cox / conjecture

struct Cox_args {
  double eta = 1.0;
  double eps = 1e-4;
  double draws = 10;
  std::string grid;
  double alpha = 1.0;
  double beta = 0.0;
  double skeleton_n = 10000;
};

auto write_measure_outputs(const Run_context& ctx, const std::string& stem, const std::vector<Point_measure>& draws,
                           const std::vector<double>& grid, double eta) -> void {
  auto atoms = Table{.columns = {"draw", "location", "multiplicity"}, .rows = {}};
  for (auto d = size_t{0}; d != draws.size(); ++d) {
    for (const auto& a : draws[d].atoms) { atoms.add({static_cast<int64_t>(d), a.location, a.multiplicity}); }
  }
  write_table(ctx, stem + "_atoms", atoms);

  auto summary = Table{.columns = {"a", "mean_mass", "se", "theory_mean"}, .rows = {}};
  auto count = static_cast<double>(draws.size());
  for (auto a : grid) {
    auto sum = 0.0;
    auto sum_sq = 0.0;
    for (const auto& m : draws) {
      auto x = static_cast<double>(m.mass(a, 1.0));
      sum += x;
      sum_sq += x * x;
    }
    auto mean = sum / count;
    auto var = count > 1 ? (sum_sq - count * mean * mean) / (count - 1) : 0.0;
    summary.add({a, mean, std::sqrt(std::max(0.0, var) / count), mean_sfs_tail(eta, a)});
  }
  write_table(ctx, stem + "_tail", summary);
}

auto cmd_cox(const Run_context& ctx, const Cox_args& args) -> void {
  auto draws = to_count(args.draws, "draws", 1);
  auto grid = grid_or_default(args.grid);
  auto measures = std::vector<Point_measure>(static_cast<size_t>(draws));
  parallel_for(draws, ctx.threads, [&](int64_t i) {
    auto rng = Rng::for_replicate(ctx.seed, static_cast<uint64_t>(i));
    measures[static_cast<size_t>(i)] = sample_cox_sfs(args.eta, args.eps, rng);
  });
  prepare_out_dir(ctx);
  write_measure_outputs(ctx, "cox", measures, grid, args.eta);
  *ctx.out << "sampled " << draws << " Cox measure(s)\n";
}

auto cmd_conjecture(const Run_context& ctx, const Cox_args& args) -> void {
  auto draws = to_count(args.draws, "draws", 1);
  auto skeleton_n = to_count(args.skeleton_n, "skeleton-n", 1);
  auto grid = grid_or_default(args.grid);
  auto measures = std::vector<Point_measure>(static_cast<size_t>(draws));
  parallel_for(draws, ctx.threads, [&](int64_t i) {
    auto rng = Rng::for_replicate(ctx.seed, static_cast<uint64_t>(i));
    measures[static_cast<size_t>(i)] = sample_conjecture_sfs(args.alpha, args.beta, args.eta, skeleton_n, rng);
  });
  prepare_out_dir(ctx);
  write_measure_outputs(ctx, "conjecture", measures, grid, args.eta);
  write_json(ctx, "conjecture_summary",
             json{{"alpha", args.alpha}, {"beta", args.beta}, {"eta", args.eta}, {"skeleton_n", skeleton_n},
                  {"draws", draws}, {"seed", ctx.seed}});
  *ctx.out << "sampled " << draws << " conjecture measure(s) at skeleton_n=" << skeleton_n << '\n';
}

// ---------------------------------------------------------------------------
// isa

struct Isa_args {
  double n = 1e9;
  double mu = 1e-9;
  double sites = 3e9;
};

auto cmd_isa(const Run_context& ctx, const Isa_args& args) -> void {
  auto n = to_count(args.n, "n", 2);
  auto sites = to_count(args.sites, "sites", 1);
  auto p = isa_violation_prob(n, args.mu);
  auto expected = expected_isa_violations(n, args.mu, sites);
  prepare_out_dir(ctx);
  write_json(ctx, "isa", json{{"n", n}, {"mu", args.mu}, {"sites", sites}, {"p", p}, {"expected_violations", expected}});
  *ctx.out << "p " << format_double(p) << "\nexpected " << format_double(expected) << '\n';
}

// ---------------------------------------------------------------------------
// estimate

struct Estimate_args {
  std::string input;
  std::string fixture;
  double sites = 0;
  std::string window = "0.1:0.25";
  std::string per_nucleotide;
  double bootstrap = 0;
};

auto parse_nucleotide_sites(const std::string& text) -> std::map<Nucleotide, int64_t> {
  auto out = std::map<Nucleotide, int64_t>{};
  auto in = std::stringstream{text};
  auto item = std::string{};
  while (std::getline(in, item, ',')) {
    auto eq = item.find('=');
    auto n = eq == 1 ? nucleotide_from_char(item[0]) : std::nullopt;
    if (!n) { throw Config_error{"--per-nucleotide entries are written X=count, got `" + item + "`"}; }
    try {
      out[*n] = to_count(std::stod(item.substr(eq + 1)), "per-nucleotide", 1);
    } catch (const std::logic_error&) {
      throw Config_error{"--per-nucleotide: cannot parse `" + item + "`"};
    }
  }
  return out;
}

auto cmd_estimate(const Run_context& ctx, const Estimate_args& args) -> void {
  auto result = Estimate_result{};
  if (!args.fixture.empty()) {
    result = estimate_from_fixture(load_count_fixture(args.fixture));
  } else {
    if (args.input.empty()) { throw Config_error{"estimate needs --input or --fixture"}; }
    auto window = parse_window(args.window);
    auto sites = to_count(args.sites, "sites", 1);
    auto per = args.per_nucleotide.empty() ? std::nullopt
                                           : std::optional{parse_nucleotide_sites(args.per_nucleotide)};
    auto data = load_vaf(args.input, sites, per);
    result = per ? estimate_mu_by_nucleotide(data, window.lo, window.hi) : estimate_mu(data, window.lo, window.hi);
    if (args.bootstrap > 0) {
      auto rng = Rng::for_replicate(ctx.seed, 0);
      result.bootstrap_ci = bootstrap_ci(data, window, to_count(args.bootstrap, "bootstrap", 2), 0.95, rng);
    }
  }
  prepare_out_dir(ctx);
  auto j = to_json(result);
  if (result.bootstrap_ci) { j["bootstrap_note"] = "percentile bootstrap over records; extension beyond the point estimate"; }
  write_json(ctx, "estimate", j);
  *ctx.out << "mu_hat " << format_double(result.mu_hat) << '\n';
}

// ---------------------------------------------------------------------------
// compare

struct Compare_args {
  std::string input;
  double c = 2.0;
  double site = -1;
};

// Reads the B column of a simulate b.csv and measures its distance to LD(c).
auto cmd_compare(const Run_context& ctx, const Compare_args& args) -> void {
  auto in = std::ifstream{args.input};
  if (!in) { throw Io_error{"cannot open " + args.input}; }
  auto line = std::string{};
  if (!std::getline(in, line) || line.rfind("replicate,site,B", 0) != 0) {
    throw Data_error{args.input + ": expected a b.csv written by `simulate`", 1};
  }
  auto sample = std::vector<int64_t>{};
  auto line_no = long{1};
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) { continue; }
    auto fields = std::vector<std::string>{};
    auto ss = std::stringstream{line};
    auto item = std::string{};
    while (std::getline(ss, item, ',')) { fields.push_back(item); }
    if (fields.size() < 3) { throw Data_error{args.input + ": malformed row", line_no}; }
    try {
      if (args.site >= 0 && std::stoll(fields[1]) != static_cast<int64_t>(args.site)) { continue; }
      sample.push_back(std::stoll(fields[2]));
    } catch (const std::logic_error&) {
      throw Data_error{args.input + ": malformed row at line " + std::to_string(line_no), line_no};
    }
  }
  if (sample.empty()) { throw Data_error{args.input + ": no rows to compare"}; }
  auto params = Ld_params{args.c};
  auto max_k = *std::max_element(sample.begin(), sample.end());
  auto exact = ld_pmf(params, max_k);
  auto ks = ks_distance(sample, exact);
  auto empirical = empirical_mass(sample, max_k);
  auto table = Table{.columns = {"k", "empirical", "exact"}, .rows = {}};
  for (auto k = int64_t{0}; k <= max_k; ++k) { table.add({k, empirical[k], exact[k]}); }
  prepare_out_dir(ctx);
  write_table(ctx, "compare", table);
  write_json(ctx, "compare_summary", json{{"c", args.c}, {"samples", std::ssize(sample)}, {"ks", ks}});
  *ctx.out << "ks " << format_double(ks) << '\n';
}

auto exit_code_for(const std::exception& e) -> int {
  if (dynamic_cast<const Io_error*>(&e)) { return k_exit_io; }
  if (dynamic_cast<const Convergence_error*>(&e)) { return k_exit_convergence; }
  return k_exit_validation;
}

}  // namespace

auto run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) -> int {
  auto app = CLI::App{"Luria-Delbrück toolkit: simulate, query and estimate mutation frequencies", "ldsim"};
  app.require_subcommand(1);
  app.fallthrough();

  auto ctx = Run_context{};
  ctx.out = &out;
  ctx.threads = default_thread_count();
  auto out_dir = std::string{"."};
  app.add_option("--seed", ctx.seed, "master random seed");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--threads", ctx.threads, "worker threads (results do not depend on this)")
      ->check(CLI::PositiveNumber);
  app.add_option("--format", ctx.format, "format of tabular outputs")->check(CLI::IsMember({"csv", "json"}));

  auto sim = Simulate_args{};
  auto* simulate = app.add_subcommand("simulate", "forward-simulate the branching population to n cells");
  simulate->add_option("--n", sim.n, "population size at which to stop")->required();
  auto* mu_opt = simulate->add_option("--mu", sim.mu, "uniform per-site mutation probability per daughter");
  simulate->add_option("--rates", sim.rates, "JSON per-site mutation matrices")->excludes(mu_opt);
  simulate->add_option("--sites", sim.sites, "number of genetic sites");
  simulate->add_option("--birth", sim.birth, "division rate of the unmutated genotype");
  auto* death_opt = simulate->add_option("--death", sim.death, "death rate of the unmutated genotype");
  simulate->add_option("--fitness", sim.fitness, "JSON fitness model with selective sites")->excludes(death_opt);
  simulate->add_option("--replicates", sim.replicates, "independent runs");
  simulate->add_flag("--trees", sim.trees, "dump lineage trees as tree_<replicate>.csv");
  simulate->add_option("--grid", sim.grid, "comma-separated fractions for tail.csv");

  auto ld = Ld_args{};
  auto* ld_cmd = app.add_subcommand("ld", "Luria-Delbrück distribution queries");
  ld_cmd->require_subcommand(1);
  auto* ld_pmf_cmd = ld_cmd->add_subcommand("pmf", "exact mass function");
  auto* ld_pgf_cmd = ld_cmd->add_subcommand("pgf", "generating function");
  auto* ld_sample_cmd = ld_cmd->add_subcommand("sample", "draws compared with the exact law");
  auto* ld_tail_cmd = ld_cmd->add_subcommand("tail", "tail probability and its asymptote");
  for (auto* sub : {ld_pmf_cmd, ld_pgf_cmd, ld_sample_cmd, ld_tail_cmd}) {
    sub->add_option("--c", ld.c, "Poisson mean of the clone count")->required();
  }
  ld_pmf_cmd->add_option("--max", ld.m_max, "largest count");
  ld_pgf_cmd->add_option("--z", ld.z, "comma-separated evaluation points");
  ld_sample_cmd->add_option("--draws", ld.draws, "number of draws");
  ld_sample_cmd->add_option("--max", ld.m_max, "largest count tabulated");
  ld_tail_cmd->add_option("--m", ld.m, "tail threshold")->required();

  auto gl = Genld_args{};
  auto* genld = app.add_subcommand("genld", "generalised Luria-Delbrück distribution");
  genld->require_subcommand(1);
  auto* genld_sample_cmd = genld->add_subcommand("sample", "draws, with a KS column against LD");
  auto* genld_pgf_cmd = genld->add_subcommand("pgf", "closed-form pgf (a > b)");
  for (auto* sub : {genld_sample_cmd, genld_pgf_cmd}) {
    sub->add_option("--lambda", gl.lambda, "seeding-age rate")->required();
    sub->add_option("--a", gl.a, "clone birth rate")->required();
    sub->add_option("--b", gl.b, "clone death rate")->required();
    sub->add_option("--c", gl.c, "Poisson mean of the clone count")->required();
  }
  genld_sample_cmd->add_option("--draws", gl.draws, "number of draws");
  genld_sample_cmd->add_option("--max", gl.m_max, "largest count tabulated");
  genld_sample_cmd->add_option("--ld-c", gl.ld_c, "LD parameter for the KS column (default: c)");
  genld_pgf_cmd->add_option("--z", gl.z, "comma-separated evaluation points");

  auto cx = Cox_args{};
  auto* cox = app.add_subcommand("cox", "sample the limiting SFS at positive fractions");
  cox->add_option("--eta", cx.eta, "mean mutations per division across the genome")->required();
  cox->add_option("--eps", cx.eps, "pruning threshold on descendant fractions");
  cox->add_option("--draws", cx.draws, "number of measures");
  cox->add_option("--grid", cx.grid, "comma-separated fractions");

  auto cj = Cox_args{};
  auto* conjecture = app.add_subcommand("conjecture", "limit construction with cell death (heuristic)");
  conjecture->add_option("--alpha", cj.alpha, "division rate")->required();
  conjecture->add_option("--beta", cj.beta, "death rate")->required();
  conjecture->add_option("--eta", cj.eta, "mean mutations per division across the genome")->required();
  conjecture->add_option("--skeleton-n", cj.skeleton_n, "immortal cells at which to stop");
  conjecture->add_option("--draws", cj.draws, "number of measures");
  conjecture->add_option("--grid", cj.grid, "comma-separated fractions");

  auto is = Isa_args{};
  auto* isa = app.add_subcommand("isa", "infinite-sites violation audit");
  isa->add_option("--n", is.n, "population size")->required();
  isa->add_option("--mu", is.mu, "per-site mutation probability")->required();
  isa->add_option("--sites", is.sites, "number of sites")->required();

  auto es = Estimate_args{};
  auto* estimate = app.add_subcommand("estimate", "mutation-rate estimate from allele frequencies");
  estimate->add_option("--input", es.input, "CSV with a vaf column and optional ref column");
  estimate->add_option("--fixture", es.fixture, "JSON summary counts instead of raw frequencies");
  estimate->add_option("--sites", es.sites, "number of sites screened");
  estimate->add_option("--window", es.window, "frequency window a:b");
  estimate->add_option("--per-nucleotide", es.per_nucleotide, "site totals, e.g. A=1e8,C=5e7,G=5e7,T=1e8");
  estimate->add_option("--bootstrap", es.bootstrap, "percentile bootstrap resamples (0 disables)");

  auto cmp = Compare_args{};
  auto* compare = app.add_subcommand("compare", "KS distance of simulated counts to LD(c)");
  compare->add_option("--input", cmp.input, "b.csv written by simulate")->required();
  compare->add_option("--c", cmp.c, "LD parameter")->required();
  compare->add_option("--site", cmp.site, "restrict to one site index");

  try {
    auto reversed = std::vector<std::string>(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return k_exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return e.get_exit_code() == 0 ? k_exit_ok : k_exit_validation;
  }
  ctx.out_dir = out_dir;

  try {
    if (*simulate) { cmd_simulate(ctx, sim); }
    if (*ld_pmf_cmd) { cmd_ld_pmf(ctx, ld); }
    if (*ld_pgf_cmd) { cmd_ld_pgf(ctx, ld); }
    if (*ld_sample_cmd) { cmd_ld_sample(ctx, ld); }
    if (*ld_tail_cmd) { cmd_ld_tail(ctx, ld); }
    if (*genld_sample_cmd) { cmd_genld_sample(ctx, gl); }
    if (*genld_pgf_cmd) { cmd_genld_pgf(ctx, gl); }
    if (*cox) { cmd_cox(ctx, cx); }
    if (*conjecture) { cmd_conjecture(ctx, cj); }
    if (*isa) { cmd_isa(ctx, is); }
    if (*estimate) { cmd_estimate(ctx, es); }
    if (*compare) { cmd_compare(ctx, cmp); }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return k_exit_ok;
}

}  // namespace ldsim
