#include "ldsim/inference.h"

#include <algorithm>
#include <cstdlib>
#include <cmath>
#include <fstream>
#include <istream>
#include <string>
#include <string_view>

#include "ldsim/errors.h"

namespace ldsim {

namespace {

auto trim(std::string_view s) -> std::string_view {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) { s.remove_prefix(1); }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) { s.remove_suffix(1); }
  return s;
}

auto split_csv(std::string_view line) -> std::vector<std::string_view> {
  auto fields = std::vector<std::string_view>{};
  while (true) {
    auto comma = line.find(',');
    fields.push_back(trim(line.substr(0, comma)));
    if (comma == std::string_view::npos) { break; }
    line.remove_prefix(comma + 1);
  }
  return fields;
}

auto parse_real(std::string_view text) -> std::optional<double> {
  // strtod accepts scientific notation such as 1e-3.
  auto buffer = std::string{text};
  if (buffer.empty()) { return std::nullopt; }
  char* end = nullptr;
  auto v = std::strtod(buffer.c_str(), &end);
  if (end != buffer.c_str() + buffer.size()) { return std::nullopt; }
  return v;
}

auto nucleotide_key(Nucleotide n) -> std::string { return std::string(1, to_char(n)); }

}  // namespace

auto Vaf_dataset::validate() const -> void {
  if (total_sites <= 0) { throw Config_error{"total number of sites must be positive"}; }
  for (const auto& r : records) {
    if (!(r.frequency >= 0.0 && r.frequency <= 1.0)) {
      throw Data_error{"frequency outside [0,1] at line " + std::to_string(r.line), r.line};
    }
  }
  if (per_nucleotide_sites) {
    auto sum = int64_t{0};
    for (const auto& [n, sites] : *per_nucleotide_sites) {
      if (sites <= 0) { throw Config_error{"per-nucleotide site totals must be positive"}; }
      sum += sites;
    }
    if (sum != total_sites) { throw Config_error{"per-nucleotide site totals must sum to the total site count"}; }
  }
}

auto parse_vaf(std::istream& in) -> std::vector<Vaf_record> {
  auto line = std::string{};
  auto line_no = long{0};
  auto vaf_col = std::optional<size_t>{};
  auto ref_col = std::optional<size_t>{};
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) { continue; }
    auto header = split_csv(line);
    for (auto k = size_t{0}; k != header.size(); ++k) {
      if (header[k] == "vaf") { vaf_col = k; }
      if (header[k] == "ref") { ref_col = k; }
    }
    break;
  }
  if (!vaf_col) { throw Data_error{"missing header with a `vaf` column", line_no}; }

  auto records = std::vector<Vaf_record>{};
  auto out_of_range = std::vector<long>{};
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) { continue; }
    auto fields = split_csv(line);
    if (fields.size() <= *vaf_col || (ref_col && fields.size() <= *ref_col)) {
      throw Data_error{"line " + std::to_string(line_no) + ": too few fields", line_no};
    }
    auto value = parse_real(fields[*vaf_col]);
    if (!value || std::isnan(*value)) {
      throw Data_error{"line " + std::to_string(line_no) + ": cannot parse frequency `" +
                           std::string{fields[*vaf_col]} + "`",
                       line_no};
    }
    auto record = Vaf_record{.frequency = *value, .reference = std::nullopt, .line = line_no};
    if (ref_col && !fields[*ref_col].empty()) {
      auto text = fields[*ref_col];
      auto n = text.size() == 1 ? nucleotide_from_char(text[0]) : std::nullopt;
      if (!n) {
        throw Data_error{"line " + std::to_string(line_no) + ": reference must be one of A,C,G,T", line_no};
      }
      record.reference = n;
    }
    if (!(record.frequency >= 0.0 && record.frequency <= 1.0)) { out_of_range.push_back(line_no); }
    records.push_back(record);
  }
  if (!out_of_range.empty()) {
    auto msg = std::string{"frequency outside [0,1] at line"};
    msg += out_of_range.size() > 1 ? "s" : "";
    for (auto k = size_t{0}; k != out_of_range.size(); ++k) {
      msg += (k == 0 ? " " : ", ") + std::to_string(out_of_range[k]);
    }
    throw Data_error{msg, out_of_range.front()};
  }
  return records;
}

auto load_vaf(const std::filesystem::path& path, int64_t total_sites,
              std::optional<std::map<Nucleotide, int64_t>> per_nucleotide_sites) -> Vaf_dataset {
  auto in = std::ifstream{path};
  if (!in) { throw Io_error{"cannot open " + path.string()}; }
  auto data = Vaf_dataset{.records = parse_vaf(in),
                          .total_sites = total_sites,
                          .per_nucleotide_sites = std::move(per_nucleotide_sites)};
  data.validate();
  return data;
}

auto Window::validate() const -> void {
  if (!(lo > 0.0 && lo < hi && hi <= 1.0)) {
    throw Domain_error{"window must satisfy 0 < a < b <= 1"};
  }
}

auto count_in_range(const Vaf_dataset& data, double lo, double hi) -> int64_t {
  Window{lo, hi}.validate();
  return std::count_if(data.records.begin(), data.records.end(),
                       [&](const Vaf_record& r) { return r.frequency > lo && r.frequency < hi; });
}

auto estimate_from_count(int64_t count, int64_t sites, const Window& window) -> double {
  window.validate();
  if (sites <= 0) { throw Config_error{"total number of sites must be positive"}; }
  return static_cast<double>(count) / (static_cast<double>(sites) * window.width());
}

auto estimate_mu(const Vaf_dataset& data, double lo, double hi) -> Estimate_result {
  auto window = Window{lo, hi};
  auto count = count_in_range(data, lo, hi);
  return Estimate_result{.mu_hat = estimate_from_count(count, data.total_sites, window),
                         .window = window,
                         .count = count,
                         .total_sites = data.total_sites,
                         .per_nucleotide = std::nullopt,
                         .per_nucleotide_count = std::nullopt,
                         .bootstrap_ci = std::nullopt};
}

auto estimate_mu_by_nucleotide(const Vaf_dataset& data, double lo, double hi) -> Estimate_result {
  if (!data.per_nucleotide_sites) { throw Config_error{"per-nucleotide site totals are required"}; }
  auto result = estimate_mu(data, lo, hi);
  auto counts = std::map<Nucleotide, int64_t>{};
  for (auto n : k_nucleotides) {
    if (data.per_nucleotide_sites->contains(n)) { counts[n] = 0; }
  }
  for (const auto& r : data.records) {
    if (!(r.frequency > lo && r.frequency < hi)) { continue; }
    if (!r.reference) {
      throw Data_error{"line " + std::to_string(r.line) + ": in-window record has no reference nucleotide", r.line};
    }
    if (!counts.contains(*r.reference)) {
      throw Config_error{std::string{"no site total supplied for nucleotide "} + to_char(*r.reference)};
    }
    ++counts[*r.reference];
  }
  auto estimates = std::map<Nucleotide, double>{};
  for (const auto& [n, count] : counts) {
    estimates[n] = estimate_from_count(count, data.per_nucleotide_sites->at(n), result.window);
  }
  result.per_nucleotide = std::move(estimates);
  result.per_nucleotide_count = std::move(counts);
  return result;
}

auto bootstrap_ci(const Vaf_dataset& data, const Window& window, int64_t resamples, double level, Rng& rng)
    -> std::pair<double, double> {
  window.validate();
  if (resamples < 2) { throw Domain_error{"bootstrap needs at least two resamples"}; }
  if (!(level > 0.0 && level < 1.0)) { throw Domain_error{"confidence level must lie in (0,1)"}; }
  auto size = data.records.size();
  if (size == 0) { return {0.0, 0.0}; }
  auto estimates = std::vector<double>{};
  estimates.reserve(static_cast<size_t>(resamples));
  for (auto k = int64_t{0}; k != resamples; ++k) {
    auto count = int64_t{0};
    for (auto d = size_t{0}; d != size; ++d) {
      auto f = data.records[rng.uniform_index(size)].frequency;
      if (f > window.lo && f < window.hi) { ++count; }
    }
    estimates.push_back(estimate_from_count(count, data.total_sites, window));
  }
  std::sort(estimates.begin(), estimates.end());
  auto at = [&](double q) {
    auto pos = q * static_cast<double>(estimates.size() - 1);
    auto lo = static_cast<size_t>(std::floor(pos));
    auto hi = std::min(lo + 1, estimates.size() - 1);
    return estimates[lo] + (pos - static_cast<double>(lo)) * (estimates[hi] - estimates[lo]);
  };
  auto tail = (1.0 - level) / 2.0;
  return {at(tail), at(1.0 - tail)};
}

auto to_json(const Estimate_result& result) -> nlohmann::json {
  auto j = nlohmann::json{
      {"mu_hat", result.mu_hat},
      {"window", {result.window.lo, result.window.hi}},
      {"count", result.count},
      {"total_sites", result.total_sites},
  };
  if (result.per_nucleotide) {
    auto per = nlohmann::json::object();
    for (const auto& [n, v] : *result.per_nucleotide) { per[nucleotide_key(n)] = v; }
    j["per_nucleotide"] = per;
  }
  if (result.bootstrap_ci) {
    j["bootstrap_ci"] = {result.bootstrap_ci->first, result.bootstrap_ci->second};
  }
  return j;
}

auto load_count_fixture(const std::filesystem::path& path) -> Count_fixture {
  auto in = std::ifstream{path};
  if (!in) { throw Io_error{"cannot open " + path.string()}; }
  auto j = nlohmann::json{};
  try {
    in >> j;
    auto fixture = Count_fixture{};
    auto window = j.at("window");
    fixture.window = Window{window.at(0).get<double>(), window.at(1).get<double>()};
    fixture.count = j.at("count").get<int64_t>();
    fixture.total_sites = j.at("total_sites").get<int64_t>();
    for (const auto& [key, entry] : j.at("per_nucleotide").items()) {
      auto n = key.size() == 1 ? nucleotide_from_char(key[0]) : std::nullopt;
      if (!n) { throw Data_error{"fixture: unknown nucleotide key `" + key + "`"}; }
      fixture.per_nucleotide_count[*n] = entry.at("count").get<int64_t>();
      fixture.per_nucleotide_sites[*n] = entry.at("sites").get<int64_t>();
    }
    return fixture;
  } catch (const nlohmann::json::exception& e) {
    throw Data_error{"fixture " + path.string() + ": " + e.what()};
  }
}

auto estimate_from_fixture(const Count_fixture& fixture) -> Estimate_result {
  auto result = Estimate_result{.mu_hat = estimate_from_count(fixture.count, fixture.total_sites, fixture.window),
                                .window = fixture.window,
                                .count = fixture.count,
                                .total_sites = fixture.total_sites,
                                .per_nucleotide = std::nullopt,
                                .per_nucleotide_count = std::nullopt,
                                .bootstrap_ci = std::nullopt};
  if (!fixture.per_nucleotide_count.empty()) {
    auto estimates = std::map<Nucleotide, double>{};
    for (const auto& [n, count] : fixture.per_nucleotide_count) {
      estimates[n] = estimate_from_count(count, fixture.per_nucleotide_sites.at(n), fixture.window);
    }
    result.per_nucleotide = std::move(estimates);
    result.per_nucleotide_count = fixture.per_nucleotide_count;
  }
  return result;
}

auto diploid_frequencies(const Sim_outcome& outcome, std::span<const Site_pair> pairing) -> std::vector<double> {
  auto sites = std::ssize(outcome.b);
  auto used = std::vector<bool>(static_cast<size_t>(sites), false);
  auto out = std::vector<double>{};
  out.reserve(pairing.size());
  auto copies = 2.0 * static_cast<double>(outcome.n);
  for (const auto& [first, second] : pairing) {
    for (auto s : {first, second}) {
      if (static_cast<int64_t>(s) >= sites) { throw Config_error{"pairing refers to a site out of range"}; }
      if (used[s]) { throw Config_error{"pairing uses site " + std::to_string(s) + " twice"}; }
      used[s] = true;
    }
    out.push_back(static_cast<double>(outcome.b[first] + outcome.b[second]) / copies);
  }
  return out;
}

auto adjacent_pairing(int64_t positions) -> std::vector<Site_pair> {
  auto out = std::vector<Site_pair>{};
  out.reserve(static_cast<size_t>(positions));
  for (auto j = int64_t{0}; j != positions; ++j) {
    out.emplace_back(static_cast<Site_index>(2 * j), static_cast<Site_index>(2 * j + 1));
  }
  return out;
}

}  // namespace ldsim
