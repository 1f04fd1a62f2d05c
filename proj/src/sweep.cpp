#include "nhstark/sweep.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <future>
#include <limits>
#include <sstream>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "nhstark/asymptotics.hpp"
#include "nhstark/error.hpp"
#include "nhstark/spectral.hpp"

namespace nhstark {

using nlohmann::json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// names

const char* to_string(Command command) {
  switch (command) {
    case Command::SkinFactor: return "skin-factor";
    case Command::Classify: return "classify";
    case Command::LocalizationMap: return "localization-map";
    case Command::Entanglement: return "entanglement";
    case Command::Spectrum: return "spectrum";
  }
  return "unknown";
}

Command parse_command(std::string_view name) {
  for (Command c : {Command::SkinFactor, Command::Classify, Command::LocalizationMap,
                    Command::Entanglement, Command::Spectrum}) {
    if (name == to_string(c)) {
      return c;
    }
  }
  throw Error(ErrorCode::Config, fmt::format("unknown command '{}'", name));
}

const char* to_string(Figure figure) {
  switch (figure) {
    case Figure::Fig1: return "fig1";
    case Figure::Fig2: return "fig2";
    case Figure::Fig3: return "fig3";
  }
  return "unknown";
}

Figure parse_figure(std::string_view name) {
  for (Figure f : {Figure::Fig1, Figure::Fig2, Figure::Fig3}) {
    if (name == to_string(f)) {
      return f;
    }
  }
  throw Error(ErrorCode::Config, fmt::format("unknown figure '{}' (expected fig1, fig2 or fig3)", name));
}

std::string format_label(double value) { return fmt::format("{}", value); }

SiteWindow RunConfig::resolved_fit_window() const {
  return fit_window.value_or(SiteWindow{10, params.sites - 10});
}

SiteWindow RunConfig::resolved_increment_window() const {
  return increment_window.value_or(SiteWindow{params.sites / 2, params.sites - 1});
}

// ---------------------------------------------------------------------------
// key = value configuration

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

struct LineContext {
  std::string_view source;
  int line;
  std::string_view key;

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::Config, fmt::format("{}:{}: key '{}': {}", source, line, key, what));
  }
};

double parse_double(std::string_view text, const LineContext& ctx) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty() || !std::isfinite(v)) {
    ctx.fail(fmt::format("cannot parse '{}' as a number", text));
  }
  return v;
}

int parse_int(std::string_view text, const LineContext& ctx) {
  int v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty()) {
    ctx.fail(fmt::format("cannot parse '{}' as an integer", text));
  }
  return v;
}

std::vector<double> parse_list(std::string_view text, const LineContext& ctx) {
  std::vector<double> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const auto item = trim(text.substr(0, comma));
    if (item.empty()) {
      ctx.fail("empty list item");
    }
    out.push_back(parse_double(item, ctx));
    if (comma == std::string_view::npos) {
      break;
    }
    text = text.substr(comma + 1);
  }
  return out;
}

SiteWindow& window_slot(std::optional<SiteWindow>& slot, const SiteWindow& fallback) {
  if (!slot) {
    slot = fallback;
  }
  return *slot;
}

void apply_entry(RunConfig& c, std::string_view key, std::string_view value,
                 const LineContext& ctx) {
  auto& p = c.params;
  if (key == "N") p.sites = parse_int(value, ctx);
  else if (key == "J") p.offset = parse_double(value, ctx);
  else if (key == "gamma") p.nonreciprocity = parse_double(value, ctx);
  else if (key == "F1") p.stark_slope = parse_double(value, ctx);
  else if (key == "F2") p.hopping_slope = parse_double(value, ctx);
  else if (key == "max_sites") c.max_sites = parse_int(value, ctx);
  else if (key == "tolerance") c.tolerance = parse_double(value, ctx);
  else if (key == "fraction") c.fraction = parse_double(value, ctx);
  else if (key == "fit_first") window_slot(c.fit_window, c.resolved_fit_window()).first = parse_int(value, ctx);
  else if (key == "fit_last") window_slot(c.fit_window, c.resolved_fit_window()).last = parse_int(value, ctx);
  else if (key == "increment_first") window_slot(c.increment_window, c.resolved_increment_window()).first = parse_int(value, ctx);
  else if (key == "increment_last") window_slot(c.increment_window, c.resolved_increment_window()).last = parse_int(value, ctx);
  else if (key == "gamma_min") c.gamma_grid.first = parse_double(value, ctx);
  else if (key == "gamma_max") c.gamma_grid.last = parse_double(value, ctx);
  else if (key == "gamma_count") c.gamma_grid.count = parse_int(value, ctx);
  else if (key == "gamma_extra") c.gamma_grid.extras = parse_list(value, ctx);
  else if (key == "ratio_min") c.ratio_grid.first = parse_double(value, ctx);
  else if (key == "ratio_max") c.ratio_grid.last = parse_double(value, ctx);
  else if (key == "ratio_count") c.ratio_grid.count = parse_int(value, ctx);
  else if (key == "ratio_extra") c.ratio_grid.extras = parse_list(value, ctx);
  else if (key == "cuts") c.cuts = parse_list(value, ctx);
  else if (key == "ratios") c.ratios = parse_list(value, ctx);
  else if (key == "t_max") c.dynamics.t_max = parse_double(value, ctx);
  else if (key == "dt") c.dynamics.dt = parse_double(value, ctx);
  else if (key == "restabilize_every") c.dynamics.restabilize_every = parse_int(value, ctx);
  else if (key == "output_dir") c.output_dir = std::string(value);
  else throw Error(ErrorCode::Config, fmt::format("{}:{}: unknown key '{}'", ctx.source, ctx.line, key));
}

}  // namespace

void apply_config_text(RunConfig& config, std::string_view text, std::string_view source) {
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::Config,
                  fmt::format("{}:{}: expected 'key = value', got '{}'", source, line_no, line));
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    apply_entry(config, key, value, LineContext{source, line_no, key});
  }
}

void apply_config_file(RunConfig& config, const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::Io, fmt::format("cannot open config file '{}'", path.string()));
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  apply_config_text(config, buffer.str(), path.string());
}

namespace {

void validate_window(const SiteWindow& w, int upper, const char* name) {
  if (w.first < 1 || w.last > upper || w.size() < 2) {
    throw Error(ErrorCode::Config,
                fmt::format("{} [{}, {}] must lie in [1, {}] with at least 2 points", name,
                            w.first, w.last, upper));
  }
}

void validate_grid(const GridSpec& g, const char* name) {
  if (g.count < 1) {
    throw Error(ErrorCode::Config, fmt::format("{} grid is empty (count = {})", name, g.count));
  }
  if (g.count > 1 && !(g.last > g.first)) {
    throw Error(ErrorCode::Config, fmt::format("{} grid needs max > min", name));
  }
}

void require_gauge(const ChainParams& p) {
  require_graded(p);
  const auto bonds = detect_decoupling_bonds(p);
  if (!bonds.empty()) {
    throw Error(ErrorCode::DecoupledChain,
                fmt::format("bond {} has t^L t^R <= 0; the real gauge is undefined", bonds.front()));
  }
}

}  // namespace

void validate(const RunConfig& c) {
  validate(c.params, c.max_sites);
  if (!(c.fraction > 0.0 && c.fraction <= 1.0)) {
    throw Error(ErrorCode::Config, fmt::format("fraction must lie in (0, 1], got {}", c.fraction));
  }
  switch (c.command) {
    case Command::SkinFactor:
      require_gauge(c.params);
      validate_window(c.resolved_fit_window(), c.params.sites, "fit window");
      validate_window(c.resolved_increment_window(), c.params.sites - 1, "increment window");
      break;
    case Command::Classify:
      require_graded(c.params);
      if (!(c.tolerance >= 0.0)) {
        throw Error(ErrorCode::Config, "tolerance must be >= 0");
      }
      break;
    case Command::LocalizationMap:
      require_graded(c.params);
      validate_grid(c.gamma_grid, "gamma");
      validate_grid(c.ratio_grid, "ratio");
      break;
    case Command::Entanglement:
      if (c.params.sites % 2 != 0) {
        throw Error(ErrorCode::Config, "entanglement runs need an even number of sites");
      }
      if (!(c.dynamics.t_max > 0.0) || !(c.dynamics.dt > 0.0) || c.dynamics.restabilize_every < 0) {
        throw Error(ErrorCode::Config, "need t_max > 0, dt > 0 and restabilize_every >= 0");
      }
      if (!c.ratios.empty()) {
        require_graded(c.params);
      }
      break;
    case Command::Spectrum:
      require_gauge(c.params);
      break;
  }
}

// ---------------------------------------------------------------------------
// JSON

namespace {

json window_json(const std::optional<SiteWindow>& w) {
  return w ? json::array({w->first, w->last}) : json(nullptr);
}

std::optional<SiteWindow> window_from(const json& j) {
  if (j.is_null()) {
    return std::nullopt;
  }
  return SiteWindow{j.at(0).get<int>(), j.at(1).get<int>()};
}

json grid_json(const GridSpec& g) {
  return {{"min", g.first}, {"max", g.last}, {"count", g.count}, {"extra", g.extras}};
}

GridSpec grid_from(const json& j) {
  return {j.at("min").get<double>(), j.at("max").get<double>(), j.at("count").get<int>(),
          j.at("extra").get<std::vector<double>>()};
}

json params_json(const ChainParams& p) {
  return {{"N", p.sites}, {"J", p.offset}, {"gamma", p.nonreciprocity}, {"F1", p.stark_slope},
          {"F2", p.hopping_slope}};
}

}  // namespace

json to_json(const RunConfig& c) {
  return {
      {"command", to_string(c.command)},
      {"params", params_json(c.params)},
      {"max_sites", c.max_sites},
      {"tolerance", c.tolerance},
      {"fraction", c.fraction},
      {"fit_window", window_json(c.fit_window)},
      {"increment_window", window_json(c.increment_window)},
      {"gamma_grid", grid_json(c.gamma_grid)},
      {"ratio_grid", grid_json(c.ratio_grid)},
      {"cuts", c.cuts},
      {"ratios", c.ratios},
      {"dynamics",
       {{"t_max", c.dynamics.t_max},
        {"dt", c.dynamics.dt},
        {"restabilize_every", c.dynamics.restabilize_every}}},
      {"output_dir", c.output_dir},
  };
}

RunConfig config_from_json(const json& j) {
  RunConfig c;
  c.command = parse_command(j.at("command").get<std::string>());
  const auto& p = j.at("params");
  c.params = {p.at("N").get<int>(), p.at("J").get<double>(), p.at("gamma").get<double>(),
              p.at("F1").get<double>(), p.at("F2").get<double>()};
  c.max_sites = j.at("max_sites").get<int>();
  c.tolerance = j.at("tolerance").get<double>();
  c.fraction = j.at("fraction").get<double>();
  c.fit_window = window_from(j.at("fit_window"));
  c.increment_window = window_from(j.at("increment_window"));
  c.gamma_grid = grid_from(j.at("gamma_grid"));
  c.ratio_grid = grid_from(j.at("ratio_grid"));
  c.cuts = j.at("cuts").get<std::vector<double>>();
  c.ratios = j.at("ratios").get<std::vector<double>>();
  const auto& d = j.at("dynamics");
  c.dynamics = {d.at("t_max").get<double>(), d.at("dt").get<double>(),
                d.at("restabilize_every").get<int>()};
  c.output_dir = j.value("output_dir", std::string("."));
  return c;
}

namespace {

// sidecars must not depend on where they were written
json echoed_config(const RunConfig& c) {
  json j = to_json(c);
  j.erase("output_dir");
  return j;
}

}  // namespace

// ---------------------------------------------------------------------------
// output

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::NumericalFailure, "SHA-256 digest failed");
  }
  std::string hex;
  hex.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    hex += fmt::format("{:02x}", digest[i]);
  }
  return hex;
}

namespace {

std::string num(double v) {
  if (std::isnan(v)) {
    return "nan";
  }
  return fmt::format("{:.17g}", v);
}

class Csv {
 public:
  explicit Csv(std::initializer_list<std::string_view> columns) {
    bool first = true;
    for (auto c : columns) {
      text_ += first ? "" : ",";
      text_ += c;
      first = false;
    }
    text_ += '\n';
  }

  template <typename... Values>
  void row(const Values&... values) {
    bool first = true;
    ((text_ += (first ? "" : ","), text_ += cell(values), first = false), ...);
    text_ += '\n';
  }

  const std::string& text() const { return text_; }

 private:
  static std::string cell(double v) { return num(v); }
  static std::string cell(int v) { return std::to_string(v); }

  std::string text_;
};

class OutputWriter {
 public:
  explicit OutputWriter(fs::path dir) : dir_(std::move(dir)) {}

  void write(const std::string& name, const std::string& content) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) {
      throw Error(ErrorCode::Io, fmt::format("cannot create '{}': {}", dir_.string(), ec.message()));
    }
    const fs::path path = dir_ / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) {
      throw Error(ErrorCode::Io, fmt::format("cannot write '{}'", path.string()));
    }
    files_.push_back({path, sha256_hex(content)});
  }

  void write_json(const std::string& name, const json& j) { write(name, j.dump(2) + "\n"); }

  std::vector<OutputFile> take() { return std::move(files_); }

 private:
  fs::path dir_;
  std::vector<OutputFile> files_;
};

json nullable(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json file_list(const std::vector<OutputFile>& files) {
  json out = json::array();
  for (const auto& f : files) {
    out.push_back({{"path", f.path.filename().string()}, {"sha256", f.sha256}});
  }
  return out;
}

// ---------------------------------------------------------------------------
// skin factor

enum class SkinLayout { Combined, Figure };

json skin_fits(const RunConfig& c, const SimilarityGauge& gauge) {
  const auto factors = gauge.factors();
  const SiteWindow fw = c.resolved_fit_window();
  const PowerLawFit power = fit_power_law(factors, fw);

  const SiteWindow iw = c.resolved_increment_window();
  std::vector<double> x;
  std::vector<double> y;
  for (int b = iw.first; b <= iw.last; ++b) {
    x.push_back(1.0 / b);
    y.push_back(gauge.log_factor[b] - gauge.log_factor[b - 1]);
  }
  const LineFit inc = fit_line(x, y);
  return {
      {"analytical_exponent", gauge.exponent},
      {"power_law_fit",
       {{"window", {fw.first, fw.last}},
        {"exponent", power.exponent},
        {"intercept", power.intercept},
        {"prefactor", std::exp(power.intercept)},
        {"rms_residual", power.residual}}},
      {"increment_fit",
       {{"window", {iw.first, iw.last}},
        {"coefficient", inc.slope},
        {"intercept", inc.intercept},
        {"rms_residual", inc.rms_residual}}},
      {"screening_scale", screening_scale(c.params)},
  };
}

json run_skin_factor(const RunConfig& c, OutputWriter& out, SkinLayout layout) {
  const SimilarityGauge gauge = gauge_product(c.params);
  const int n = c.params.sites;
  json summary = skin_fits(c, gauge);

  if (layout == SkinLayout::Combined) {
    Csv csv{"j", "d_j", "log_d_j", "log_increment_to_next", "inv_j"};
    for (int j = 1; j <= n; ++j) {
      const double inc = j < n ? gauge.log_factor[j] - gauge.log_factor[j - 1]
                               : std::numeric_limits<double>::quiet_NaN();
      csv.row(j, gauge.factor(j - 1), gauge.log_factor[j - 1], inc, 1.0 / j);
    }
    out.write("skin_factor.csv", csv.text());
    json sidecar = summary;
    sidecar["config"] = echoed_config(c);
    out.write_json("skin_factor.json", sidecar);
  } else {
    Csv loglog{"j", "ln_j", "d_j", "ln_d_j"};
    for (int j = 1; j <= n; ++j) {
      loglog.row(j, std::log(static_cast<double>(j)), gauge.factor(j - 1), gauge.log_factor[j - 1]);
    }
    Csv increment{"j", "inv_j", "log_increment"};
    for (int b = 1; b < n; ++b) {
      increment.row(b, 1.0 / b, gauge.log_factor[b] - gauge.log_factor[b - 1]);
    }
    out.write("fig1_loglog.csv", loglog.text());
    out.write("fig1_increment.csv", increment.text());
    json sidecar = summary;
    sidecar["config"] = echoed_config(c);
    out.write_json("fig1.json", sidecar);
  }
  return summary;
}

// ---------------------------------------------------------------------------
// classify

json classification_record(const RunConfig& c) {
  const auto branch = classify_branch(c.params, c.tolerance);
  const auto scales = finite_size_scales(c.params, c.tolerance);
  auto root = [](std::complex<double> r) { return json::array({r.real(), r.imag()}); };
  return {
      {"ratio", branch.ratio},
      {"kind", to_string(branch.kind)},
      {"q", nullable(branch.wavenumber)},
      {"kappa", nullable(branch.decay_rate)},
      {"r_star", nullable(branch.critical_root)},
      {"roots", {root(branch.roots.major), root(branch.roots.minor)}},
      {"eta", skin_exponent(c.params)},
      {"Xi_N", scales.screening},
      {"Lambda_N", nullable(scales.competition)},
      {"j_star", nullable(scales.envelope_peak)},
      {"delta", scales.threshold_distance},
      {"delta_N", scales.widths.size_only},
      {"delta_N_gamma", scales.widths.with_gamma},
  };
}

json run_classify(const RunConfig& c, OutputWriter& out) {
  json record = classification_record(c);
  json sidecar = record;
  sidecar["config"] = echoed_config(c);
  out.write_json("classify.json", sidecar);
  return record;
}

// ---------------------------------------------------------------------------
// localization map

json run_localization_map(const RunConfig& c, OutputWriter& out, int threads) {
  std::vector<double> row_extras = c.gamma_grid.extras;
  row_extras.insert(row_extras.end(), c.cuts.begin(), c.cuts.end());
  const auto gammas =
      grid_with_extras(c.gamma_grid.first, c.gamma_grid.last, c.gamma_grid.count, row_extras);
  const auto ratios = grid_with_extras(c.ratio_grid.first, c.ratio_grid.last, c.ratio_grid.count,
                                       c.ratio_grid.extras);
  const LocalizationMap map = build_localization_map(c.params, gammas, ratios, c.fraction, threads);

  const double nan = std::numeric_limits<double>::quiet_NaN();
  Csv csv{"gamma", "ratio", "mean_pol", "ipr_top20", "valid_flag"};
  json invalid = json::array();
  for (std::size_t g = 0; g < gammas.size(); ++g) {
    for (std::size_t r = 0; r < ratios.size(); ++r) {
      const MapCell& cell = map.at(g, r);
      csv.row(gammas[g], ratios[r], cell.valid ? cell.mean_polarization : nan,
              cell.valid ? cell.ipr_top : nan, cell.valid ? 1 : 0);
      if (!cell.valid) {
        invalid.push_back({{"gamma", gammas[g]}, {"ratio", ratios[r]}, {"reason", cell.reason}});
      }
    }
  }
  out.write("map.csv", csv.text());

  json cut_files = json::array();
  for (double cut : c.cuts) {
    const auto it = std::find(gammas.begin(), gammas.end(), cut);
    const auto g = static_cast<std::size_t>(it - gammas.begin());
    Csv line{"ratio", "mean_pol", "ipr_top20", "valid_flag"};
    for (std::size_t r = 0; r < ratios.size(); ++r) {
      const MapCell& cell = map.at(g, r);
      line.row(ratios[r], cell.valid ? cell.mean_polarization : nan,
               cell.valid ? cell.ipr_top : nan, cell.valid ? 1 : 0);
    }
    const std::string name = "map_cut_gamma_" + format_label(cut) + ".csv";
    out.write(name, line.text());
    cut_files.push_back({{"gamma", cut}, {"file", name}});
  }

  const double screening_gamma =
      5.0 * c.params.hopping_slope / std::log(static_cast<double>(c.params.sites));
  json summary = {
      {"gamma_grid", gammas},
      {"ratio_grid", ratios},
      {"fixed", params_json(c.params)},
      {"fraction", c.fraction},
      {"guides", {{"threshold_ratio", 2.0}, {"screening_value", 5.0}, {"screening_gamma", screening_gamma}}},
      {"cuts", cut_files},
      {"invalid_cells", invalid},
  };
  json sidecar = summary;
  sidecar["config"] = echoed_config(c);
  out.write_json("map.json", sidecar);
  return summary;
}

// ---------------------------------------------------------------------------
// entanglement

json checks_json(const ProjectorChecks& p) {
  return {{"max_idempotency", p.idempotency}, {"max_hermiticity", p.hermiticity},
          {"max_trace_error", p.trace_error}};
}

json run_entanglement(const RunConfig& c, OutputWriter& out, int threads) {
  std::vector<ChainParams> runs;
  if (c.ratios.empty()) {
    runs.push_back(c.params);
  } else {
    for (double r : c.ratios) {
      ChainParams p = c.params;
      p.stark_slope = r * p.hopping_slope;
      runs.push_back(p);
    }
  }
  const OrbitalState initial = build_cdw_orbitals(c.params.sites);

  std::vector<EntropyTrace> traces(runs.size());
  if (threads > 1 && runs.size() > 1) {
    std::vector<std::future<EntropyTrace>> pending;
    for (const auto& p : runs) {
      pending.push_back(std::async(std::launch::async, [&c, &initial, p] {
        return entropy_trace(p, c.dynamics, initial);
      }));
    }
    for (std::size_t i = 0; i < pending.size(); ++i) {
      traces[i] = pending[i].get();
    }
  } else {
    for (std::size_t i = 0; i < runs.size(); ++i) {
      traces[i] = entropy_trace(runs[i], c.dynamics, initial);
    }
  }

  json trace_info = json::array();
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const auto& t = traces[i];
    Csv csv{"t", "S"};
    for (std::size_t k = 0; k < t.times.size(); ++k) {
      csv.row(t.times[k], t.entropy[k]);
    }
    const std::string name =
        c.ratios.empty() ? std::string("entropy.csv")
                         : "entropy_ratio_" + format_label(c.ratios[i]) + ".csv";
    out.write(name, csv.text());
    trace_info.push_back({{"file", name},
                          {"F1", runs[i].stark_slope},
                          {"ratio", c.ratios.empty() ? json(nullptr) : json(c.ratios[i])},
                          {"projector_checks", checks_json(t.worst)}});
  }

  json summary = {
      {"dt", c.dynamics.dt},
      {"t_max", c.dynamics.t_max},
      {"restabilize_every", c.dynamics.restabilize_every},
      {"initial_state",
       {{"kind", "charge-density-wave"},
        {"occupied_sites", "2, 4, ..., N"},
        {"particles", c.params.sites / 2}}},
      {"subsystem", {{"first_site", 1}, {"last_site", c.params.sites / 2}}},
      {"traces", trace_info},
  };

  if (traces.size() == 3) {
    const auto delta = excess_entropy(traces[1], traces[0], traces[2]);
    std::string header = "t";
    for (double r : c.ratios) {
      header += ",S_ratio" + format_label(r);
    }
    header += ",deltaS\n";
    std::string body = header;
    for (std::size_t k = 0; k < delta.size(); ++k) {
      body += num(traces[0].times[k]);
      for (const auto& t : traces) {
        body += "," + num(t.entropy[k]);
      }
      body += "," + num(delta[k]) + "\n";
    }
    out.write("entropy_combined.csv", body);
    summary["excess_entropy"] = {{"file", "entropy_combined.csv"},
                                 {"threshold_ratio", c.ratios[1]},
                                 {"final", delta.back()}};
  }
  json sidecar = summary;
  sidecar["config"] = echoed_config(c);
  out.write_json("entanglement.json", sidecar);
  return summary;
}

// ---------------------------------------------------------------------------
// spectrum

json run_spectrum(const RunConfig& c, OutputWriter& out) {
  const EigenSet eigs = eigensolve(c.params);
  Csv csv{"n", "energy", "center", "ipr", "polarization"};
  for (int k = 0; k < eigs.size(); ++k) {
    const auto d = right_state_diagnostics(eigs, k);
    csv.row(k, eigs.energies[k], d.center, d.ipr, d.polarization);
  }
  out.write("spectrum.csv", csv.text());
  json summary = {
      {"states", eigs.size()},
      {"mean_polarization", mean_edge_polarization(eigs)},
      {"ipr_top", ipr_top_fraction(eigs, c.fraction)},
      {"fraction", c.fraction},
      {"eta", eigs.gauge.exponent},
  };
  json sidecar = summary;
  sidecar["config"] = echoed_config(c);
  out.write_json("spectrum.json", sidecar);
  return summary;
}

RunResult finish(OutputWriter& out, const RunConfig& c, json summary) {
  RunResult result;
  result.files = out.take();
  summary["command"] = to_string(c.command);
  summary["files"] = file_list(result.files);
  result.summary = std::move(summary);
  return result;
}

}  // namespace

RunResult run(const RunConfig& config, int threads) {
  validate(config);
  OutputWriter out(config.output_dir);
  switch (config.command) {
    case Command::SkinFactor:
      return finish(out, config, run_skin_factor(config, out, SkinLayout::Combined));
    case Command::Classify:
      return finish(out, config, run_classify(config, out));
    case Command::LocalizationMap:
      return finish(out, config, run_localization_map(config, out, threads));
    case Command::Entanglement:
      return finish(out, config, run_entanglement(config, out, threads));
    case Command::Spectrum:
      return finish(out, config, run_spectrum(config, out));
  }
  throw Error(ErrorCode::Config, "unhandled command");
}

// ---------------------------------------------------------------------------
// figures

std::vector<RunConfig> figure_recipe(Figure figure, const std::string& output_dir) {
  RunConfig c;
  c.output_dir = output_dir;
  switch (figure) {
    case Figure::Fig1:
      c.command = Command::SkinFactor;
      c.params = {100, 1.0, 0.5, 0.0, 1.0};
      c.fit_window = SiteWindow{10, 90};
      c.increment_window = SiteWindow{50, 99};
      break;
    case Figure::Fig2:
      c.command = Command::LocalizationMap;
      c.params = {100, 1.0, 0.0, 0.0, 0.2};
      break;
    case Figure::Fig3:
      c.command = Command::Entanglement;
      c.params = {120, -1.0, 0.0, 0.08, 0.08};
      c.ratios = {1.0, 2.0, 3.0};
      c.dynamics = {8.0, 0.02, 1};
      break;
  }
  return {c};
}

RunResult reproduce(Figure figure, const std::string& output_dir, int threads) {
  const auto recipes = figure_recipe(figure, output_dir);
  for (const auto& c : recipes) {
    validate(c);
  }
  RunResult all;
  json runs = json::array();
  for (const auto& c : recipes) {
    RunResult r;
    if (figure == Figure::Fig1) {
      OutputWriter out(c.output_dir);
      r = finish(out, c, run_skin_factor(c, out, SkinLayout::Figure));
    } else {
      r = run(c, threads);
    }
    all.files.insert(all.files.end(), r.files.begin(), r.files.end());
    runs.push_back(std::move(r.summary));
  }
  OutputWriter manifest_out(output_dir);
  const json manifest = {{"figure", to_string(figure)}, {"files", file_list(all.files)}};
  manifest_out.write_json("manifest.json", manifest);
  auto manifest_file = manifest_out.take();
  all.files.insert(all.files.end(), manifest_file.begin(), manifest_file.end());
  all.summary = {{"figure", to_string(figure)}, {"runs", runs}, {"manifest", manifest}};
  return all;
}

}  // namespace nhstark
