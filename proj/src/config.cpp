#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "historica/cli.hpp"
#include "historica/error.hpp"

namespace historica::cli {

namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

std::string join(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path.empty() ? "<root>" : path, "expected an object");
}

void reject_unknown(const json& j, const std::string& path, const std::set<std::string>& allowed) {
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) fail(join(path, key), "unknown key");
  }
}

double real(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "must be finite");
  return v;
}

double real_in(const json& j, const std::string& path, double lo, double hi, bool open) {
  const double v = real(j, path);
  const bool ok = open ? (v > lo && v < hi) : (v >= lo && v <= hi);
  if (!ok) {
    std::ostringstream msg;
    msg << "value " << v << " outside " << (open ? "(" : "[") << lo << ", " << hi
        << (open ? ")" : "]");
    fail(path, msg.str());
  }
  return v;
}

std::uint64_t count(const json& j, const std::string& path, std::uint64_t min) {
  std::uint64_t v = 0;
  if (j.is_number_unsigned()) {
    v = j.get<std::uint64_t>();
  } else if (j.is_number_integer()) {
    fail(path, "must not be negative");
  } else if (j.is_number_float()) {
    const double d = j.get<double>();
    if (!(d >= 0.0 && d < 0x1.0p64 && std::floor(d) == d)) fail(path, "expected a whole number");
    v = static_cast<std::uint64_t>(d);
  } else {
    fail(path, "expected a whole number");
  }
  if (v < min) fail(path, "must be at least " + std::to_string(min));
  return v;
}

bool boolean(const json& j, const std::string& path) {
  if (!j.is_boolean()) fail(path, "expected true or false");
  return j.get<bool>();
}

std::string text(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

std::vector<double> reals(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(real(j[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::vector<double> integers(const json& j, const std::string& path) {
  auto v = reals(j, path);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (std::floor(v[i]) != v[i] || std::abs(v[i]) > 0x1.0p53) {
      fail(path + "[" + std::to_string(i) + "]", "expected an integer");
    }
  }
  return v;
}

template <class Enum>
Enum choice(const json& j, const std::string& path,
            std::initializer_list<std::pair<const char*, Enum>> options) {
  const std::string s = text(j, path);
  std::string names;
  for (const auto& [name, value] : options) {
    if (s == name) return value;
    names += names.empty() ? name : std::string(", ") + name;
  }
  fail(path, "'" + s + "' is not one of " + names);
}

// Runs f and prefixes any ConfigError it throws with `path`.
template <class F>
auto at(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const ConfigError& e) {
    fail(path, e.what());
  }
}

NorthSouthMap arc_map(const json& j, const std::string& path) {
  const std::string name = text(j, path);
  return at(path, [&] { return NorthSouthMap::by_name(name); });
}

MorseSmaleMap morse_smale(const json& j, const std::string& path) {
  if (j.is_string()) return MorseSmaleMap(arc_map(j, path));
  require_object(j, path);
  reject_unknown(j, path, {"fixed_points", "arcs", "space"});
  for (const char* key : {"fixed_points", "arcs"}) {
    if (!j.contains(key)) fail(join(path, key), "missing");
  }
  auto fixed = reals(j["fixed_points"], join(path, "fixed_points"));
  const std::string arcs_path = join(path, "arcs");
  if (!j["arcs"].is_array()) fail(arcs_path, "expected an array of map names");
  std::vector<NorthSouthMap> arcs;
  for (std::size_t i = 0; i < j["arcs"].size(); ++i) {
    arcs.push_back(arc_map(j["arcs"][i], arcs_path + "[" + std::to_string(i) + "]"));
  }
  FiberSpace space = FiberSpace::UnitInterval;
  if (j.contains("space")) {
    space = choice<FiberSpace>(j["space"], join(path, "space"),
                               {{"interval", FiberSpace::UnitInterval},
                                {"circle", FiberSpace::Circle}});
  }
  return at(path, [&] { return MorseSmaleMap(std::move(fixed), std::move(arcs), space); });
}

StepTable step_table(const json& j, const std::string& path) {
  const std::string letters_path = join(path, "letters");
  const std::string probs_path = join(path, "probs");
  if (!j.contains("letters")) fail(letters_path, "missing");
  if (!j.contains("probs")) fail(probs_path, "missing");
  if (!j["letters"].is_array()) fail(letters_path, "expected an array of strings");
  std::vector<std::string> letters;
  for (std::size_t i = 0; i < j["letters"].size(); ++i) {
    letters.push_back(text(j["letters"][i], letters_path + "[" + std::to_string(i) + "]"));
  }
  auto probs = reals(j["probs"], probs_path);
  if (probs.size() != letters.size()) fail(probs_path, "needs one entry per letter");
  StepTable table = at(probs_path, [&] { return StepTable(letters, probs); });
  for (const char* column : {"a", "log_a", "psi", "z", "phi"}) {
    if (!j.contains(column)) continue;
    const std::string col_path = join(path, column);
    const bool integral = std::string_view(column) == "psi" || std::string_view(column) == "z";
    auto values = integral ? integers(j[column], col_path) : reals(j[column], col_path);
    if (values.size() != letters.size()) fail(col_path, "needs one entry per letter");
    at(col_path, [&] {
      table.set_values(column, std::move(values));
      return 0;
    });
  }
  return table;
}

SystemSpec system_spec(const json& j, const std::string& path) {
  require_object(j, path);
  if (!j.contains("family")) fail(join(path, "family"), "missing");
  const std::string family = text(j["family"], join(path, "family"));
  const std::set<std::string> common{"family", "coordinates"};
  const auto allow = [&](std::set<std::string> extra) {
    extra.insert(common.begin(), common.end());
    reject_unknown(j, path, extra);
  };
  const auto need = [&](const char* key) -> const json& {
    if (!j.contains(key)) fail(join(path, key), "missing");
    return j[key];
  };

  SystemSpec s;
  if (family == "fractional_linear") {
    allow({"letters", "probs", "a", "log_a"});
    if (j.contains("a") == j.contains("log_a")) {
      fail(join(path, "a"), "give exactly one of 'a' and 'log_a'");
    }
    s = at(path, [&] { return make_fractional_linear(step_table(j, path)); });
  } else if (family == "t_psi") {
    allow({"letters", "probs", "psi", "map"});
    need("psi");
    const std::string map_path = join(path, "map");
    MorseSmaleMap map = morse_smale(need("map"), map_path);
    s = at(path, [&] { return make_t_psi(step_table(j, path), std::move(map)); });
  } else if (family == "coupling_walk") {
    allow({"letters", "probs", "psi", "z", "map", "ladder"});
    need("psi");
    need("z");
    NorthSouthMap map = arc_map(need("map"), join(path, "map"));
    if (j.contains("ladder")) {
      choice<int>(j["ladder"], join(path, "ladder"), {{"dyadic", 0}});
    }
    s = at(path, [&] {
      return make_coupling_walk(step_table(j, path), LadderPoints::dyadic(), std::move(map));
    });
  } else if (family == "manneville_pomeau") {
    allow({"p"});
    s = make_manneville_pomeau(real(need("p"), join(path, "p")));
  } else if (family == "thaler") {
    allow({"c", "p"});
    s = make_thaler(real(need("c"), join(path, "c")), real(need("p"), join(path, "p")));
  } else if (family == "skew_translation") {
    allow({"letters", "probs", "phi"});
    need("phi");
    s = at(path, [&] { return make_skew_translation(step_table(j, path)); });
  } else {
    fail(join(path, "family"),
         "'" + family +
             "' is not one of fractional_linear, t_psi, coupling_walk, manneville_pomeau, "
             "thaler, skew_translation");
  }
  if (j.contains("coordinates")) {
    s.coordinates = choice<Coordinates>(j["coordinates"], join(path, "coordinates"),
                                        {{"conjugate", Coordinates::Conjugate},
                                         {"direct", Coordinates::Direct}});
  }
  at(path, [&] {
    validate(s.family, s.space);
    return 0;
  });
  return s;
}

ReferenceLaw reference_law(const json& j, const std::string& path) {
  ReferenceLaw r;
  if (j.is_string()) {
    r.kind = choice<ReferenceLaw::Kind>(j, path, {{"arcsine", ReferenceLaw::Kind::Arcsine},
                                                  {"uniform_mod", ReferenceLaw::Kind::UniformMod}});
    return r;
  }
  require_object(j, path);
  reject_unknown(j, path, {"kind", "alpha", "beta", "period"});
  if (!j.contains("kind")) fail(join(path, "kind"), "missing");
  r.kind = choice<ReferenceLaw::Kind>(j["kind"], join(path, "kind"),
                                      {{"arcsine", ReferenceLaw::Kind::Arcsine},
                                       {"thaler", ReferenceLaw::Kind::Thaler},
                                       {"uniform_mod", ReferenceLaw::Kind::UniformMod}});
  if (j.contains("alpha")) r.alpha = real_in(j["alpha"], join(path, "alpha"), 0.0, 1.0, true);
  if (j.contains("beta")) r.beta = real_in(j["beta"], join(path, "beta"), 0.0, 1.0, true);
  if (j.contains("period")) {
    r.period = real(j["period"], join(path, "period"));
    if (!(r.period > 0.0)) fail(join(path, "period"), "must be positive");
  }
  return r;
}

Thresholds thresholds(const json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j, path,
                 {"low", "high", "spread", "min_extreme_fraction", "min_spread_fraction",
                  "lambda_low", "lambda_high", "min_coverage_fraction", "monotone_window",
                  "max_mean_interior", "min_monotone_fraction", "ks_max"});
  Thresholds t;
  const auto unit = [&](const char* key, double& slot) {
    if (j.contains(key)) slot = real_in(j[key], join(path, key), 0.0, 1.0, false);
  };
  const auto gate = [&](const char* key, std::optional<double>& slot) {
    if (j.contains(key)) slot = real_in(j[key], join(path, key), 0.0, 1.0, false);
  };
  unit("low", t.low);
  unit("high", t.high);
  unit("spread", t.spread);
  unit("lambda_low", t.lambda_low);
  unit("lambda_high", t.lambda_high);
  gate("min_extreme_fraction", t.min_extreme_fraction);
  gate("min_spread_fraction", t.min_spread_fraction);
  gate("min_coverage_fraction", t.min_coverage_fraction);
  gate("max_mean_interior", t.max_mean_interior);
  gate("min_monotone_fraction", t.min_monotone_fraction);
  gate("ks_max", t.ks_max);
  if (j.contains("monotone_window")) {
    t.monotone_window = count(j["monotone_window"], join(path, "monotone_window"), 2);
  }
  return t;
}

const std::set<std::string> kExperimentKeys{
    "name",     "kind",      "system",     "x0",        "horizon",      "trials",
    "seed",     "gamma",     "side",       "boundary",  "epsilon",      "window",
    "checkpoints", "reference", "alpha_probes", "period_compatible", "thresholds"};

const std::set<std::string> kFileKeys{"out", "svg", "threads"};

Experiment experiment(const json& j, const std::string& path, const std::set<std::string>& extra) {
  require_object(j, path);
  std::set<std::string> allowed = kExperimentKeys;
  allowed.insert(extra.begin(), extra.end());
  reject_unknown(j, path, allowed);

  Experiment e;
  ExperimentConfig& c = e.config;
  if (j.contains("name")) c.name = text(j["name"], join(path, "name"));
  if (j.contains("kind")) {
    e.kind_given = true;
    c.kind = choice<ExperimentKind>(j["kind"], join(path, "kind"),
                                    {{"occupation", ExperimentKind::Occupation},
                                     {"birkhoff", ExperimentKind::Birkhoff},
                                     {"interior", ExperimentKind::Interior},
                                     {"limitset", ExperimentKind::LimitSet},
                                     {"equidist", ExperimentKind::Equidistribution}});
  }
  if (!j.contains("system")) fail(join(path, "system"), "missing");
  c.system = system_spec(j["system"], join(path, "system"));

  const bool intermittent = std::holds_alternative<MannevillePomeau>(c.system.family) ||
                            std::holds_alternative<ThalerBranch>(c.system.family);
  if (intermittent) c.x0 = Lebesgue{};
  if (std::holds_alternative<SkewTranslation>(c.system.family)) {
    c.x0 = 0.0;
    c.reference.kind = ReferenceLaw::Kind::UniformMod;
  }
  if (j.contains("x0")) {
    const std::string p = join(path, "x0");
    if (j["x0"].is_string()) {
      choice<int>(j["x0"], p, {{"lebesgue", 0}});
      c.x0 = Lebesgue{};
    } else {
      c.x0 = real(j["x0"], p);
    }
  }
  if (j.contains("horizon")) c.horizon = count(j["horizon"], join(path, "horizon"), 1);
  if (j.contains("trials")) c.trials = count(j["trials"], join(path, "trials"), 1);
  if (j.contains("seed")) c.seed = count(j["seed"], join(path, "seed"), 0);
  if (j.contains("gamma")) c.gamma = real(j["gamma"], join(path, "gamma"));
  if (j.contains("side")) {
    c.side = choice<Side>(j["side"], join(path, "side"),
                          {{"lower", Side::Lower}, {"upper", Side::Upper}});
  }
  if (j.contains("boundary")) {
    c.boundary = choice<Boundary>(j["boundary"], join(path, "boundary"),
                                  {{"closed", Boundary::Closed}, {"open", Boundary::Open}});
  }
  if (j.contains("epsilon")) {
    c.epsilon = real_in(j["epsilon"], join(path, "epsilon"), 0.0, 0.5, true);
  }
  if (j.contains("window")) {
    const std::string p = join(path, "window");
    const auto w = reals(j["window"], p);
    if (w.size() != 2 || !(w[0] <= w[1])) fail(p, "expected [lo, hi] with lo <= hi");
    c.window = std::pair{w[0], w[1]};
  }
  if (j.contains("checkpoints")) {
    const std::string p = join(path, "checkpoints");
    const json& cp = j["checkpoints"];
    require_object(cp, p);
    reject_unknown(cp, p, {"n0", "burn_in"});
    if (cp.contains("n0")) c.checkpoints.n0 = count(cp["n0"], join(p, "n0"), 1);
    if (cp.contains("burn_in")) c.checkpoints.burn_in = count(cp["burn_in"], join(p, "burn_in"), 0);
  }
  if (j.contains("reference")) c.reference = reference_law(j["reference"], join(path, "reference"));
  if (j.contains("alpha_probes")) {
    const std::string p = join(path, "alpha_probes");
    c.alpha_probes = reals(j["alpha_probes"], p);
    for (std::size_t i = 0; i < c.alpha_probes.size(); ++i) {
      real_in(j["alpha_probes"][i], p + "[" + std::to_string(i) + "]", 0.0, 1.0, false);
    }
  }
  if (j.contains("period_compatible")) {
    c.period_compatible = boolean(j["period_compatible"], join(path, "period_compatible"));
  }
  if (j.contains("thresholds")) c.thresholds = thresholds(j["thresholds"], join(path, "thresholds"));
  return e;
}

}  // namespace

ConfigFile parse_config(std::string_view source) {
  json root;
  try {
    root = json::parse(source.begin(), source.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("<root>: malformed JSON: ") + e.what());
  }
  require_object(root, "");

  ConfigFile file;
  if (root.contains("out")) file.out = text(root["out"], "out");
  if (root.contains("svg")) file.svg = boolean(root["svg"], "svg");
  if (root.contains("threads")) {
    file.threads = static_cast<unsigned>(count(root["threads"], "threads", 1));
  }

  if (root.contains("experiments")) {
    std::set<std::string> allowed = kFileKeys;
    allowed.insert("experiments");
    reject_unknown(root, "", allowed);
    const json& list = root["experiments"];
    if (!list.is_array() || list.empty()) fail("experiments", "expected a nonempty array");
    file.single = false;
    std::set<std::string> names;
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string path = "experiments[" + std::to_string(i) + "]";
      if (!list[i].is_object() || !list[i].contains("name")) fail(path + ".name", "missing");
      file.experiments.push_back(experiment(list[i], path, {}));
      if (!names.insert(file.experiments.back().config.name).second) {
        fail(path + ".name", "duplicate experiment name");
      }
    }
  } else {
    file.experiments.push_back(experiment(root, "", kFileKeys));
  }
  return file;
}

ConfigFile load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string() + ": cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace historica::cli
