#include "blochdyn/scenario.hpp"

#include <fstream>
#include <json.hpp>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <utility>
#include <vector>

#include "blochdyn/errors.hpp"

namespace blochdyn {

namespace {

using Json = nlohmann::json;

struct Location {
  int line = 0;
  int column = 0;
};

Location locate_offset(std::string_view text, std::size_t offset) {
  Location loc{1, 1};
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++loc.line;
      loc.column = 1;
    } else {
      ++loc.column;
    }
  }
  return loc;
}

/// Position of the `occurrence`-th "key": in the raw text, or 0:0.
Location locate_key(std::string_view text, const std::string& key, int occurrence = 1) {
  const std::string quoted = "\"" + key + "\"";
  std::size_t pos = 0;
  int seen = 0;
  while ((pos = text.find(quoted, pos)) != std::string_view::npos) {
    std::size_t after = pos + quoted.size();
    while (after < text.size() && std::isspace(static_cast<unsigned char>(text[after]))) ++after;
    if (after < text.size() && text[after] == ':' && ++seen == occurrence) return locate_offset(text, pos);
    pos += quoted.size();
  }
  return {};
}

struct Suffix {
  std::string_view name;
  double si_factor;  // SI value of one unit of this suffix
};

std::vector<Suffix> suffixes_for(Dimension d) {
  switch (d) {
    case Dimension::length: return {{"m", 1.0}, {"nm", 1e-9}, {"angstrom", 1e-10}};
    case Dimension::time: return {{"s", 1.0}, {"fs", 1e-15}};
    case Dimension::energy: return {{"eV", si::electron_volt}, {"J", 1.0}};
    case Dimension::electric_field: return {{"V_per_m", 1.0}};
    case Dimension::magnetic_field: return {{"T", 1.0}};
    case Dimension::wavevector: return {{"per_m", 1.0}};
    case Dimension::velocity: return {{"m_per_s", 1.0}};
  }
  return {};
}

/// One JSON object with strict key accounting.
class Block {
 public:
  Block(const Json& obj, std::string path, std::string_view text) : obj_(obj), path_(std::move(path)), text_(text) {
    if (!obj_.is_object()) fail(path_ + " must be an object", path_);
  }

  [[noreturn]] void fail(const std::string& message, const std::string& key) const {
    const auto loc = locate_key(text_, key);
    throw ConfigError(message, loc.line, loc.column);
  }

  bool has(const std::string& key) const { return obj_.contains(key); }

  const Json& take(const std::string& key) {
    used_.insert(key);
    return obj_.at(key);
  }

  std::optional<Block> block(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return Block(take(key), key, text_);
  }

  std::string string(const std::string& key) {
    if (!has(key)) fail("missing required key '" + key + "' in " + path_, path_);
    const auto& v = take(key);
    if (!v.is_string()) fail("'" + key + "' must be a string", key);
    return v.get<std::string>();
  }

  double number(const std::string& key) {
    const auto& v = take(key);
    if (!v.is_number()) fail("'" + key + "' must be a number", key);
    return v.get<double>();
  }

  std::optional<double> optional_number(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return number(key);
  }

  long integer(const std::string& key, std::optional<long> fallback = std::nullopt) {
    if (!has(key)) {
      if (fallback) return *fallback;
      fail("missing required key '" + key + "' in " + path_, path_);
    }
    const auto& v = take(key);
    if (!v.is_number_integer()) fail("'" + key + "' must be an integer", key);
    return v.get<long>();
  }

  /// The one key base_<suffix> present; `allow_zone` admits the _zone
  /// suffix (fraction of 2 pi / a).
  std::optional<std::pair<std::string, const Json*>> find_quantity(const std::string& base, Dimension d,
                                                                    bool allow_zone) {
    std::vector<std::string> names = {base + "_internal"};
    for (const auto& s : suffixes_for(d)) names.push_back(base + "_" + std::string(s.name));
    if (allow_zone) names.push_back(base + "_zone");
    std::optional<std::pair<std::string, const Json*>> found;
    for (const auto& n : names) {
      if (!has(n)) continue;
      if (found) fail("'" + found->first + "' and '" + n + "' both given", n);
      found = std::make_pair(n, &take(n));
    }
    return found;
  }

  double convert(const std::string& key, double value, Dimension d, const UnitSystem& units, double lattice) const {
    if (key.ends_with("_internal")) return value;
    if (key.ends_with("_zone")) return value * 2 * std::numbers::pi / lattice;
    for (const auto& s : suffixes_for(d))
      if (key.ends_with("_" + std::string(s.name))) return units.to_internal(value * s.si_factor, d);
    fail("unsupported unit on '" + key + "'", key);
  }

  std::optional<double> quantity(const std::string& base, Dimension d, const UnitSystem& units,
                                 double lattice = 1.0, bool allow_zone = false) {
    const auto found = find_quantity(base, d, allow_zone);
    if (!found) return std::nullopt;
    if (!found->second->is_number()) fail("'" + found->first + "' must be a number", found->first);
    const double v = convert(found->first, found->second->get<double>(), d, units, lattice);
    if (!std::isfinite(v)) fail("'" + found->first + "' must be finite", found->first);
    return v;
  }

  double required_quantity(const std::string& base, Dimension d, const UnitSystem& units, double lattice = 1.0,
                           bool allow_zone = false) {
    const auto v = quantity(base, d, units, lattice, allow_zone);
    if (!v) fail("missing required quantity '" + base + "_<unit>' in " + path_, path_);
    return *v;
  }

  /// A scalar or an array of up to three components; a scalar fills x.
  std::optional<Vec3<double>> vector(const std::string& base, Dimension d, const UnitSystem& units,
                                     double lattice = 1.0, bool allow_zone = false) {
    const auto found = find_quantity(base, d, allow_zone);
    if (!found) return std::nullopt;
    const auto& [key, node] = *found;
    Vec3<double> out = Vec3<double>::Zero();
    if (node->is_number()) {
      out.x() = convert(key, node->get<double>(), d, units, lattice);
    } else if (node->is_array() && !node->empty() && node->size() <= 3) {
      for (std::size_t i = 0; i < node->size(); ++i) {
        if (!(*node)[i].is_number()) fail("'" + key + "' components must be numbers", key);
        out(static_cast<Eigen::Index>(i)) = convert(key, (*node)[i].get<double>(), d, units, lattice);
      }
    } else {
      fail("'" + key + "' must be a number or an array of 1-3 numbers", key);
    }
    if (!out.allFinite()) fail("'" + key + "' must be finite", key);
    return out;
  }

  void finish() const {
    for (const auto& [key, value] : obj_.items())
      if (!used_.count(key)) fail("unknown key '" + key + "' in " + path_, key);
  }

 private:
  const Json& obj_;
  std::string path_;
  std::string_view text_;
  std::set<std::string> used_;
};

Json parse_json(std::string_view text) {
  std::vector<std::set<std::string>> scopes;
  std::string duplicate;
  auto callback = [&](int, Json::parse_event_t event, Json& parsed) {
    if (event == Json::parse_event_t::object_start) {
      scopes.emplace_back();
    } else if (event == Json::parse_event_t::object_end) {
      if (!scopes.empty()) scopes.pop_back();
    } else if (event == Json::parse_event_t::key && !scopes.empty()) {
      const auto key = parsed.get<std::string>();
      if (!scopes.back().insert(key).second && duplicate.empty()) duplicate = key;
    }
    return true;
  };
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end(), callback);
  } catch (const Json::parse_error& e) {
    const auto loc = locate_offset(text, e.byte > 0 ? e.byte - 1 : 0);
    std::ostringstream os;
    os << "malformed JSON at line " << loc.line << ", column " << loc.column;
    throw ConfigError(os.str(), loc.line, loc.column);
  }
  if (!duplicate.empty()) {
    const auto loc = locate_key(text, duplicate, 2);
    throw ConfigError("duplicate key '" + duplicate + "'", loc.line, loc.column);
  }
  return doc;
}

FourierPotential<double> read_potential(Block& b, const UnitSystem& units) {
  const double a = b.required_quantity("a", Dimension::length, units);
  if (!(a > 0)) b.fail("lattice constant must be positive", "potential");
  std::string key;
  double scale = 0;
  if (b.has("coefficients_internal") && b.has("coefficients_eV"))
    b.fail("'coefficients_internal' and 'coefficients_eV' both given", "coefficients_eV");
  if (b.has("coefficients_internal")) {
    key = "coefficients_internal";
    scale = 1.0;
  } else if (b.has("coefficients_eV")) {
    key = "coefficients_eV";
    scale = units.energy_from_ev(1.0);
  } else {
    b.fail("potential needs 'coefficients_eV' or 'coefficients_internal'", "potential");
  }
  const auto& list = b.take(key);
  if (!list.is_array()) b.fail("'" + key + "' must be an array of [l, re, im] triples", key);
  FourierPotential<double>::CoefficientMap m;
  for (const auto& entry : list) {
    if (!entry.is_array() || entry.size() != 3 || !entry[0].is_number_integer() || !entry[1].is_number() ||
        !entry[2].is_number())
      b.fail("each entry of '" + key + "' must be [l, re, im] with integer l", key);
    const int l = entry[0].get<int>();
    if (l < 0) b.fail("list harmonics with l >= 0 only; V_{-l} = conj(V_l) is implied", key);
    if (m.count(l)) b.fail("harmonic l = " + std::to_string(l) + " listed twice", key);
    const std::complex<double> v(entry[1].get<double>() * scale, entry[2].get<double>() * scale);
    if (l == 0 && v.imag() != 0) b.fail("V_0 must be real", key);
    m[l] = v;
    if (l > 0) m[-l] = std::conj(v);
  }
  try {
    return FourierPotential<double>(a, std::move(m));
  } catch (const InvalidInput& e) {
    b.fail(e.what(), key);
  }
}

}  // namespace

Scenario parse_scenario(std::string_view text) {
  const Json doc = parse_json(text);
  Block root(doc, "scenario", text);
  if (!root.has("version")) root.fail("missing required key 'version'", "version");
  if (root.integer("version") != 1) root.fail("unsupported scenario version (expected 1)", "version");

  Scenario s;
  s.name = root.string("name");
  if (s.name.empty()) root.fail("'name' must not be empty", "name");
  s.prefix = s.name;

  if (auto b = root.block("units")) {
    const auto found = b->find_quantity("a_ref", Dimension::length, false);
    if (found) {
      if (found->first == "a_ref_internal") b->fail("a_ref needs an SI unit", found->first);
      if (!found->second->is_number()) b->fail("'" + found->first + "' must be a number", found->first);
      double factor = 1;
      for (const auto& suf : suffixes_for(Dimension::length))
        if (found->first == "a_ref_" + std::string(suf.name)) factor = suf.si_factor;
      try {
        s.units = UnitSystem(found->second->get<double>() * factor);
      } catch (const InvalidInput& e) {
        b->fail(e.what(), found->first);
      }
    }
    b->finish();
  }

  if (auto b = root.block("potential")) {
    s.potential = read_potential(*b, s.units);
    s.truncation = static_cast<int>(b->integer("truncation", kDefaultTruncation));
    if (s.truncation < 1) b->fail("'truncation' must be at least 1", "truncation");
    if (s.potential->cutoff() > s.truncation) b->fail("'truncation' is smaller than the highest harmonic", "truncation");
    b->finish();
  }
  const double a = s.potential ? s.potential->lattice_constant() : 1.0;

  if (auto b = root.block("field")) {
    if (auto e = b->vector("E", Dimension::electric_field, s.units)) s.E = *e;
    if (auto bz = b->quantity("B", Dimension::magnetic_field, s.units)) s.B = *bz;
    if (auto sb = b->block("solenoid")) {
      SolenoidSpec sol;
      sol.turns_per_m = sb->number("turns_per_m");
      sol.current_A = sb->number("current_A");
      sol.area_m2 = sb->number("area_m2");
      sol.radius_m = sb->number("radius_m");
      sol.reference_shift_per_m = sb->optional_number("reference_shift_per_m");
      sb->finish();
      s.solenoid = sol;
    }
    b->finish();
  }

  if (auto b = root.block("dynamics")) {
    DynamicsSpec d;
    const auto k0 = b->vector("k0", Dimension::wavevector, s.units, a, true);
    if (!k0) b->fail("missing required quantity 'k0_<unit>' in dynamics", "dynamics");
    d.k0 = *k0;
    d.x0 = b->vector("x0", Dimension::length, s.units);
    d.band = static_cast<int>(b->integer("band", 0));
    if (d.band < 0) b->fail("'band' must be non-negative", "band");
    d.duration = b->required_quantity("T", Dimension::time, s.units);
    d.dt = b->required_quantity("dt", Dimension::time, s.units);
    if (!(d.dt > 0) || !(d.duration >= d.dt)) b->fail("need dt > 0 and T >= dt", "dt");
    b->finish();
    s.dynamics = d;
  }

  if (auto b = root.block("packet")) {
    PacketSpec p;
    p.grid_points = b->integer("grid_points");
    p.length = b->required_quantity("length", Dimension::length, s.units);
    p.sigma = b->required_quantity("sigma", Dimension::length, s.units);
    p.center = b->quantity("center", Dimension::length, s.units).value_or(0.0);
    if (p.grid_points < 2 || (p.grid_points & (p.grid_points - 1)) != 0)
      b->fail("'grid_points' must be a power of two", "grid_points");
    if (!(p.length > 0) || !(p.sigma > 0)) b->fail("packet length and sigma must be positive", "packet");
    b->finish();
    s.packet = p;
  }

  if (auto b = root.block("conduction")) {
    ConductionSpec c;
    c.band = static_cast<int>(b->integer("band", 0));
    c.k_points = static_cast<int>(b->integer("k_points"));
    c.fraction = b->number("fraction");
    c.shift = b->required_quantity("shift", Dimension::wavevector, s.units, a, true);
    c.probe_shift = b->required_quantity("probe_shift", Dimension::wavevector, s.units, a, true);
    if (c.k_points < 64) b->fail("'k_points' must be at least 64", "k_points");
    if (c.fraction < 0 || c.fraction > 1) b->fail("'fraction' must lie in [0, 1]", "fraction");
    if (!(c.probe_shift > 0)) b->fail("'probe_shift' must be positive", "conduction");
    b->finish();
    s.conduction = c;
  }

  if (auto b = root.block("bands")) {
    s.bands.k_points = static_cast<int>(b->integer("k_points", 101));
    s.bands.count = static_cast<int>(b->integer("count", 3));
    if (s.bands.k_points < 2) b->fail("'k_points' must be at least 2", "k_points");
    if (s.bands.count < 1) b->fail("'count' must be at least 1", "count");
    b->finish();
  }

  if (auto b = root.block("output")) {
    if (b->has("prefix")) s.prefix = b->string("prefix");
    s.stride = b->integer("stride", 1);
    if (s.stride < 1) b->fail("'stride' must be at least 1", "stride");
    if (s.prefix.empty() || s.prefix.find('/') != std::string::npos)
      b->fail("'prefix' must be a plain file-name stem", "prefix");
    b->finish();
  }

  root.finish();
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open scenario file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

}  // namespace blochdyn
