#include "mdres/config.hpp"

#include "mdres/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace mdres {

using json = nlohmann::json;

namespace {

/// A JSON object together with its path, for error messages.
class Node {
public:
  Node(const json& j, std::string path) : j_(j), path_(std::move(path))
  {
    if (!j_.is_object()) {
      fail("expected an object");
    }
  }

  [[noreturn]] void fail(const std::string& what) const
  {
    throw ConfigError((path_.empty() ? std::string("<root>") : path_) + ": " + what);
  }

  [[nodiscard]] std::string child_path(const std::string& key) const
  {
    return path_.empty() ? key : path_ + "." + key;
  }

  [[nodiscard]] bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

  [[nodiscard]] const json& at(const std::string& key) const
  {
    if (!has(key)) {
      throw ConfigError(child_path(key) + ": required field missing");
    }
    return j_.at(key);
  }

  [[nodiscard]] Node object(const std::string& key) const { return {at(key), child_path(key)}; }

  [[nodiscard]] double number(const std::string& key) const
  {
    const json& v = at(key);
    if (!v.is_number()) {
      throw ConfigError(child_path(key) + ": expected a number");
    }
    return v.get<double>();
  }
  [[nodiscard]] double number(const std::string& key, double def) const { return has(key) ? number(key) : def; }

  [[nodiscard]] int integer(const std::string& key, int def) const
  {
    if (!has(key)) {
      return def;
    }
    const json& v = at(key);
    if (!v.is_number_integer()) {
      throw ConfigError(child_path(key) + ": expected an integer");
    }
    return v.get<int>();
  }

  [[nodiscard]] bool boolean(const std::string& key, bool def) const
  {
    if (!has(key)) {
      return def;
    }
    const json& v = at(key);
    if (!v.is_boolean()) {
      throw ConfigError(child_path(key) + ": expected true or false");
    }
    return v.get<bool>();
  }

  [[nodiscard]] std::string string(const std::string& key, const std::string& def) const
  {
    if (!has(key)) {
      return def;
    }
    const json& v = at(key);
    if (!v.is_string()) {
      throw ConfigError(child_path(key) + ": expected a string");
    }
    return v.get<std::string>();
  }

  [[nodiscard]] std::vector<double> numbers(const std::string& key) const
  {
    const json& v = at(key);
    if (!v.is_array()) {
      throw ConfigError(child_path(key) + ": expected an array of numbers");
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) {
        throw ConfigError(child_path(key) + "[" + std::to_string(i) + "]: expected a number");
      }
      out.push_back(v[i].get<double>());
    }
    return out;
  }
  [[nodiscard]] std::vector<double> numbers(const std::string& key, std::vector<double> def) const
  {
    return has(key) ? numbers(key) : def;
  }

  template <std::size_t N>
  [[nodiscard]] std::array<double, N> fixed(const std::string& key) const
  {
    const auto v = numbers(key);
    if (v.size() != N) {
      throw ConfigError(child_path(key) + ": expected " + std::to_string(N) + " numbers");
    }
    std::array<double, N> out{};
    std::copy(v.begin(), v.end(), out.begin());
    return out;
  }

  [[nodiscard]] Vec3 vec3(const std::string& key) const
  {
    const auto a = fixed<3>(key);
    return {a[0], a[1], a[2]};
  }

  [[nodiscard]] std::vector<Node> objects(const std::string& key) const
  {
    std::vector<Node> out;
    if (!has(key)) {
      return out;
    }
    const json& v = at(key);
    if (!v.is_array()) {
      throw ConfigError(child_path(key) + ": expected an array of objects");
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
      out.emplace_back(v[i], child_path(key) + "[" + std::to_string(i) + "]");
    }
    return out;
  }

  /// Rejects keys outside `allowed` so that typos do not pass silently.
  void only(std::initializer_list<const char*> allowed) const
  {
    const std::set<std::string> keys(allowed.begin(), allowed.end());
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!keys.count(it.key())) {
        throw ConfigError(child_path(it.key()) + ": unknown field");
      }
    }
  }

  [[nodiscard]] const std::string& path() const { return path_; }

private:
  const json& j_;
  std::string path_;
};

int parse_axis(const Node& n, const std::string& key, int def, int max_axis)
{
  if (!n.has(key)) {
    return def;
  }
  const std::string s = n.string(key, "");
  if (s.size() == 1 && s[0] >= 'x' && s[0] <= 'z' && s[0] - 'x' <= max_axis) {
    return s[0] - 'x';
  }
  throw ConfigError(n.child_path(key) + ": expected one of " + std::string(max_axis == 1 ? "x, y" : "x, y, z"));
}

Panel parse_panel(const Node& n)
{
  n.only({"axis", "position", "lo", "hi"});
  Panel p;
  if (!n.has("axis")) {
    throw ConfigError(n.child_path("axis") + ": required field missing");
  }
  p.axis = parse_axis(n, "axis", 2, 2);
  p.position = n.number("position");
  p.lo = n.fixed<2>("lo");
  p.hi = n.fixed<2>("hi");
  return p;
}

LinerSpec parse_liner(const Node& n)
{
  n.only({"thickness", "sigma", "panels", "box", "holes"});
  LinerSpec l;
  l.thickness = n.number("thickness", l.thickness);
  l.sigma = n.number("sigma", l.sigma);
  for (const Node& p : n.objects("panels")) {
    l.panels.push_back(parse_panel(p));
  }
  if (n.has("box")) {
    const Node b = n.object("box");
    b.only({"min", "max"});
    const auto panels = open_box_panels(Box{b.vec3("min"), b.vec3("max")});
    l.panels.insert(l.panels.end(), panels.begin(), panels.end());
  }
  if (l.panels.empty()) {
    n.fail("a liner needs 'panels' or 'box'");
  }
  for (const Node& h : n.objects("holes")) {
    h.only({"center", "radius"});
    l.holes.push_back({h.vec3("center"), h.number("radius")});
  }
  try {
    l.validate();
  } catch (const InvalidGeometry& e) {
    n.fail(e.what());
  }
  return l;
}

MeshSettings parse_mesh(const Node& n, const std::filesystem::path& base)
{
  n.only({"cell_size", "electrode_cell_size", "electrode_margin", "hole_cell_size", "grading", "refinement",
          "required_planes", "file"});
  MeshSettings m;
  m.cell_size = n.number("cell_size", m.cell_size);
  m.electrode_cell_size = n.number("electrode_cell_size", m.electrode_cell_size);
  m.electrode_margin = n.number("electrode_margin", m.electrode_margin);
  m.hole_cell_size = n.number("hole_cell_size", m.hole_cell_size);
  m.grading = n.number("grading", m.grading);
  for (const Node& r : n.objects("refinement")) {
    r.only({"min", "max", "cell_size", "anchor"});
    RefinementRegion reg{Box{r.vec3("min"), r.vec3("max")}, r.number("cell_size"), std::nullopt};
    if (r.has("anchor")) {
      reg.anchor = r.vec3("anchor");
    }
    m.refinement.push_back(reg);
  }
  if (n.has("required_planes")) {
    const Node rp = n.object("required_planes");
    rp.only({"x", "y", "z"});
    m.required_planes[0] = rp.numbers("x", {});
    m.required_planes[1] = rp.numbers("y", {});
    m.required_planes[2] = rp.numbers("z", {});
  }
  if (n.has("file")) {
    const std::filesystem::path f = n.string("file", "");
    m.file = f.is_absolute() ? f : base / f;
  }
  if (!(m.cell_size > 0.0)) {
    throw ConfigError(n.child_path("cell_size") + ": must be positive");
  }
  if (m.electrode_cell_size < 0.0 || m.hole_cell_size < 0.0 || m.electrode_margin < 0.0) {
    n.fail("cell sizes and margins must not be negative");
  }
  if (!(m.grading > 0.0)) {
    throw ConfigError(n.child_path("grading") + ": must be positive");
  }
  return m;
}

SurveyConfig parse_survey(const Node& n)
{
  n.only({"center", "spacing", "axis", "current", "reciprocal", "measuring_exchange_scale", "electrode"});
  SurveyConfig s;
  const auto c = n.fixed<2>("center");
  s.center = Vec3(c[0], c[1], 0.0);
  s.spacing = n.number("spacing");
  s.axis = parse_axis(n, "axis", 0, 1);
  s.current = n.number("current", s.current);
  s.reciprocal = n.boolean("reciprocal", false);
  s.measuring_exchange_scale = n.number("measuring_exchange_scale", 1.0);
  if (n.has("electrode")) {
    const Node e = n.object("electrode");
    e.only({"radius", "length", "sigma", "skin", "segments"});
    s.electrode.radius = e.number("radius", s.electrode.radius);
    s.electrode.length = e.number("length", s.electrode.length);
    s.electrode.sigma = e.number("sigma", s.electrode.sigma);
    s.electrode.skin = e.number("skin", s.electrode.skin);
    s.electrode.segments = e.integer("segments", s.electrode.segments);
  }
  if (!(s.spacing > 0.0)) {
    throw ConfigError(n.child_path("spacing") + ": must be positive");
  }
  if (s.current == 0.0) {
    throw ConfigError(n.child_path("current") + ": must be non-zero");
  }
  return s;
}

template <class F>
auto with_path(const std::string& path, F&& f)
{
  try {
    return f();
  } catch (const Error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

} // namespace

struct RunConfig::Impl {
  json root;
};

RunConfig RunConfig::from_string(const std::string& text)
{
  RunConfig c;
  auto impl = std::make_shared<Impl>();
  try {
    impl->root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("<root>: invalid JSON: ") + e.what());
  }
  Node(impl->root, "").only({"name", "domain", "sigma", "resistivity", "mesh", "liner", "crop_below", "survey",
                             "scheme", "gauge", "explicit_mortars", "threads", "sweep", "analytic", "output"});
  c.impl_ = std::move(impl);
  return c;
}

RunConfig RunConfig::from_file(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot read configuration " + path.string());
  }
  std::stringstream ss;
  ss << in.rdbuf();
  RunConfig c = from_string(ss.str());
  c.base_dir_ = path.parent_path();
  return c;
}

ScenarioSpec RunConfig::scenario() const
{
  const Node root(impl_->root, "");
  ScenarioSpec s;
  s.name = root.string("name", "scenario");
  const Node d = root.object("domain");
  d.only({"min", "max"});
  s.domain = Box{d.vec3("min"), d.vec3("max")};
  if (!(s.domain.extents().array() > 0.0).all()) {
    d.fail("max must exceed min along every axis");
  }
  if (root.has("sigma") == root.has("resistivity")) {
    root.fail("give exactly one of 'sigma' (S/m) or 'resistivity' (Ohm m)");
  }
  s.sigma = root.has("sigma") ? root.number("sigma") : 1.0 / root.number("resistivity");
  if (!(s.sigma > 0.0) || !std::isfinite(s.sigma)) {
    root.fail("water conductivity must be positive");
  }
  if (root.has("mesh")) {
    s.mesh = parse_mesh(root.object("mesh"), base_dir_);
  }
  if (root.has("liner")) {
    s.liner = parse_liner(root.object("liner"));
  }
  if (root.has("crop_below")) {
    s.crop_below = root.number("crop_below");
  }
  s.survey = parse_survey(root.object("survey"));
  s.scheme = with_path("scheme", [&] { return parse_scheme(root.string("scheme", "mpfa")); });
  s.gauge = with_path("gauge", [&] { return parse_gauge(root.string("gauge", "pin")); });
  s.explicit_mortars = root.boolean("explicit_mortars", false);
  s.threads = root.integer("threads", 1);
  return s;
}

SweepConfig RunConfig::sweep() const
{
  const Node root(impl_->root, "");
  const Node n = root.object("sweep");
  SweepConfig c;
  const std::string type = n.string("type", "");
  if (type == "depth") {
    n.only({"type", "depths", "strategies"});
    c.kind = SweepConfig::Kind::Depth;
    c.depths = n.numbers("depths");
    if (n.has("strategies")) {
      const json& arr = n.at("strategies");
      if (!arr.is_array()) {
        throw ConfigError(n.child_path("strategies") + ": expected an array of strings");
      }
      c.strategies.clear();
      for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string p = n.child_path("strategies") + "[" + std::to_string(i) + "]";
        if (!arr[i].is_string()) {
          throw ConfigError(p + ": expected a string");
        }
        c.strategies.push_back(with_path(p, [&] { return parse_strategy(arr[i].get<std::string>()); }));
      }
    }
  } else if (type == "uncertainty") {
    n.only({"type", "mode", "water_level", "resistivity", "hole_radius", "shift_x", "shift_y", "samples", "seed",
            "snap", "bins"});
    c.kind = SweepConfig::Kind::Uncertainty;
    UncertaintySpec& u = c.uncertainty;
    const std::string mode = n.string("mode", "factorial");
    if (mode == "factorial") {
      u.mode = UncertaintySpec::Mode::Factorial;
    } else if (mode == "sampled") {
      u.mode = UncertaintySpec::Mode::Sampled;
    } else {
      throw ConfigError(n.child_path("mode") + ": expected factorial or sampled");
    }
    u.water_level = n.numbers("water_level", {0.0});
    u.resistivity = n.numbers("resistivity", {0.0});
    u.hole_radius = n.numbers("hole_radius", {0.0});
    u.shift_x = n.numbers("shift_x", {0.0});
    u.shift_y = n.numbers("shift_y", {0.0});
    u.samples = n.integer("samples", 0);
    u.seed = static_cast<std::uint64_t>(n.integer("seed", 1));
    u.snap = n.number("snap", u.snap);
    u.bins = n.integer("bins", u.bins);
    if (u.mode == UncertaintySpec::Mode::Sampled && u.samples < 0) {
      throw ConfigError(n.child_path("samples") + ": must not be negative");
    }
    if (u.bins < 1) {
      throw ConfigError(n.child_path("bins") + ": must be at least 1");
    }
  } else {
    throw ConfigError(n.child_path("type") + ": expected depth or uncertainty");
  }
  return c;
}

AnalyticConfig RunConfig::analytic() const
{
  const Node root(impl_->root, "");
  const Node n = root.object("analytic");
  n.only({"rho", "spacing", "depths"});
  AnalyticConfig a;
  a.rho = n.number("rho");
  a.spacing = n.number("spacing");
  a.depths = n.numbers("depths");
  if (!(a.rho > 0.0) || !(a.spacing > 0.0)) {
    n.fail("rho and spacing must be positive");
  }
  for (std::size_t i = 0; i < a.depths.size(); ++i) {
    if (!(a.depths[i] > 0.0)) {
      throw ConfigError(n.child_path("depths") + "[" + std::to_string(i) + "]: must be positive");
    }
  }
  return a;
}

OutputConfig RunConfig::output() const
{
  const Node root(impl_->root, "");
  OutputConfig o;
  if (!root.has("output")) {
    return o;
  }
  const Node n = root.object("output");
  n.only({"dir", "vtk"});
  o.dir = n.string("dir", o.dir.string());
  o.vtk = n.boolean("vtk", o.vtk);
  return o;
}

} // namespace mdres
