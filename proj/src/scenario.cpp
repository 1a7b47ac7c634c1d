#include "gridfreq/scenario.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "gridfreq/error.hpp"

namespace gridfreq {

namespace {

[[noreturn]] void parse_fail(const std::string& path, const std::string& msg,
                             const YAML::Mark& mark = YAML::Mark::null_mark()) {
  std::string where = mark.is_null() ? "" : "line " + std::to_string(mark.line + 1) + ": ";
  throw Error(ErrorKind::Parse, where + "field '" + path + "': " + msg);
}

YAML::Node require(const YAML::Node& parent, const std::string& key, const std::string& path) {
  const YAML::Node child = parent[key];
  if (!child) parse_fail(path, "missing", parent.Mark());
  return child;
}

template <typename T>
T as(const YAML::Node& node, const std::string& path) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception& e) {
    parse_fail(path, "wrong type", node.Mark());
  }
}

template <typename T>
T get_or(const YAML::Node& parent, const std::string& key, const std::string& path, T fallback) {
  const YAML::Node child = parent[key];
  return child ? as<T>(child, path) : fallback;
}

std::size_t node_index(const YAML::Node& node, const std::string& path, std::size_t n) {
  const long id = as<long>(node, path);
  if (id < 1 || static_cast<std::size_t>(id) > n) {
    throw Error(ErrorKind::Validation,
                path + ": node id " + std::to_string(id) + " out of range 1.." + std::to_string(n));
  }
  return static_cast<std::size_t>(id - 1);
}

Vec parse_vector(const YAML::Node& seq, const std::string& path, std::size_t n) {
  if (!seq.IsSequence()) parse_fail(path, "expected a list", seq.Mark());
  if (seq.size() != n) {
    throw Error(ErrorKind::Validation, path + ": expected " + std::to_string(n) + " entries");
  }
  Vec v(static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) {
    v[static_cast<Eigen::Index>(j)] = as<double>(seq[j], path + "[" + std::to_string(j) + "]");
  }
  return v;
}

GridSpec parse_grid(const YAML::Node& root) {
  const YAML::Node grid = require(root, "grid", "grid");
  const YAML::Node nodes = require(grid, "nodes", "grid.nodes");
  const YAML::Node lines = require(grid, "lines", "grid.lines");
  if (!nodes.IsSequence()) parse_fail("grid.nodes", "expected a list", nodes.Mark());
  if (!lines.IsSequence()) parse_fail("grid.lines", "expected a list", lines.Mark());

  std::vector<NodeParams> params;
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    const std::string path = "grid.nodes[" + std::to_string(j) + "]";
    const YAML::Node nd = nodes[j];
    if (nd["id"] && as<long>(nd["id"], path + ".id") != static_cast<long>(j + 1)) {
      throw Error(ErrorKind::Validation, path + ".id: nodes must be listed in id order 1..n");
    }
    NodeParams p;
    const auto kind = get_or<std::string>(nd, "kind", path + ".kind", "generator");
    if (kind == "generator") {
      p.kind = NodeKind::Generator;
      p.inertia = as<double>(require(nd, "inertia", path + ".inertia"), path + ".inertia");
    } else if (kind == "load") {
      p.kind = NodeKind::Load;
      p.inertia = get_or<double>(nd, "inertia", path + ".inertia", 0.0);
    } else {
      throw Error(ErrorKind::Validation, path + ".kind: expected generator or load");
    }
    p.damping = as<double>(require(nd, "damping", path + ".damping"), path + ".damping");
    p.power = as<double>(require(nd, "power", path + ".power"), path + ".power");
    p.cost = as<double>(require(nd, "cost", path + ".cost"), path + ".cost");
    params.push_back(p);
  }

  std::vector<LineSpec> specs;
  for (std::size_t l = 0; l < lines.size(); ++l) {
    const std::string path = "grid.lines[" + std::to_string(l) + "]";
    const YAML::Node ln = lines[l];
    if (ln["id"] && as<long>(ln["id"], path + ".id") != static_cast<long>(l + 1)) {
      throw Error(ErrorKind::Validation, path + ".id: lines must be listed in id order 1..m");
    }
    LineSpec s;
    s.from = node_index(require(ln, "from", path + ".from"), path + ".from", params.size());
    s.to = node_index(require(ln, "to", path + ".to"), path + ".to", params.size());
    s.susceptance = as<double>(require(ln, "susceptance", path + ".susceptance"),
                               path + ".susceptance");
    specs.push_back(s);
  }
  return GridSpec(std::move(params), std::move(specs));
}

std::vector<Perturbation> parse_perturbations(const YAML::Node& root, std::size_t n) {
  std::vector<Perturbation> out;
  const YAML::Node seq = root["perturbations"];
  if (!seq) return out;
  if (!seq.IsSequence()) parse_fail("perturbations", "expected a list", seq.Mark());
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const std::string path = "perturbations[" + std::to_string(i) + "]";
    Perturbation d;
    d.node = node_index(require(seq[i], "node", path + ".node"), path + ".node", n);
    d.delta_p = as<double>(require(seq[i], "delta_p", path + ".delta_p"), path + ".delta_p");
    d.at_time = get_or<double>(seq[i], "at_time", path + ".at_time", 0.0);
    if (!(d.at_time >= 0.0)) throw Error(ErrorKind::Validation, path + ".at_time must be >= 0");
    out.push_back(d);
  }
  return out;
}

ControllerSpec parse_controller(const YAML::Node& root, const GridSpec& grid) {
  ControllerSpec spec;
  const YAML::Node ctl = root["controller"];
  const Vec a = grid.cost_coefficients();
  spec.cost = CostModel::quadratic(a);
  if (!ctl) return spec;
  spec.kind = controller_kind_from_string(
      get_or<std::string>(ctl, "kind", "controller.kind", "decentralized"));
  spec.gain = get_or<double>(ctl, "h", "controller.h", 1.0);
  spec.delay = get_or<double>(ctl, "T", "controller.T", 0.0);
  if (const YAML::Node cost = ctl["cost"]) {
    const auto family = cost_family_from_string(
        get_or<std::string>(cost, "family", "controller.cost.family", "quadratic"));
    if (family == CostFamily::PowerLaw) {
      const double gamma = as<double>(require(cost, "gamma", "controller.cost.gamma"),
                                      "controller.cost.gamma");
      if (!(gamma >= 2.0)) {
        throw Error(ErrorKind::Validation, "controller.cost.gamma must be >= 2");
      }
      spec.cost = CostModel::power_law(a, gamma);
    } else if (family == CostFamily::Custom) {
      throw Error(ErrorKind::Validation, "custom costs cannot be loaded from a scenario file");
    }
  }
  if (const YAML::Node cap = ctl["capacity"]) {
    Capacity c;
    c.lower = parse_vector(require(cap, "lower", "controller.capacity.lower"),
                           "controller.capacity.lower", grid.num_nodes());
    c.upper = parse_vector(require(cap, "upper", "controller.capacity.upper"),
                           "controller.capacity.upper", grid.num_nodes());
    spec.capacity = std::move(c);
  }
  spec.validate(grid.num_nodes());
  return spec;
}

std::vector<CommLink> parse_pairs(const YAML::Node& seq, const std::string& path, std::size_t n) {
  if (!seq.IsSequence()) parse_fail(path, "expected a list of [i, j] pairs", seq.Mark());
  std::vector<CommLink> out;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const std::string item = path + "[" + std::to_string(i) + "]";
    if (!seq[i].IsSequence() || seq[i].size() != 2) parse_fail(item, "expected [i, j]", seq[i].Mark());
    out.push_back({node_index(seq[i][0], item, n), node_index(seq[i][1], item, n)});
  }
  return out;
}

CommGraph parse_comm(const YAML::Node& root, const GridSpec& grid) {
  const YAML::Node comm = root["comm"];
  CommGraph base = CommGraph::mirror(grid);
  if (!comm) return base;
  if (const YAML::Node links = comm["links"]) {
    base = CommGraph(grid.num_nodes(), parse_pairs(links, "comm.links", grid.num_nodes()));
  }
  std::vector<CommLink> failed;
  if (const YAML::Node f = comm["failed"]) {
    failed = parse_pairs(f, "comm.failed", grid.num_nodes());
  }
  if (const YAML::Node f = comm["failed_lines"]) {
    if (!f.IsSequence()) parse_fail("comm.failed_lines", "expected a list", f.Mark());
    for (std::size_t i = 0; i < f.size(); ++i) {
      const std::string path = "comm.failed_lines[" + std::to_string(i) + "]";
      const long id = as<long>(f[i], path);
      if (id < 1 || static_cast<std::size_t>(id) > grid.num_lines()) {
        throw Error(ErrorKind::Validation, path + ": line id out of range");
      }
      const auto& line = grid.lines()[static_cast<std::size_t>(id - 1)];
      failed.push_back({line.from, line.to});
    }
  }
  return base.with_failures(failed);
}

SimConfig parse_sim(const YAML::Node& root) {
  SimConfig sim;
  const YAML::Node s = root["sim"];
  if (!s) return sim;
  sim.dt = get_or<double>(s, "dt", "sim.dt", sim.dt);
  sim.t_max = get_or<double>(s, "t_max", "sim.t_max", sim.t_max);
  sim.steady_eps = get_or<double>(s, "steady_eps", "sim.steady_eps", sim.steady_eps);
  sim.sample_every = get_or<std::size_t>(s, "sample_every", "sim.sample_every", sim.sample_every);
  sim.steady_window = get_or<double>(s, "steady_window", "sim.steady_window", sim.steady_window);
  sim.validate();
  return sim;
}

std::string num(double x) {
  std::ostringstream out;
  out << std::setprecision(std::numeric_limits<double>::max_digits10) << x;
  return out.str();
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw Error(ErrorKind::Parse, "line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  if (!root.IsMap()) throw Error(ErrorKind::Parse, "scenario must be a mapping");

  try {
    GridSpec grid = parse_grid(root);
    const Vec p0 = grid.initial_power();
    if (std::abs(p0.sum()) > 1e-9 * std::max(1.0, p0.cwiseAbs().maxCoeff())) {
      throw Error(ErrorKind::Validation, "unbalanced initial power");
    }
    auto perturbations = parse_perturbations(root, grid.num_nodes());
    auto controller = parse_controller(root, grid);
    auto comm = parse_comm(root, grid);
    auto sim = parse_sim(root);
    return Scenario{get_or<std::string>(root, "name", "name", ""),
                    std::move(grid),
                    std::move(perturbations),
                    std::move(controller),
                    std::move(comm),
                    sim};
  } catch (const YAML::Exception& e) {
    throw Error(ErrorKind::Parse, "line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Parse || e.kind() == ErrorKind::Validation) throw;
    // NotConnected, WrongFamily, ... are invariant violations of the file.
    throw Error(ErrorKind::Validation, e.what());
  }
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Parse, "cannot open scenario file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

std::string write_scenario(const Scenario& s) {
  std::ostringstream out;
  std::string name;
  for (char ch : s.name) {
    if (ch == '"' || ch == '\\') name += '\\';
    name += ch;
  }
  out << "name: \"" << name << "\"\n";
  out << "grid:\n  nodes:\n";
  for (std::size_t j = 0; j < s.grid.num_nodes(); ++j) {
    const auto& nd = s.grid.nodes()[j];
    out << "    - {id: " << j + 1
        << ", kind: " << (nd.kind == NodeKind::Generator ? "generator" : "load")
        << ", inertia: " << num(nd.inertia) << ", damping: " << num(nd.damping)
        << ", power: " << num(nd.power) << ", cost: " << num(nd.cost) << "}\n";
  }
  out << "  lines:\n";
  for (std::size_t l = 0; l < s.grid.num_lines(); ++l) {
    const auto& ln = s.grid.lines()[l];
    out << "    - {id: " << l + 1 << ", from: " << ln.from + 1 << ", to: " << ln.to + 1
        << ", susceptance: " << num(ln.susceptance) << "}\n";
  }
  out << "perturbations:" << (s.perturbations.empty() ? " []\n" : "\n");
  for (const auto& d : s.perturbations) {
    out << "  - {node: " << d.node + 1 << ", delta_p: " << num(d.delta_p)
        << ", at_time: " << num(d.at_time) << "}\n";
  }
  const auto& c = s.controller;
  out << "controller:\n"
      << "  kind: " << to_string(c.kind) << "\n"
      << "  h: " << num(c.gain) << "\n"
      << "  T: " << num(c.delay) << "\n"
      << "  cost: {family: " << to_string(c.cost.family()) << ", gamma: " << num(c.cost.gamma())
      << "}\n";
  if (c.capacity) {
    auto list = [&](const Vec& v) {
      std::string text = "[";
      for (Eigen::Index j = 0; j < v.size(); ++j) text += (j ? ", " : "") + num(v[j]);
      return text + "]";
    };
    out << "  capacity:\n    lower: " << list(c.capacity->lower)
        << "\n    upper: " << list(c.capacity->upper) << "\n";
  }
  auto pairs = [](const std::vector<CommLink>& links) {
    std::string text = "[";
    for (std::size_t i = 0; i < links.size(); ++i) {
      text += (i ? ", [" : "[") + std::to_string(links[i].a + 1) + ", " +
              std::to_string(links[i].b + 1) + "]";
    }
    return text + "]";
  };
  out << "comm:\n  links: " << pairs(s.comm.links()) << "\n  failed: " << pairs(s.comm.failed())
      << "\n";
  out << "sim:\n"
      << "  dt: " << num(s.sim.dt) << "\n"
      << "  t_max: " << num(s.sim.t_max) << "\n"
      << "  steady_eps: " << num(s.sim.steady_eps) << "\n"
      << "  sample_every: " << s.sim.sample_every << "\n"
      << "  steady_window: " << num(s.sim.steady_window) << "\n";
  return out.str();
}

}  // namespace gridfreq
