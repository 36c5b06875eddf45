#include "affnego/snapshot.hpp"

#include <fstream>

#include "affnego/errors.hpp"

namespace affnego {
namespace {

void expect_format(const Json& j, const char* format) {
  if (!j.is_object() || j.value("format", "") != format) {
    throw DomainError(std::string("snapshot: expected format '") + format + "'");
  }
  if (j.value("version", 0) != kSnapshotVersion) throw DomainError("snapshot: unsupported version");
}

Json edges_json(const Topology& t) {
  Json edges = Json::array();
  for (const auto& [k, age] : t.edges()) edges.push_back({{"a", k.first}, {"b", k.second}, {"age", age}});
  return edges;
}

std::vector<double> vec(const Json& j) { return j.get<std::vector<double>>(); }

}  // namespace

Json to_json(const GwrParams& p) {
  return {{"insertion_threshold", p.insertion_threshold},
          {"habituation_threshold", p.habituation_threshold},
          {"max_edge_age", p.max_edge_age},
          {"eps_b", p.eps_b},
          {"eps_n", p.eps_n},
          {"tau_b", p.tau_b},
          {"tau_n", p.tau_n},
          {"kappa", p.kappa},
          {"eta_floor", p.eta_floor}};
}

GwrParams gwr_params_from_json(const Json& j) {
  GwrParams p;
  p.insertion_threshold = j.at("insertion_threshold").get<double>();
  p.habituation_threshold = j.at("habituation_threshold").get<double>();
  p.max_edge_age = j.at("max_edge_age").get<int>();
  p.eps_b = j.at("eps_b").get<double>();
  p.eps_n = j.at("eps_n").get<double>();
  p.tau_b = j.at("tau_b").get<double>();
  p.tau_n = j.at("tau_n").get<double>();
  p.kappa = j.at("kappa").get<double>();
  p.eta_floor = j.at("eta_floor").get<double>();
  return p;
}

Json to_json(const GwrNetwork& net) {
  Json neurons = Json::array();
  for (std::size_t i = 0; i < net.size(); ++i) {
    const auto w = net.weight(i);
    neurons.push_back({{"w", std::vector<double>(w.begin(), w.end())}, {"eta", net.habituation(i)}});
  }
  return {{"format", "gwr"},
          {"version", kSnapshotVersion},
          {"dim", net.dim()},
          {"params", to_json(net.params())},
          {"neurons", neurons},
          {"edges", edges_json(net.topology())}};
}

GwrNetwork gwr_from_json(const Json& j) {
  expect_format(j, "gwr");
  try {
    GwrNetwork net(j.at("dim").get<std::size_t>(), gwr_params_from_json(j.at("params")));
    for (const auto& n : j.at("neurons")) net.add_neuron(vec(n.at("w")), n.at("eta").get<double>());
    for (const auto& e : j.at("edges")) {
      net.connect(e.at("a").get<std::size_t>(), e.at("b").get<std::size_t>(), e.at("age").get<int>());
    }
    return net;
  } catch (const Json::exception& e) {
    throw DomainError(std::string("snapshot: malformed gwr: ") + e.what());
  }
}

Json to_json(const GammaGwrNetwork& net) {
  const auto& p = net.params();
  Json neurons = Json::array();
  for (std::size_t i = 0; i < net.size(); ++i) {
    const auto w = net.weight(i);
    Json contexts = Json::array();
    for (std::size_t k = 1; k <= net.order(); ++k) {
      const auto c = net.context(i, k);
      contexts.push_back(std::vector<double>(c.begin(), c.end()));
    }
    neurons.push_back(
        {{"w", std::vector<double>(w.begin(), w.end())}, {"eta", net.habituation(i)}, {"contexts", contexts}});
  }
  Json global = Json::array();
  for (std::size_t k = 1; k <= net.order(); ++k) {
    const auto c = net.global_context(k);
    global.push_back(std::vector<double>(c.begin(), c.end()));
  }
  Json prev = net.prev_bmu() ? Json(*net.prev_bmu()) : Json(nullptr);
  return {{"format", "gamma-gwr"},
          {"version", kSnapshotVersion},
          {"dim", net.dim()},
          {"params", to_json(p.base)},
          {"K", p.context_order},
          {"alpha_w", p.alpha_w},
          {"alpha_k", p.alpha_k},
          {"beta", p.beta},
          {"neurons", neurons},
          {"edges", edges_json(net.topology())},
          {"global_contexts", global},
          {"prev_bmu", prev}};
}

GammaGwrNetwork gamma_gwr_from_json(const Json& j) {
  expect_format(j, "gamma-gwr");
  try {
    GammaGwrParams p;
    p.base = gwr_params_from_json(j.at("params"));
    p.context_order = j.at("K").get<std::size_t>();
    p.alpha_w = j.at("alpha_w").get<double>();
    p.alpha_k = vec(j.at("alpha_k"));
    p.beta = j.at("beta").get<double>();
    GammaGwrNetwork net(j.at("dim").get<std::size_t>(), p);
    for (const auto& n : j.at("neurons")) {
      const std::size_t i = net.add_neuron(vec(n.at("w")), n.at("eta").get<double>());
      const auto& contexts = n.at("contexts");
      if (contexts.size() != net.order()) throw DomainError("snapshot: neuron context count != K");
      for (std::size_t k = 1; k <= net.order(); ++k) net.set_context(i, k, vec(contexts[k - 1]));
    }
    for (const auto& e : j.at("edges")) {
      net.connect(e.at("a").get<std::size_t>(), e.at("b").get<std::size_t>(), e.at("age").get<int>());
    }
    const auto& global = j.at("global_contexts");
    if (global.size() != net.order()) throw DomainError("snapshot: global context count != K");
    for (std::size_t k = 1; k <= net.order(); ++k) net.set_global_context(k, vec(global[k - 1]));
    if (!j.at("prev_bmu").is_null()) net.set_prev_bmu(j.at("prev_bmu").get<std::size_t>());
    return net;
  } catch (const Json::exception& e) {
    throw DomainError(std::string("snapshot: malformed gamma-gwr: ") + e.what());
  }
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw DomainError("invalid JSON in " + path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace affnego
