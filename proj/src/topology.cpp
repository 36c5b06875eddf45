#include "affnego/topology.hpp"

#include <algorithm>

#include "affnego/errors.hpp"

namespace affnego {

void Topology::connect(std::size_t a, std::size_t b, int age) {
  if (a == b) throw DomainError("topology: self edge");
  edges_[key(a, b)] = age;
}

void Topology::disconnect(std::size_t a, std::size_t b) { edges_.erase(key(a, b)); }

bool Topology::connected(std::size_t a, std::size_t b) const {
  return edges_.contains(key(a, b));
}

int Topology::age(std::size_t a, std::size_t b) const {
  const auto it = edges_.find(key(a, b));
  return it == edges_.end() ? -1 : it->second;
}

void Topology::age_edges_of(std::size_t n) {
  for (auto& [k, age] : edges_) {
    if (k.first == n || k.second == n) ++age;
  }
}

std::vector<std::size_t> Topology::neighbors(std::size_t n) const {
  std::vector<std::size_t> out;
  for (const auto& [k, age] : edges_) {
    if (k.first == n) out.push_back(k.second);
    else if (k.second == n) out.push_back(k.first);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t Topology::degree(std::size_t n) const {
  std::size_t d = 0;
  for (const auto& [k, age] : edges_) d += (k.first == n || k.second == n) ? 1 : 0;
  return d;
}

void Topology::prune_edges(int max_age) {
  std::erase_if(edges_, [max_age](const auto& e) { return e.second > max_age; });
}

std::vector<std::size_t> Topology::isolated(std::size_t count) const {
  std::vector<bool> seen(count, false);
  for (const auto& [k, age] : edges_) {
    if (k.first < count) seen[k.first] = true;
    if (k.second < count) seen[k.second] = true;
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < count; ++i) {
    if (!seen[i]) out.push_back(i);
  }
  return out;
}

void Topology::remove_neuron(std::size_t n) {
  std::map<Key, int> next;
  for (const auto& [k, age] : edges_) {
    if (k.first == n || k.second == n) continue;
    const std::size_t a = k.first > n ? k.first - 1 : k.first;
    const std::size_t b = k.second > n ? k.second - 1 : k.second;
    next[key(a, b)] = age;
  }
  edges_ = std::move(next);
}

int Topology::oldest() const {
  int m = 0;
  for (const auto& [k, age] : edges_) m = std::max(m, age);
  return m;
}

}  // namespace affnego
