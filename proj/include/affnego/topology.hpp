#pragma once

#include <cstddef>
#include <map>
#include <utility>
#include <vector>

namespace affnego {

/// Undirected aged edges between neurons, keyed by (lower, higher) index.
class Topology {
 public:
  using Key = std::pair<std::size_t, std::size_t>;

  void connect(std::size_t a, std::size_t b, int age = 0);
  void disconnect(std::size_t a, std::size_t b);
  bool connected(std::size_t a, std::size_t b) const;
  int age(std::size_t a, std::size_t b) const;  // -1 when absent

  void age_edges_of(std::size_t n);
  std::vector<std::size_t> neighbors(std::size_t n) const;  // ascending
  std::size_t degree(std::size_t n) const;

  // Drops edges older than max_age.
  void prune_edges(int max_age);
  // Indices in [0, count) without any edge, ascending.
  std::vector<std::size_t> isolated(std::size_t count) const;
  // Removes all edges of n and shifts higher indices down by one.
  void remove_neuron(std::size_t n);

  int oldest() const;
  std::size_t size() const { return edges_.size(); }
  const std::map<Key, int>& edges() const { return edges_; }

 private:
  static Key key(std::size_t a, std::size_t b) { return a < b ? Key{a, b} : Key{b, a}; }
  std::map<Key, int> edges_;
};

}  // namespace affnego
