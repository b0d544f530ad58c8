#include "hexcover/hamiltonian.hpp"

#include <algorithm>
#include <vector>

#include "hexcover/environment.hpp"

namespace hexcover {

namespace {

std::vector<int> ordered_candidates(const AoiGraph& g, const EnvState& s) {
  std::vector<std::pair<int, int>> keyed;
  for (int u : g.neighbors(s.current)) {
    if (!g.is_cell(u) || s.visited[u]) continue;
    int onward = 0;
    for (int w : g.neighbors(u)) onward += g.is_cell(w) && !s.visited[w] && w != u;
    keyed.emplace_back(onward, u);
  }
  std::sort(keyed.begin(), keyed.end());
  std::vector<int> out;
  out.reserve(keyed.size());
  for (auto [k, u] : keyed) out.push_back(u);
  return out;
}

}  // namespace

AuditResult audit_hamiltonian(const AoiGraph& g, std::uint64_t budget) {
  AuditResult result;
  const int n = g.cell_count();
  EnvState s = reset(g);

  struct Frame {
    std::vector<int> candidates;
    std::size_t next = 0;
  };
  std::vector<Frame> stack;
  std::vector<int> path;
  if (!deadend_check(s, g).dead_end) stack.push_back({ordered_candidates(g, s), 0});

  while (!stack.empty()) {
    Frame& top = stack.back();
    if (top.next == top.candidates.size()) {
      stack.pop_back();
      if (!path.empty()) {
        const int v = path.back();
        path.pop_back();
        s.visited[v] = 0;
        --s.visited_count;
        s.current = path.empty() ? g.base() : path.back();
      }
      continue;
    }
    const int v = top.candidates[top.next++];
    if (result.expansions >= budget) {
      result.outcome = AuditOutcome::BudgetExhausted;
      return result;
    }
    ++result.expansions;
    s.visited[v] = 1;
    ++s.visited_count;
    s.current = v;
    path.push_back(v);
    if (s.visited_count == n && g.adjacent(v, g.terminal())) {
      result.outcome = AuditOutcome::Hamiltonian;
      result.witness = path;
      return result;
    }
    if (s.visited_count < n && !deadend_check(s, g).dead_end) {
      stack.push_back({ordered_candidates(g, s), 0});
    } else {
      path.pop_back();
      s.visited[v] = 0;
      --s.visited_count;
      s.current = path.empty() ? g.base() : path.back();
    }
  }
  result.outcome = AuditOutcome::NotHamiltonian;
  return result;
}

}  // namespace hexcover
