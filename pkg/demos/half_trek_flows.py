"""Half-trek systems from max flow, checked against exhaustive search."""

from pathlib import Path

from trekid import brute_force_half_trek_system, build_flow_network, half_trek_system, max_flow, read_graph

G = read_graph(Path(__file__).parent / "data" / "six_vertex.graph")

net = build_flow_network(G, {3, 4}, 6)
result = max_flow(net)
print(f"flow value {result.value}, parents of 6: {sorted(G.parents(6))}")
for path in result.paths:
    print("  ", " -> ".join(map(str, path)))

system = half_trek_system(G, {3, 4}, 6)
print("half-treks:", ", ".join(str(h) for h in system))

# every allowed set for every vertex, flow against brute force
disagree = 0
for v in G.vertices:
    for mask in range(1 << G.n):
        A = {w for w in G.vertices if mask >> (w - 1) & 1}
        disagree += (half_trek_system(G, A, v) is not None) != brute_force_half_trek_system(G, A, v)
print("disagreements over all (A, v):", disagree)
