"""A reduced version of the inconclusive-graph experiment, written to ./experiment_out."""

from trekid.sim import SimConfig, run_experiment, write_outputs

config = SimConfig(
    n_values=(6,),
    p_values=(0.1, 0.2, 0.3),
    q_values=(0.2, 0.6),
    target_count=20,
    master_seed=7,
    max_attempts=100_000,
)
result = run_experiment(config)
for r in result.records:
    print(f"n={r.n} p={r.p} q={r.q}: {r.generated} drawn, {r.inconclusive} inconclusive, a={r.a:.3f}")
for n, q, b in result.aggregate:
    print(f"b[{n}, {q}] = {b:.3f}")
print(write_outputs(result, "experiment_out"))
