"""Covariance map, trek rule, parameter recovery and Jacobian rank on small graphs."""

import numpy as np

from trekid import (
    MixedGraph,
    covariance,
    htc_identifiable,
    jacobian_rank,
    recover_parameters,
    sample_parameters,
    trek_rule_covariance,
)
from trekid.numeric import enumerate_treks

rng = np.random.default_rng(0)

chain = MixedGraph(3, frozenset({(1, 2), (2, 3)}), frozenset())
print("treks from 3 to 3 in 1 -> 2 -> 3:", [str(t) for t in enumerate_treks(chain, 3, 3)])

G = MixedGraph(4, frozenset({(1, 2), (2, 3), (3, 4)}), frozenset({(1, 3), (2, 4)}))
params = sample_parameters(G, rng)
Sigma = covariance(params)
print("trek rule vs matrix formula:", np.abs(trek_rule_covariance(G, params) - Sigma).max())

cert = htc_identifiable(G).certificate
rec = recover_parameters(G, Sigma, cert)
print("recovered Lambda error:", np.abs(rec.Lambda - params.Lambda).max())
print("recovered Omega error:", np.abs(rec.Omega - params.Omega).max())

bow = MixedGraph(2, frozenset({(1, 2)}), frozenset({(1, 2)}))
r = jacobian_rank(bow, sample_parameters(bow, rng))
print(f"bow: rank {r.rank} with {r.n_params} parameters and {r.target_dim} covariance entries")
r = jacobian_rank(G, params)
print(f"four-vertex graph: rank {r.rank} of {r.n_params}")
