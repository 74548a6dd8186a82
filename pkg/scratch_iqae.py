"""Scratch: IQAE coverage / width / call scaling."""
import numpy as np

from qautocall import IqaeConfig, bernoulli_circuit, iqae_estimate

for a in (0.1, 0.3, 0.7):
    ops, nq, good = bernoulli_circuit(a)
    hits = 0
    widths = []
    calls = []
    n_trials = 200
    for seed in range(n_trials):
        res = iqae_estimate(ops, nq, good, IqaeConfig(epsilon=0.01, alpha=0.05, seed=seed))
        assert res.converged
        hits += res.ci[0] - 1e-12 <= a <= res.ci[1] + 1e-12
        widths.append(res.ci[1] - res.ci[0])
        calls.append(res.oracle_calls)
    print(f"a={a}: coverage={hits/n_trials:.3f} max_width={max(widths):.4f} "
          f"mean_calls={np.mean(calls):.0f}")

print("\nscaling at a=0.3:")
scaled = {}
for eps in (0.04, 0.02, 0.01):
    calls = []
    for seed in range(30):
        ops, nq, good = bernoulli_circuit(0.3)
        res = iqae_estimate(ops, nq, good, IqaeConfig(epsilon=eps, alpha=0.05, seed=seed))
        calls.append(res.oracle_calls)
    scaled[eps] = np.mean(calls)
    print(f"eps={eps}: mean_calls={scaled[eps]:.1f}  calls*eps={scaled[eps]*eps:.2f}")
vals = [scaled[e] * e for e in scaled]
print("max/min of calls*eps:", max(vals) / min(vals))

print("\nhalving check (0.02 -> 0.01):", scaled[0.01] / scaled[0.02])
print("\ndeterminism:", end=" ")
ops, nq, good = bernoulli_circuit(0.3)
r1 = iqae_estimate(ops, nq, good, IqaeConfig(epsilon=0.01, alpha=0.05, seed=7))
r2 = iqae_estimate(ops, nq, good, IqaeConfig(epsilon=0.01, alpha=0.05, seed=7))
print(r1 == r2)

print("a=0 case:", iqae_estimate(*bernoulli_circuit(0.0), IqaeConfig(epsilon=0.01, alpha=0.05, seed=3)))
print("a=1 case:", iqae_estimate(*bernoulli_circuit(1.0), IqaeConfig(epsilon=0.01, alpha=0.05, seed=3)))
