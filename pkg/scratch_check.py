"""Scratch validation before freezing tests (not part of the package)."""
import math
import time

import numpy as np

from qautocall import (
    AutocallableContract, BinaryOption, GaussianGridSpec,
    build_pricing_circuit, fit_format, post_process, exact_amplitude,
    closed_form_quantized, closed_form_discretized, mc_price, mc_price_discretized,
)

TABLE2 = AutocallableContract(
    notional=18.0, dt=1.0, steps=3, mu=0.1274, sigma=0.2382, rate=0.04,
    barrier=0.7, strike=1.0,
    binaries=(BinaryOption(1, 1.1, 2.0), BinaryOption(2, 1.1, 5.0)),
)

print("== circuit vs quantized oracle ==")
for p, k in [(2, 1), (3, 1), (4, 1), (2, 2), (3, 2), (4, 2)]:
    grid = GaussianGridSpec(k=k, s_min=3.0)
    fmt = fit_format(TABLE2, grid, p)
    t0 = time.time()
    try:
        pc = build_pricing_circuit(TABLE2, grid, fmt, budget=24)
    except Exception as e:
        print(f"p={p} k={k}: {type(e).__name__}: {e}")
        continue
    a = exact_amplitude(pc.ops, pc.layout.num_qubits, pc.good)
    circ_val = post_process(a, pc.mapping)
    oracle_val = closed_form_quantized(TABLE2, grid, fmt)
    dt = time.time() - t0
    print(f"p={p} k={k}: qubits={pc.layout.num_qubits} m={fmt.width} "
          f"circuit={circ_val:.12f} oracle={oracle_val:.12f} "
          f"diff={abs(circ_val-oracle_val):.2e}  [{dt:.1f}s]")

print("\n== cf-quant convergence toward cf-disc (criterion 3) ==")
for k in (1, 2):
    grid = GaussianGridSpec(k=k, s_min=3.0)
    cf = closed_form_discretized(TABLE2, grid)
    print(f"k={k}: cf-disc = {cf:.8f}")
    prev = None
    for p in range(2, 13):
        fmt = fit_format(TABLE2, grid, p)
        cq = closed_form_quantized(TABLE2, grid, fmt)
        d = abs(cq - cf)
        marker = ""
        if prev is not None and d > prev + 1e-15:
            marker = "  <-- NOT non-increasing"
        print(f"  p={p}: cf-quant = {cq:.8f}  |diff| = {d:.6f}{marker}")
        prev = d
    fmt6 = fit_format(TABLE2, grid, 6)
    rel = abs(closed_form_quantized(TABLE2, grid, fmt6) - cf) / abs(cf)
    print(f"  p=6 relative error = {rel:.4%}")

print("\n== sigma=0 degenerate ==")
degen = AutocallableContract(
    notional=18.0, dt=1.0, steps=3, mu=0.1274, sigma=0.0, rate=0.04,
    barrier=0.7, strike=1.0,
    binaries=(BinaryOption(1, 1.1, 2.0), BinaryOption(2, 1.1, 5.0)),
)
expected = 2.0 * math.exp(-0.04)
grid = GaussianGridSpec(k=1, s_min=3.0)
fmt = fit_format(degen, grid, 2)
pc = build_pricing_circuit(degen, grid, fmt)
a = exact_amplitude(pc.ops, pc.layout.num_qubits, pc.good)
print("expected", expected)
print("circuit ", post_process(a, pc.mapping), " qubits:", pc.layout.num_qubits)
print("cf-quant", closed_form_quantized(degen, grid, fmt))
print("cf-disc ", closed_form_discretized(degen, grid))
print("mc      ", mc_price(degen, 1000, 1).mean)
print("mc-disc ", mc_price_discretized(degen, grid, 1000, 1).mean)

print("\n== MC sanity (criterion 4 preview) ==")
for k in (1, 2, 3):
    grid = GaussianGridSpec(k=k, s_min=3.0)
    cf = closed_form_discretized(TABLE2, grid)
    mcd = mc_price_discretized(TABLE2, grid, 10**6, 12345)
    pull = abs(mcd.mean - cf) / mcd.stderr
    print(f"k={k}: cf-disc={cf:.6f} mc-disc={mcd.mean:.6f}+-{mcd.stderr:.6f} pull={pull:.2f}")
grid8 = GaussianGridSpec(k=8, s_min=3.0)
mc8 = mc_price_discretized(TABLE2, grid8, 10**6, 777)
mcc = mc_price(TABLE2, 10**6, 778)
comb = math.hypot(mc8.stderr, mcc.stderr)
print(f"k=8 mc-disc={mc8.mean:.6f}+-{mc8.stderr:.6f} vs mc={mcc.mean:.6f}+-{mcc.stderr:.6f} "
      f"pull={(abs(mc8.mean-mcc.mean)/comb):.2f}")
