"""Explore quantization-convention variants for the convergence criterion."""
import itertools
import math

import numpy as np

CONTRACT = dict(V=18.0, dt=1.0, T=3, mu=0.1274, sigma=0.2382, rate=0.04,
                b=0.7, K=1.0, binaries=[(1, 1.1, 2.0), (2, 1.1, 5.0)])


def grid_points(k, s_min=3.0):
    ds = 2 * s_min / (2**k - 1)
    return -s_min + ds * np.arange(2**k)


def grid_probs(k, s_min=3.0):
    x = grid_points(k, s_min)
    pdf = np.exp(-0.5 * x * x)
    return pdf / pdf.sum()


def rnd(x, mode):
    if mode == "round":
        return round(x)
    if mode == "floor":
        return math.floor(x)
    if mode == "ceil":
        return math.ceil(x)
    raise ValueError(mode)


def cf_disc(k):
    c = CONTRACT
    pts, pr = grid_points(k), grid_probs(k)
    incs = c["mu"] * c["dt"] + c["sigma"] * math.sqrt(c["dt"]) * pts
    total = 0.0
    for path in itertools.product(range(2**k), repeat=c["T"]):
        l = np.cumsum([incs[g] for g in path])
        r = np.exp(l)
        w = np.prod([pr[g] for g in path])
        pay = 0.0
        for (s, kk, f) in c["binaries"]:
            if r[s - 1] > kk:
                pay = f * math.exp(-c["rate"] * s * c["dt"])
                break
        else:
            if (r < c["b"]).any() and r[-1] < c["K"]:
                pay = c["V"] * (r[-1] - c["K"]) * math.exp(-c["rate"] * c["T"] * c["dt"])
        total += w * pay
    return total


def cf_quant(k, p, thr_mode="round", inc_mode="round", put="exact"):
    c = CONTRACT
    pts, pr = grid_points(k), grid_probs(k)
    scale2p = 2**p
    a = 2.0**-p
    inc_codes = [rnd((c["mu"] * c["dt"] + c["sigma"] * math.sqrt(c["dt"]) * x) * scale2p, inc_mode)
                 for x in pts]
    thr_b = rnd(math.log(c["b"]) * scale2p, thr_mode)
    thr_bin = [rnd(math.log(kk) * scale2p, thr_mode) for (_, kk, _) in c["binaries"]]
    thr_K = rnd(math.log(c["K"]) * scale2p, thr_mode)
    l_min = c["T"] * min(inc_codes)
    r_min = math.exp(l_min * a)
    disc_T = math.exp(-c["rate"] * c["T"] * c["dt"])
    f_disc = [f * math.exp(-c["rate"] * s * c["dt"]) for (s, kk, f) in c["binaries"]]
    f_max = max(f_disc)
    p_min = min(0.0, (r_min - c["K"]) * c["V"] * disc_T)
    R = f_max - p_min

    def put_level(v):
        if put == "exact":
            # amplitude^2 = (r_v - r_min)/(r_{K-1} - r_min), scale to e^{-rT}V(...)/R
            r_v = math.exp(v * a)
            r_top = math.exp((thr_K - 1) * a)
            if r_top <= r_min:
                return 0.0
            return disc_T * c["V"] * (r_v - r_min) / R
        else:  # biased: integration includes r = x
            r_v = math.exp((v + 1) * a)
            return disc_T * c["V"] * (r_v - r_min) / R

    total = 0.0
    for path in itertools.product(range(2**k), repeat=c["T"]):
        v = np.cumsum([inc_codes[g] for g in path])
        w = np.prod([pr[g] for g in path])
        level = None
        for i, (s, kk, f) in enumerate(c["binaries"]):
            if v[s - 1] > thr_bin[i]:
                level = (f_disc[i] - p_min) / R
                break
        if level is None:
            if (v < thr_b).any() and v[-1] < thr_K:
                level = put_level(v[-1])
            else:
                level = -p_min / R
        total += w * level
    return total * R + p_min


for thr_mode in ("round", "floor", "ceil"):
    for put in ("exact", "biased"):
        print(f"=== thresholds={thr_mode} put={put} ===")
        ok_all = True
        for k in (1, 2):
            ref = cf_disc(k)
            diffs = []
            for p in range(2, 7):
                diffs.append(abs(cf_quant(k, p, thr_mode=thr_mode, put=put) - ref))
            mono = all(diffs[i + 1] <= diffs[i] + 1e-15 for i in range(len(diffs) - 1))
            rel = diffs[-1] / abs(ref)
            ok = mono and rel <= 0.01
            ok_all &= ok
            print(f"  k={k} ref={ref:+.6f} diffs=" +
                  " ".join(f"{d:.5f}" for d in diffs) +
                  f" mono={mono} rel6={rel:.3%} {'OK' if ok else 'FAIL'}")
        print(f"  ==> {'PASS' if ok_all else 'FAIL'}")
