"""Scratch: partial exponential prep + Grover identity checks."""
import math
import numpy as np

from qautocall import (
    QubitRegister, allocate, probability, Condition,
    prepare_exponential_full, prepare_exponential_partial, ExponentialPrepSpec,
    integrate_compare, integration_amplitude, bernoulli_circuit, build_grover,
    exact_amplitude,
)
from qautocall.loading import partial_exponential_prep_ops

print("== full prep n=2 a=ln2: want [1,2,4,8]/15 ==")
st = allocate(2)
prepare_exponential_full(st, QubitRegister(0, 2), math.log(2))
print(np.round(np.abs(st.amplitudes) ** 2, 12))

print("\n== partial n=2 a=ln2 [1,2]: want [0,1/3,2/3,0] ==")
st = allocate(2)
prepare_exponential_partial(st, QubitRegister(0, 2), ExponentialPrepSpec(2, math.log(2), 1, 2))
print(np.round(np.abs(st.amplitudes) ** 2, 12))

print("\n== partial n=3 a=0.7 [1,5] non-power-2, aux and no-aux ==")
for aux in (None, 3):
    n_q = 3 if aux is None else 4
    st = allocate(n_q)
    prepare_exponential_partial(st, QubitRegister(0, 3), ExponentialPrepSpec(3, 0.7, 1, 5), aux=aux)
    probs = np.abs(st.amplitudes) ** 2
    if aux is not None:
        aux1 = probability(st, Condition(((3, 1),)))
        probs = probs[:8] + probs[8:]
        print(f"aux={aux}: P(aux=1) = {aux1:.3e}")
    w = np.exp(0.7 * np.arange(1, 6)); w /= w.sum()
    expect = np.zeros(8); expect[1:6] = w
    print("  max dev:", np.abs(probs - expect).max())

print("\n== strategy A vs B fidelity on power-2 span [2,5] a=-0.4 ==")
stA = allocate(3); stB = allocate(3)
reg = QubitRegister(0, 3)
prepare_exponential_partial(stA, reg, ExponentialPrepSpec(3, -0.4, 2, 5), strategy="power2")
prepare_exponential_partial(stB, reg, ExponentialPrepSpec(3, -0.4, 2, 5), strategy="amplify")
fid = abs(np.vdot(stA.amplitudes, stB.amplitudes))
print("fidelity:", fid)

print("\n== tiny-share fallback: n=4, a=1.2, [0,2] ==")
st = allocate(4)
ops = partial_exponential_prep_ops(QubitRegister(0, 4), ExponentialPrepSpec(4, 1.2, 0, 2))
st.apply_all(ops)
probs = np.abs(st.amplitudes) ** 2
w = np.exp(1.2 * np.arange(3)); w /= w.sum()
expect = np.zeros(16); expect[:3] = w
print("max dev:", np.abs(probs - expect).max(), " n_ops:", len(ops))

print("\n== integrate_compare vs closed form (n=3, a=-0.3, full) ==")
n = 3
worst = 0.0
for x in range(2**n):
    st = allocate(2 * n + 1)
    r_reg, x_reg, t = QubitRegister(0, n), QubitRegister(n, n), 2 * n
    prepare_exponential_full(st, r_reg, -0.3)
    # put x register in basis state x
    from qautocall import X
    for j in range(n):
        if (x >> j) & 1:
            st.apply(X(x_reg.qubit(j)))
    integrate_compare(st, r_reg, x_reg, t)
    amp = math.sqrt(probability(st, Condition(((t, 1),))))
    want = integration_amplitude(-0.3, x, 0, 2**n - 1)
    worst = max(worst, abs(amp - want))
print("worst dev:", worst)

print("\n== Grover rotation identity ==")
for a in (0.1, 0.25, 0.5, 0.9):
    ops, nq, good = bernoulli_circuit(a)
    grover = build_grover(ops, nq, good)
    st = allocate(nq); st.apply_all(ops)
    theta = math.asin(math.sqrt(a))
    devs = []
    for j in range(1, 9):
        st.apply_all(grover)
        want = math.sin((2 * j + 1) * theta) ** 2
        devs.append(abs(probability(st, good) - want))
    print(f"a={a}: max dev over j<=8: {max(devs):.2e}")
