"""Why these games tolerate losses and sloppy devices.

Two facts make the construction practical.  First, uniform detection
losses only rescale the all-ones probabilities, so the game value shrinks
toward zero but never changes sign: a violation survives inefficiency.
Second, arbitrary pre-measurement operations (including state-dependent
losses) composed into an unentangled strategy still cannot produce a
negative value, so there is no detection loophole to exploit.
"""

import numpy as np

from mdiw import (
    apply_pre_measurement_map,
    apply_uniform_loss,
    fast_entangled_table,
    mdi_value,
    random_kraus_set,
    random_separable_strategy,
    simulate_separable,
    tetrahedron_beta,
    werner_state,
    SeparableStrategy,
)

dec = tetrahedron_beta()
table = fast_entangled_table(werner_state(1.0), dec.ensembles)
base = mdi_value(dec, table)
print(f"Lossless game value on the singlet: I = {base:+.6f}")

print("\nUniform losses rescale I by eta_A * eta_B:")
print(f"{'eta_A':>6} {'eta_B':>6} {'I':>12} {'eta_A*eta_B*I':>14}")
for eta_a in (0.9, 0.5, 0.1):
    for eta_b in (0.8, 0.3):
        lossy = mdi_value(dec, apply_uniform_loss(table, (eta_a, eta_b)))
        print(f"{eta_a:6.2f} {eta_b:6.2f} {lossy:12.8f} {eta_a * eta_b * base:14.8f}")
print("Still negative every time: the verdict survives inefficiency.")

print("\nRandom lossy operations in front of unentangled measurements:")
rng = np.random.default_rng(7)
worst = np.inf
for _ in range(2000):
    strategy = random_separable_strategy((2, 2), 2, int(rng.integers(1, 4)), rng)
    noisy_povms = []
    for povm in strategy.measurements:
        kraus = random_kraus_set(povm.element(1).shape[0], int(rng.integers(1, 4)), rng)
        noisy_povms.append(apply_pre_measurement_map(povm, kraus))
    noisy = SeparableStrategy(strategy.weights, strategy.share_states, tuple(noisy_povms))
    worst = min(worst, mdi_value(dec, simulate_separable(noisy, dec.ensembles)))
print(f"minimum over 2000 sabotaged unentangled strategies: {worst:.3e}")
print("Never below zero: losses cannot fake entanglement.")
