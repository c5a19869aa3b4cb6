"""Exhaustive search versus simulated annealing on the cubic lattice.

Run:  python demos/surrogate_folding.py
"""
import time

from fusionrank import Schedule, anneal, enumerate_exhaustive

for seq in ("WYLIKM", "MFLIVWAK"):
    t0 = time.perf_counter()
    exact = enumerate_exhaustive(seq, top_n=3)
    t_exact = time.perf_counter() - t0
    print(f"{seq}: exhaustive minimum {exact.energies[0]:.2f} ({exact.moves[0]}) in {t_exact:.2f} s")

    hits = 0
    t0 = time.perf_counter()
    for seed in range(20):
        run = anneal(seq, schedule=Schedule(5.0, 0.1, 15000), rng_seed=seed)
        hits += abs(run.energies[0] - exact.energies[0]) < 1e-9
    print(f"  annealing reached it in {hits}/20 runs, {time.perf_counter() - t0:.2f} s total")

run = anneal("MFLIVWAK", rng_seed=0)
step = max(1, len(run.trace) // 10)
print(f"\n{len(run.trace) - 1} accepted moves; energy after every {step}th:")
print(" ", [round(e, 2) for e in run.trace[::step]])
