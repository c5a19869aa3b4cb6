"""Secondary-structure priors from backbone angles, and back again.

Reads a small NetSurfP-like table, cleans it, then shows how the
Ramachandran model turns (phi, psi) into SS3 and SS8 distributions.

Run:  python demos/priors_and_rama.py
"""
import math

import numpy as np

from fusionrank import expand_ss8, induce_ss3, marginalize_ss8, parse_priors, sanitize, serialize_priors

HEADER = "id\tresidue\t" + "\t".join(f"ss8_{k}" for k in "HGIEBTSL") + "\tss3_H\tss3_E\tss3_C\trsa\tphi\tpsi"
ROWS = [
    # A helical residue, a strand residue, and one with missing angles.
    "1\tA\t0.80\t0.05\t0.00\t0.05\t0.00\t0.05\t0.05\t0.00\t0.90\t0.05\t0.05\t0.4\t-63\t-42",
    "2\tV\t0.02\t0.00\t0.00\t0.85\t0.05\t0.03\t0.02\t0.03\t0.02\t0.90\t0.08\t0.1\t-120\t130",
    "3\tG\t0.05\t0.05\t0.00\t0.05\t0.00\t0.30\t0.25\t0.30\t0.10\t0.05\t0.85\t0.9\tNA\tNA",
]
priors = sanitize(parse_priors("\n".join([HEADER, *ROWS]) + "\n"))
print("sequence:", priors.sequence)
print("phi (rad):", np.round(priors.phi, 3))
print("rsa:", priors.rsa)

# Ramachandran-induced SS3 for canonical regions.
angles = {"alpha helix": (-63, -42), "beta strand": (-120, 130), "left-handed": (60, 45)}
for name, (phi, psi) in angles.items():
    p = induce_ss3(math.radians(phi), math.radians(psi))
    print(f"{name:12s} H={p[0]:.3f} E={p[1]:.3f} C={p[2]:.3f}")

# SS8 expansion keeps the SS3 marginals exactly.
p3 = priors.ss3
p8 = expand_ss8(p3)
print("marginal error after expand/marginalise:", np.abs(marginalize_ss8(p8) - p3).max())

print()
print(serialize_priors(priors), end="")
