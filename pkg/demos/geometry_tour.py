"""Virtual CA torsions and rigid superposition on a small helix-like trace.

Run:  python demos/geometry_tour.py
"""
import numpy as np
from scipy.spatial.transform import Rotation

from fusionrank import Conformation, kabsch_rmsd, virtual_dihedrals

# A CA trace wound around a helix: 3.8 A steps, 100 degrees per residue.
t = np.radians(100.0) * np.arange(10)
coords = np.column_stack([2.3 * np.cos(t), 2.3 * np.sin(t), 1.5 * np.arange(10)])
helix = Conformation("helix", "MKLAEVLKKA", coords, energy_q=0.0)

trace = virtual_dihedrals(helix)
print("phi (deg):", np.round(np.degrees(trace.phi), 1))
print("psi (deg):", np.round(np.degrees(trace.psi), 1))
print("defined:  ", int(trace.phi_mask.sum()), "phi and", int(trace.psi_mask.sum()), "psi values")

# Rigid motion leaves the torsions untouched.
moved = coords @ Rotation.random(random_state=1).as_matrix().T + [4.0, -2.0, 7.0]
again = virtual_dihedrals(Conformation("moved", helix.sequence, moved, 0.0))
print("max torsion change after rotation:", np.nanmax(np.abs(again.phi - trace.phi)))

# Kabsch removes the motion; a small perturbation leaves a small residual.
noisy = moved + np.random.default_rng(0).normal(scale=0.3, size=moved.shape)
print("RMSD to rotated copy: %.2e A" % kabsch_rmsd(helix, Conformation("m", helix.sequence, moved, 0.0)))
print("RMSD to noisy copy:   %.3f A" % kabsch_rmsd(helix, Conformation("n", helix.sequence, noisy, 0.0)))
