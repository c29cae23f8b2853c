"""Generate FCIDUMP fixtures: H2/STO-3G, H4 square/STO-3G, N2/cc-pVDZ scan."""

import os
import sys
import numpy as np

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from basis import H_STO3G, N_CCPVDZ, build_shells
from fcidump import mo_integrals, write_fcidump
from integrals import Molecule
from rhf import rhf

ANG = 1.8897259886  # bohr per angstrom
OUT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "..", "fixtures")


def run(atoms, shells, nelec, dm0=None):
    mol = Molecule(atoms, shells)
    s, hcore = mol.one_electron()
    eri = mol.two_electron()
    enuc = mol.nuclear_repulsion()
    e, moe, c, dm = rhf(s, hcore, eri, enuc, nelec, dm0=dm0)
    return mol, e, moe, c, dm, hcore, eri, enuc


def h2(r_ang=0.7414):
    atoms = [(1, (0.0, 0.0, 0.0)), (1, (0.0, 0.0, r_ang * ANG))]
    shells = [s for _, xyz in atoms for s in build_shells(H_STO3G, xyz)]
    mol, e, moe, c, dm, hcore, eri, enuc = run(atoms, shells, 2)
    print(f"H2  R={r_ang:.4f} A   E_RHF = {e:.8f}")
    h_mo, g_mo = mo_integrals(hcore, eri, c)
    write_fcidump(os.path.join(OUT, "h2_sto3g.fcidump"), h_mo, g_mo, enuc, 2)


def h4(side_ang=1.23):
    d = side_ang * ANG
    atoms = [(1, (0.0, 0.0, 0.0)), (1, (d, 0.0, 0.0)),
             (1, (0.0, d, 0.0)), (1, (d, d, 0.0))]
    shells = [s for _, xyz in atoms for s in build_shells(H_STO3G, xyz)]
    mol, e, moe, c, dm, hcore, eri, enuc = run(atoms, shells, 4)
    print(f"H4  a={side_ang:.2f} A   E_RHF = {e:.8f}")
    h_mo, g_mo = mo_integrals(hcore, eri, c)
    write_fcidump(os.path.join(OUT, "h4_sto3g.fcidump"), h_mo, g_mo, enuc, 4)


def n2_scan():
    dm0 = None
    for r10 in range(8, 29):
        r_ang = r10 / 10.0
        atoms = [(7, (0.0, 0.0, 0.0)), (7, (0.0, 0.0, r_ang * ANG))]
        shells = [s for _, xyz in atoms for s in build_shells(N_CCPVDZ, xyz)]
        mol, e, moe, c, dm, hcore, eri, enuc = run(atoms, shells, 14, dm0=dm0)
        dm0 = dm  # continuation guess along the scan
        print(f"N2  R={r_ang:.1f} A   E_RHF = {e:.8f}", flush=True)
        h_mo, g_mo = mo_integrals(hcore, eri, c)
        write_fcidump(
            os.path.join(OUT, f"n2_ccpvdz_r{r10:02d}.fcidump.gz"),
            h_mo, g_mo, enuc, 14,
        )


if __name__ == "__main__":
    os.makedirs(OUT, exist_ok=True)
    which = sys.argv[1] if len(sys.argv) > 1 else "all"
    if which in ("all", "h2"):
        h2()
    if which in ("all", "h4"):
        h4()
    if which in ("all", "n2"):
        n2_scan()
