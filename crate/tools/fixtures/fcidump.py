"""MO transformation and Molpro-style FCIDUMP output."""

import gzip
import numpy as np


def mo_integrals(hcore, eri, c):
    h_mo = c.T @ hcore @ c
    g = np.einsum("pqrs,pi->iqrs", eri, c, optimize=True)
    g = np.einsum("iqrs,qj->ijrs", g, c, optimize=True)
    g = np.einsum("ijrs,rk->ijks", g, c, optimize=True)
    g = np.einsum("ijks,sl->ijkl", g, c, optimize=True)
    return h_mo, g


def write_fcidump(path, h_mo, g_mo, ecore, nelec, ms2=0, tol=1e-12):
    norb = h_mo.shape[0]
    opener = gzip.open if str(path).endswith(".gz") else open
    with opener(path, "wt") as f:
        f.write(f"&FCI NORB={norb},NELEC={nelec},MS2={ms2},\n")
        f.write("  ORBSYM=" + "1," * norb + "\n")
        f.write("  ISYM=1,\n&END\n")
        # chemists' notation (ij|kl); 8-fold unique records
        for i in range(norb):
            for j in range(i + 1):
                ij = i * (i + 1) // 2 + j
                for k in range(i + 1):
                    for l in range(k + 1):
                        kl = k * (k + 1) // 2 + l
                        if kl > ij:
                            continue
                        v = g_mo[i, j, k, l]
                        if abs(v) > tol:
                            f.write(
                                f"{v:23.16E} {i+1:4d} {j+1:4d} {k+1:4d} {l+1:4d}\n"
                            )
        for i in range(norb):
            for j in range(i + 1):
                v = h_mo[i, j]
                if abs(v) > tol:
                    f.write(f"{v:23.16E} {i+1:4d} {j+1:4d}    0    0\n")
        f.write(f"{ecore:23.16E}    0    0    0    0\n")
