"""Restricted Hartree-Fock with damped warm-up iterations and DIIS.

The core-Hamiltonian guess can sit on an aufbau-unstable saddle (e.g. the
sigma/pi ordering in N2); plain damped iterations escape such saddles before
DIIS is allowed to lock in, and convergence requires a small orbital-gradient
commutator, not just an energy plateau.
"""

import numpy as np


def rhf(s, hcore, eri, enuc, nelec, dm0=None, max_iter=400, conv=1e-11,
        warmup=30, damp=0.5):
    nocc = nelec // 2
    sval, svec = np.linalg.eigh(s)
    x = svec @ np.diag(sval ** -0.5) @ svec.T

    def fock_to_mo(f):
        e, cp = np.linalg.eigh(x.T @ f @ x)
        return e, x @ cp

    if dm0 is None:
        _, c = fock_to_mo(hcore)
        dm = 2 * c[:, :nocc] @ c[:, :nocc].T
        rng = np.random.default_rng(0)
        pert = rng.normal(0, 1e-4, s.shape)
        dm = dm + pert + pert.T  # seed any unstable saddle modes
    else:
        dm = dm0.copy()
        warmup = min(warmup, 5)

    errs, focks = [], []
    energy = 0.0
    moe = c = None
    for it in range(max_iter):
        j = np.einsum("pqrs,rs->pq", eri, dm, optimize=True)
        k = np.einsum("prqs,rs->pq", eri, dm, optimize=True)
        f = hcore + j - 0.5 * k
        err = f @ dm @ s - s @ dm @ f
        comm = np.linalg.norm(err)
        use_diis = it >= warmup
        if use_diis:
            errs.append(err)
            focks.append(f)
            if len(errs) > 8:
                errs.pop(0)
                focks.pop(0)
            if len(errs) > 1:
                m = len(errs)
                b = -np.ones((m + 1, m + 1))
                b[m, m] = 0.0
                for a in range(m):
                    for bb in range(m):
                        b[a, bb] = np.sum(errs[a] * errs[bb])
                rhs = np.zeros(m + 1)
                rhs[m] = -1.0
                try:
                    w = np.linalg.solve(b, rhs)
                    f = sum(w[a] * focks[a] for a in range(m))
                except np.linalg.LinAlgError:
                    pass
        moe, c = fock_to_mo(f)
        dm_new = 2 * c[:, :nocc] @ c[:, :nocc].T
        e_new = 0.5 * np.sum(dm_new * (hcore + f)) + enuc
        delta = abs(e_new - energy)
        energy = e_new
        if use_diis:
            dm = dm_new
            if delta < conv and comm < 1e-8:
                return energy, moe, c, dm
        else:
            dm = damp * dm + (1 - damp) * dm_new
    raise RuntimeError(
        f"SCF not converged after {max_iter} iterations (|comm|={comm:.2e})"
    )
