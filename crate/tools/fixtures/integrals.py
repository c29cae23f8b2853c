"""Gaussian-basis molecular integrals via McMurchie-Davidson recursion.

One-electron integrals are evaluated in plain numpy/scipy; the two-electron
tensor is built over primitive cartesian Gaussians with a numba kernel and
contracted afterwards. d shells are transformed to the 5 spherical
components before the SCF stage.
"""

import numpy as np
from numba import njit
from scipy.special import gammainc, gamma


def boys(n, x):
    if x < 1e-13:
        return 1.0 / (2 * n + 1)
    return gammainc(n + 0.5, x) * gamma(n + 0.5) / (2.0 * x ** (n + 0.5))


def hermite_e(i, j, t, qx, a, b):
    p = a + b
    q = a * b / p
    if t < 0 or t > i + j:
        return 0.0
    if i == j == t == 0:
        return np.exp(-q * qx * qx)
    if j == 0:
        return (
            hermite_e(i - 1, j, t - 1, qx, a, b) / (2 * p)
            - q * qx / a * hermite_e(i - 1, j, t, qx, a, b)
            + (t + 1) * hermite_e(i - 1, j, t + 1, qx, a, b)
        )
    return (
        hermite_e(i, j - 1, t - 1, qx, a, b) / (2 * p)
        + q * qx / b * hermite_e(i, j - 1, t, qx, a, b)
        + (t + 1) * hermite_e(i, j - 1, t + 1, qx, a, b)
    )


def overlap_prim(a, lmn1, ra, b, lmn2, rb):
    l1, m1, n1 = lmn1
    l2, m2, n2 = lmn2
    p = a + b
    sx = hermite_e(l1, l2, 0, ra[0] - rb[0], a, b)
    sy = hermite_e(m1, m2, 0, ra[1] - rb[1], a, b)
    sz = hermite_e(n1, n2, 0, ra[2] - rb[2], a, b)
    return sx * sy * sz * (np.pi / p) ** 1.5


def kinetic_prim(a, lmn1, ra, b, lmn2, rb):
    l2, m2, n2 = lmn2
    term0 = b * (2 * (l2 + m2 + n2) + 3) * overlap_prim(a, lmn1, ra, b, lmn2, rb)
    term1 = -2 * b * b * (
        overlap_prim(a, lmn1, ra, b, (l2 + 2, m2, n2), rb)
        + overlap_prim(a, lmn1, ra, b, (l2, m2 + 2, n2), rb)
        + overlap_prim(a, lmn1, ra, b, (l2, m2, n2 + 2), rb)
    )
    term2 = -0.5 * (
        l2 * (l2 - 1) * overlap_prim(a, lmn1, ra, b, (l2 - 2, m2, n2), rb)
        + m2 * (m2 - 1) * overlap_prim(a, lmn1, ra, b, (l2, m2 - 2, n2), rb)
        + n2 * (n2 - 1) * overlap_prim(a, lmn1, ra, b, (l2, m2, n2 - 2), rb)
    )
    return term0 + term1 + term2


def hermite_coulomb(t, u, v, n, p, pcx, pcy, pcz, pc2):
    if t == u == v == 0:
        return (-2.0 * p) ** n * boys(n, p * pc2)
    if t > 0:
        val = 0.0
        if t > 1:
            val += (t - 1) * hermite_coulomb(t - 2, u, v, n + 1, p, pcx, pcy, pcz, pc2)
        val += pcx * hermite_coulomb(t - 1, u, v, n + 1, p, pcx, pcy, pcz, pc2)
        return val
    if u > 0:
        val = 0.0
        if u > 1:
            val += (u - 1) * hermite_coulomb(t, u - 2, v, n + 1, p, pcx, pcy, pcz, pc2)
        val += pcy * hermite_coulomb(t, u - 1, v, n + 1, p, pcx, pcy, pcz, pc2)
        return val
    val = 0.0
    if v > 1:
        val += (v - 1) * hermite_coulomb(t, u, v - 2, n + 1, p, pcx, pcy, pcz, pc2)
    val += pcz * hermite_coulomb(t, u, v - 1, n + 1, p, pcx, pcy, pcz, pc2)
    return val


def nuclear_prim(a, lmn1, ra, b, lmn2, rb, rc):
    l1, m1, n1 = lmn1
    l2, m2, n2 = lmn2
    p = a + b
    rp = (a * np.array(ra) + b * np.array(rb)) / p
    pc = rp - np.array(rc)
    pc2 = float(np.dot(pc, pc))
    val = 0.0
    for t in range(l1 + l2 + 1):
        et = hermite_e(l1, l2, t, ra[0] - rb[0], a, b)
        if et == 0.0:
            continue
        for u in range(m1 + m2 + 1):
            eu = hermite_e(m1, m2, u, ra[1] - rb[1], a, b)
            if eu == 0.0:
                continue
            for v in range(n1 + n2 + 1):
                ev = hermite_e(n1, n2, v, ra[2] - rb[2], a, b)
                if ev == 0.0:
                    continue
                val += et * eu * ev * hermite_coulomb(
                    t, u, v, 0, p, pc[0], pc[1], pc[2], pc2
                )
    return 2 * np.pi / p * val


# ---------------------------------------------------------------------------
# numba primitive-ERI kernel
# ---------------------------------------------------------------------------

LMAX = 2
TMAX = 4 * LMAX  # highest Hermite order for a dddd quartet


@njit(cache=True)
def _boys_vec(nmax, x, out):
    """F_0..F_nmax via series (small x) or asymptotic + downward recursion."""
    if x < 1e-13:
        for m in range(nmax + 1):
            out[m] = 1.0 / (2 * m + 1)
        return
    if x < 35.0:
        # series for F_nmax, then downward recursion
        m = nmax
        term = 1.0 / (2 * m + 1)
        total = term
        k = 1
        while True:
            term *= 2.0 * x / (2 * m + 2 * k + 1)
            total += term
            if term < 1e-17 * total:
                break
            k += 1
        ex = np.exp(-x)
        out[nmax] = total * ex
        for mm in range(nmax - 1, -1, -1):
            out[mm] = (2.0 * x * out[mm + 1] + ex) / (2 * mm + 1)
    else:
        out[0] = 0.5 * np.sqrt(np.pi / x)
        ex = np.exp(-x)
        for m in range(1, nmax + 1):
            out[m] = ((2 * m - 1) * out[m - 1] - ex) / (2.0 * x)


@njit(cache=True)
def _hermite_e_table(la, lb, qx, a, b, etab):
    """Fill etab[i, j, t] = E_t^{ij} for i<=la, j<=lb."""
    p = a + b
    q = a * b / p
    etab[:, :, :] = 0.0
    etab[0, 0, 0] = np.exp(-q * qx * qx)
    for i in range(1, la + 1):
        for t in range(i + 1):
            v = 0.0
            if t > 0:
                v += etab[i - 1, 0, t - 1] / (2 * p)
            v -= q * qx / a * etab[i - 1, 0, t]
            if t + 1 <= i - 1:
                v += (t + 1) * etab[i - 1, 0, t + 1]
            etab[i, 0, t] = v
    for j in range(1, lb + 1):
        for i in range(la + 1):
            for t in range(i + j + 1):
                v = 0.0
                if t > 0:
                    v += etab[i, j - 1, t - 1] / (2 * p)
                v += q * qx / b * etab[i, j - 1, t]
                if t + 1 <= i + j - 1:
                    v += (t + 1) * etab[i, j - 1, t + 1]
                etab[i, j, t] = v


@njit(cache=True)
def _hermite_coulomb_table(tmax, p, pcx, pcy, pcz, rtab):
    """rtab[t, u, v] = R^0_{tuv}; built by downward recursion in the order n."""
    pc2 = pcx * pcx + pcy * pcy + pcz * pcz
    fb = np.zeros(tmax + 1)
    _boys_vec(tmax, p * pc2, fb)
    # layer[n][t,u,v] built from n = tmax down to 0; store two layers
    dim = tmax + 1
    cur = np.zeros((dim, dim, dim))
    nxt = np.zeros((dim, dim, dim))
    for n in range(tmax, -1, -1):
        cur[:, :, :] = 0.0
        cur[0, 0, 0] = (-2.0 * p) ** n * fb[n]
        maxtot = tmax - n
        for tot in range(1, maxtot + 1):
            for t in range(tot + 1):
                for u in range(tot - t + 1):
                    v = tot - t - u
                    val = 0.0
                    if t > 0:
                        val = pcx * nxt[t - 1, u, v]
                        if t > 1:
                            val += (t - 1) * nxt[t - 2, u, v]
                    elif u > 0:
                        val = pcy * nxt[t, u - 1, v]
                        if u > 1:
                            val += (u - 1) * nxt[t, u - 2, v]
                    else:
                        val = pcz * nxt[t, u, v - 1]
                        if v > 1:
                            val += (v - 1) * nxt[t, u, v - 2]
                    cur[t, u, v] = val
        nxt, cur = cur, nxt
    return nxt.copy()


@njit(cache=True)
def _eri_primitive_tensor(exps, lmns, centers):
    """Full primitive cartesian ERI tensor with 8-fold symmetry."""
    n = exps.shape[0]
    out = np.zeros((n, n, n, n))
    dim = 2 * LMAX + 1
    ea = np.zeros((LMAX + 1, LMAX + 1, dim))
    eb = np.zeros((LMAX + 1, LMAX + 1, dim))
    ec = np.zeros((LMAX + 1, LMAX + 1, dim))
    ex2 = np.zeros((3, dim))
    ey2 = np.zeros((3, dim))  # scratch unused; kept for clarity
    for i in range(n):
        for j in range(i + 1):
            a = exps[i]
            b = exps[j]
            p = a + b
            rp = (a * centers[i] + b * centers[j]) / p
            exab = np.zeros((3, dim))
            for d in range(3):
                _hermite_e_table(LMAX, LMAX, centers[i, d] - centers[j, d], a, b, ea)
                for t in range(dim):
                    exab[d, t] = ea[lmns[i, d], lmns[j, d], t]
            ij = i * (i + 1) // 2 + j
            for k in range(i + 1):
                lmax_l = k if k < i else j
                for l in range(k + 1):
                    kl = k * (k + 1) // 2 + l
                    if kl > ij:
                        continue
                    c = exps[k]
                    dd = exps[l]
                    q = c + dd
                    rq = (c * centers[k] + dd * centers[l]) / q
                    excd = np.zeros((3, dim))
                    for d in range(3):
                        _hermite_e_table(
                            LMAX, LMAX, centers[k, d] - centers[l, d], c, dd, eb
                        )
                        for t in range(dim):
                            excd[d, t] = eb[lmns[k, d], lmns[l, d], t]
                    alpha = p * q / (p + q)
                    rtab = _hermite_coulomb_table(
                        TMAX, alpha, rp[0] - rq[0], rp[1] - rq[1], rp[2] - rq[2],
                        np.zeros((1, 1, 1)),
                    )
                    val = 0.0
                    t1max = lmns[i, 0] + lmns[j, 0]
                    u1max = lmns[i, 1] + lmns[j, 1]
                    v1max = lmns[i, 2] + lmns[j, 2]
                    t2max = lmns[k, 0] + lmns[l, 0]
                    u2max = lmns[k, 1] + lmns[l, 1]
                    v2max = lmns[k, 2] + lmns[l, 2]
                    for t in range(t1max + 1):
                        et = exab[0, t]
                        if et == 0.0:
                            continue
                        for u in range(u1max + 1):
                            eu = exab[1, u]
                            if eu == 0.0:
                                continue
                            for v in range(v1max + 1):
                                ev = exab[2, v]
                                if ev == 0.0:
                                    continue
                                for tau in range(t2max + 1):
                                    e2t = excd[0, tau]
                                    if e2t == 0.0:
                                        continue
                                    for nu in range(u2max + 1):
                                        e2u = excd[1, nu]
                                        if e2u == 0.0:
                                            continue
                                        for phi in range(v2max + 1):
                                            e2v = excd[2, phi]
                                            if e2v == 0.0:
                                                continue
                                            sign = 1.0 if (tau + nu + phi) % 2 == 0 else -1.0
                                            val += (
                                                et * eu * ev * e2t * e2u * e2v * sign
                                                * rtab[t + tau, u + nu, v + phi]
                                            )
                    val *= 2 * np.pi ** 2.5 / (p * q * np.sqrt(p + q))
                    out[i, j, k, l] = val
                    out[j, i, k, l] = val
                    out[i, j, l, k] = val
                    out[j, i, l, k] = val
                    out[k, l, i, j] = val
                    out[l, k, i, j] = val
                    out[k, l, j, i] = val
                    out[l, k, j, i] = val
    return out


def prim_norm(a, lmn):
    l, m, n = lmn

    def dfact(k):  # (2k-1)!!
        r = 1
        for i in range(2 * k - 1, 0, -2):
            r *= i
        return r

    num = (2 * a / np.pi) ** 0.75 * (4 * a) ** ((l + m + n) / 2.0)
    den = np.sqrt(dfact(l) * dfact(m) * dfact(n))
    return num / den


CART_COMPONENTS = {
    0: [(0, 0, 0)],
    1: [(1, 0, 0), (0, 1, 0), (0, 0, 1)],
    2: [(2, 0, 0), (1, 1, 0), (1, 0, 1), (0, 2, 0), (0, 1, 1), (0, 0, 2)],
}

# spherical d in terms of individually-normalized cartesians (xx,xy,xz,yy,yz,zz)
SPH_D = np.array([
    [0.0, 1.0, 0.0, 0.0, 0.0, 0.0],                            # d_xy
    [0.0, 0.0, 0.0, 0.0, 1.0, 0.0],                            # d_yz
    [-0.5, 0.0, 0.0, -0.5, 0.0, 1.0],                          # d_z2
    [0.0, 0.0, 1.0, 0.0, 0.0, 0.0],                            # d_xz
    [np.sqrt(3.0) / 2, 0.0, 0.0, -np.sqrt(3.0) / 2, 0.0, 0.0],  # d_x2-y2
])


class Shell:
    def __init__(self, l, center, exps, coefs):
        self.l = l
        self.center = np.array(center, dtype=float)
        self.exps = np.array(exps, dtype=float)
        self.coefs = np.array(coefs, dtype=float)

    def contracted(self):
        """Per-component (lmn, [(exp, coef*norm)]) with unit self-overlap."""
        out = []
        for lmn in CART_COMPONENTS[self.l]:
            pairs = [
                (a, c * prim_norm(a, lmn)) for a, c in zip(self.exps, self.coefs)
            ]
            s = 0.0
            for a1, c1 in pairs:
                for a2, c2 in pairs:
                    s += c1 * c2 * overlap_prim(a1, lmn, self.center, a2, lmn, self.center)
            norm = 1.0 / np.sqrt(s)
            out.append((lmn, [(a, c * norm) for a, c in pairs]))
        return out


class Molecule:
    def __init__(self, atoms, shells):
        """atoms: list of (Z, xyz in bohr); shells: list of Shell."""
        self.atoms = atoms
        self.shells = shells
        self.cart_funcs = []
        self.cart_centers = []
        self.sph_blocks = []
        for sh in shells:
            start = len(self.cart_funcs)
            for lmn, prims in sh.contracted():
                self.cart_funcs.append((lmn, prims))
                self.cart_centers.append(sh.center)
            self.sph_blocks.append((start, sh.l))

    def n_cart(self):
        return len(self.cart_funcs)

    def cart_to_sph(self):
        rows = []
        n = self.n_cart()
        for start, l in self.sph_blocks:
            if l == 2:
                for r in SPH_D:
                    row = np.zeros(n)
                    row[start:start + 6] = r
                    rows.append(row)
            else:
                for k in range(len(CART_COMPONENTS[l])):
                    row = np.zeros(n)
                    row[start + k] = 1.0
                    rows.append(row)
        return np.array(rows)

    def _contracted_pair(self, i, j, kernel):
        (lmn1, prims1), r1 = self.cart_funcs[i], self.cart_centers[i]
        (lmn2, prims2), r2 = self.cart_funcs[j], self.cart_centers[j]
        val = 0.0
        for a, ca in prims1:
            for b, cb in prims2:
                val += ca * cb * kernel(a, lmn1, r1, b, lmn2, r2)
        return val

    def one_electron(self):
        n = self.n_cart()
        s = np.zeros((n, n))
        t = np.zeros((n, n))
        v = np.zeros((n, n))

        def vkern(a, lmn1, r1, b, lmn2, r2):
            return sum(
                -z * nuclear_prim(a, lmn1, r1, b, lmn2, r2, rc)
                for z, rc in self.atoms
            )

        for i in range(n):
            for j in range(i + 1):
                s[i, j] = s[j, i] = self._contracted_pair(i, j, overlap_prim)
                t[i, j] = t[j, i] = self._contracted_pair(i, j, kinetic_prim)
                v[i, j] = v[j, i] = self._contracted_pair(i, j, vkern)
        c = self.cart_to_sph()
        return c @ s @ c.T, c @ (t + v) @ c.T

    def _primitive_layout(self):
        """Deduplicated primitive cartesians + contraction matrix."""
        prim_key = {}
        exps, lmns, centers = [], [], []
        ncart = self.n_cart()
        rows = []
        for idx in range(ncart):
            (lmn, prims), ctr = self.cart_funcs[idx], self.cart_centers[idx]
            row = []
            for a, coef in prims:
                key = (round(a, 12), lmn, tuple(np.round(ctr, 10)))
                if key not in prim_key:
                    prim_key[key] = len(exps)
                    exps.append(a)
                    lmns.append(lmn)
                    centers.append(ctr)
                row.append((prim_key[key], coef))
            rows.append(row)
        nprim = len(exps)
        cmat = np.zeros((ncart, nprim))
        for idx, row in enumerate(rows):
            for p, coef in row:
                cmat[idx, p] += coef
        return (
            np.array(exps),
            np.array(lmns, dtype=np.int64),
            np.array(centers),
            cmat,
        )

    def two_electron(self):
        exps, lmns, centers, cmat = self._primitive_layout()
        prim = _eri_primitive_tensor(exps, lmns, centers)
        eri = np.einsum("pi,ijkl->pjkl", cmat, prim, optimize=True)
        eri = np.einsum("qj,pjkl->pqkl", cmat, eri, optimize=True)
        eri = np.einsum("rk,pqkl->pqrl", cmat, eri, optimize=True)
        eri = np.einsum("sl,pqrl->pqrs", cmat, eri, optimize=True)
        c = self.cart_to_sph()
        eri = np.einsum("pi,ijkl->pjkl", c, eri, optimize=True)
        eri = np.einsum("qj,pjkl->pqkl", c, eri, optimize=True)
        eri = np.einsum("rk,pqkl->pqrl", c, eri, optimize=True)
        eri = np.einsum("sl,pqrl->pqrs", c, eri, optimize=True)
        return eri

    def nuclear_repulsion(self):
        e = 0.0
        for i, (zi, ri) in enumerate(self.atoms):
            for zj, rj in self.atoms[:i]:
                e += zi * zj / np.linalg.norm(np.array(ri) - np.array(rj))
        return e
