"""Independent spin-orbital CCSD for cross-checking (einsum, plain Jacobi+DIIS-free)."""

import gzip
import sys

import numpy as np


def read_fcidump(path):
    opener = gzip.open if str(path).endswith(".gz") else open
    with opener(path, "rt") as f:
        text = f.read()
    header, _, body = text.partition("&END")
    import re

    norb = int(re.search(r"NORB=\s*(\d+)", header).group(1))
    nelec = int(re.search(r"NELEC=\s*(\d+)", header).group(1))
    h = np.zeros((norb, norb))
    g = np.zeros((norb, norb, norb, norb))
    ecore = 0.0
    for line in body.strip().splitlines():
        parts = line.split()
        v = float(parts[0])
        i, j, k, l = (int(x) for x in parts[1:5])
        if i == 0:
            ecore = v
        elif k == 0:
            h[i - 1, j - 1] = h[j - 1, i - 1] = v
        else:
            i, j, k, l = i - 1, j - 1, k - 1, l - 1
            for a, b in ((i, j), (j, i)):
                for c, d in ((k, l), (l, k)):
                    g[a, b, c, d] = v
                    g[c, d, a, b] = v
    return norb, nelec, h, g, ecore


def spinorb(norb, h, g):
    n = 2 * norb
    hs = np.zeros((n, n))
    hs[:norb, :norb] = h
    hs[norb:, norb:] = h
    # physicists <pq|rs> = (pr|qs) with spin delta
    gs = np.zeros((n, n, n, n))
    phys = g.transpose(0, 2, 1, 3)  # (pr|qs) -> <pq|rs>
    for sp in (0, 1):
        for sq in (0, 1):
            o1 = sp * norb
            o2 = sq * norb
            gs[o1:o1 + norb, o2:o2 + norb, o1:o1 + norb, o2:o2 + norb] = phys
    anti = gs - gs.transpose(0, 1, 3, 2)
    return hs, anti


def main(path):
    norb, nelec, h, g, ecore = read_fcidump(path)
    hs, anti = spinorb(norb, h, g)
    n = 2 * norb
    na = nelec // 2
    occ = list(range(na)) + list(range(norb, norb + na))
    virt = [p for p in range(n) if p not in occ]
    o, v = len(occ), len(virt)
    fock = hs + np.einsum("piqi->pq", anti[:, occ, :, :][:, :, :, occ])
    e_hf = ecore + hs[occ, occ].sum() + 0.5 * anti[np.ix_(occ, occ, occ, occ)].trace(axis1=0, axis2=2).trace()
    print("e_hf", e_hf)
    fo = fock[np.ix_(occ, occ)]
    fv = fock[np.ix_(virt, virt)]
    fov = fock[np.ix_(occ, virt)]
    eps_o = np.diag(fo)
    eps_v = np.diag(fv)
    d1 = eps_o[:, None] - eps_v[None, :]
    d2 = eps_o[:, None, None, None] + eps_o[None, :, None, None] - eps_v[None, None, :, None] - eps_v[None, None, None, :]
    oovv = anti[np.ix_(occ, occ, virt, virt)]
    t1 = fov / d1
    t2 = oovv / d2
    A = anti
    idx = {"o": occ, "v": virt}

    def blk(s):
        return A[np.ix_(*[idx[c] for c in s])]

    ooov = blk("ooov"); oooo = blk("oooo"); ovov = blk("ovov")
    ovvv = blk("ovvv"); vvvv = blk("vvvv"); ovoo = blk("ovoo")
    ovvo = blk("ovvo")

    for it in range(200):
        tau = t2 + np.einsum("ia,jb->ijab", t1, t1) - np.einsum("ib,ja->ijab", t1, t1)
        taut = t2 + 0.5 * (np.einsum("ia,jb->ijab", t1, t1) - np.einsum("ib,ja->ijab", t1, t1))
        Fae = fv - np.diag(eps_v) - 0.5 * np.einsum("me,ma->ae", fov, t1) \
            + np.einsum("mafe,mf->ae", ovvv, t1) - 0.5 * np.einsum("mnef,mnaf->ae", oovv, taut)
        Fmi = fo - np.diag(eps_o) + 0.5 * np.einsum("me,ie->mi", fov, t1) \
            + np.einsum("mnie,ne->mi", ooov, t1) + 0.5 * np.einsum("mnef,inef->mi", oovv, taut)
        Fme = fov + np.einsum("mnef,nf->me", oovv, t1)
        Wmnij = oooo + np.einsum("mnie,je->mnij", ooov, t1) - np.einsum("mnje,ie->mnij", ooov, t1) \
            + 0.25 * np.einsum("mnef,ijef->mnij", oovv, tau)
        Wabef = vvvv - np.einsum("mbef,ma->abef", ovvv, t1) + np.einsum("maef,mb->abef", ovvv, t1) \
            + 0.25 * np.einsum("mnef,mnab->abef", oovv, tau)
        Wmbej = ovvo + np.einsum("mbef,jf->mbej", ovvv, t1) - np.einsum("mnej,nb->mbej", -ooov.transpose(0, 1, 3, 2), t1) * 0 \
            - np.einsum("mnje,nb->mbej", ooov, t1) * 0
        # ovoo block for W_mbej hole term: <mn||ej> = -<nm||ej>; use ovoo via transpose
        mnej = ovoo.transpose(0, 2, 1, 3) * 0  # placeholder, build directly
        mnej = A[np.ix_(occ, occ, virt, occ)]
        Wmbej = ovvo + np.einsum("mbef,jf->mbej", ovvv, t1) - np.einsum("mnej,nb->mbej", mnej, t1) \
            - np.einsum("mnef,jnfb->mbej", oovv, 0.5 * t2 + np.einsum("jf,nb->jnfb", t1, t1))

        r1 = fov + np.einsum("ie,ae->ia", t1, Fae) - np.einsum("ma,mi->ia", t1, Fmi) \
            + np.einsum("imae,me->ia", t2, Fme) - np.einsum("nf,naif->ia", t1, ovov) \
            - 0.5 * np.einsum("imef,maef->ia", t2, ovvv) - 0.5 * np.einsum("mnae,nmei->ia", t2, mnej.transpose(1, 0, 2, 3))

        r2 = oovv.copy()
        tmp = Fae - 0.5 * np.einsum("mb,me->be", t1, Fme)
        r2 += np.einsum("ijae,be->ijab", t2, tmp) - np.einsum("ijbe,ae->ijab", t2, tmp)
        tmp = Fmi + 0.5 * np.einsum("je,me->mj", t1, Fme)
        r2 -= np.einsum("imab,mj->ijab", t2, tmp) - np.einsum("jmab,mi->ijab", t2, tmp)
        r2 += 0.5 * np.einsum("mnab,mnij->ijab", tau, Wmnij)
        r2 += 0.5 * np.einsum("ijef,abef->ijab", tau, Wabef)
        P = np.einsum("imae,mbej->ijab", t2, Wmbej) - np.einsum("ie,ma,mbej->ijab", t1, t1, ovvo)
        r2 += P - P.transpose(1, 0, 2, 3) - P.transpose(0, 1, 3, 2) + P.transpose(1, 0, 3, 2)
        Q = np.einsum("ie,abej->ijab", t1, A[np.ix_(virt, virt, virt, occ)])
        r2 += Q - Q.transpose(1, 0, 2, 3)
        Qm = np.einsum("ma,mbij->ijab", t1, A[np.ix_(occ, virt, occ, occ)])
        r2 -= Qm - Qm.transpose(0, 1, 3, 2)

        t1n = r1 / d1
        t2n = r2 / d2
        dn = max(np.abs(t1n - t1).max(), np.abs(t2n - t2).max())
        t1, t2 = 0.5 * (t1 + t1n), 0.5 * (t2 + t2n)
        e = np.einsum("ia,ia->", fov, t1) + 0.25 * np.einsum("ijab,ijab->", oovv, t2) \
            + 0.5 * np.einsum("ijab,ia,jb->", oovv, t1, t1)
        if it % 10 == 0:
            print(it, e, dn, flush=True)
        if dn < 1e-9:
            break
    print("e_corr", e, "e_total", e_hf + e)
    print("T1_diag(spin)", np.linalg.norm(t1) / np.sqrt(nelec))
    flat = [(abs(t1[i, a]), i, a, t1[i, a]) for i in range(o) for a in range(v)]
    flat.sort(reverse=True)
    for _, i, a, val in flat[:6]:
        print(f"t1[{occ[i]} -> {virt[a]}] = {val:.5f}")


if __name__ == "__main__":
    main(sys.argv[1])
