"""Basis set data (exponents in bohr^-2)."""

# STO-3G hydrogen
H_STO3G = [
    (0, [3.42525091, 0.62391373, 0.16885540],
        [0.15432897, 0.53532814, 0.44463454]),
]

# cc-pVDZ nitrogen set: (9s,4p,1d) -> [3s,2p,1d].
N_S_EXPS = [9046.0, 1357.0, 309.3, 87.73, 28.56, 10.21, 3.838, 0.7466, 0.2248]
N_P_EXPS = [13.55, 2.917, 0.7973, 0.2185]
N_CCPVDZ = [
    (0, N_S_EXPS, [0.000700, 0.005389, 0.027406, 0.103207, 0.278723, 0.448540, 0.278238, 0.015440, -0.002864]),
    (0, N_S_EXPS, [-0.000153, -0.001208, -0.005992, -0.024544, -0.067459, -0.158078, -0.121831, 0.549003, 0.578815]),
    (0, [N_S_EXPS[-1]], [1.0]),
    (1, N_P_EXPS, [0.039919, 0.217169, 0.510319, 0.462214]),
    (1, [N_P_EXPS[-1]], [1.0]),
    (2, [0.8170], [1.0]),
]


def build_shells(atom_basis, center):
    from integrals import Shell
    return [Shell(l, center, e, c) for l, e, c in atom_basis]
