//! Spin-orbital CCSD with DIIS, tailored CCSD (frozen active-space T1/T2),
//! and ec-CC (CCSDTQ singles/doubles projections with fixed sparse T3/T4).
//!
//! The CCSD equations use the standard intermediate formulation; rank-3/4
//! contributions enter as additive residual terms built from T1-dressed
//! integrals contracted against the sparse external amplitudes.

use ndarray::{Array2, Array4};
use std::collections::BTreeMap;

use crate::ci::ExcitationLabel;
use crate::cluster::{AmplitudeSet, SpaceMap};
use crate::error::{Result, SplitccError};
use crate::integrals::{build_fock, SpinOrbitalBasis};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum T1T3Mode {
    /// Evaluate the T1·T3 doubles contribution once from the external t1.
    Frozen,
    /// Re-dress with the current t1 every iteration.
    Iterative,
}

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct SolverConfig {
    pub max_iterations: usize,
    pub residual_tolerance: f64,
    pub diis_depth: usize,
    pub level_shift: f64,
    pub t1t3_mode: T1T3Mode,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_iterations: 200,
            residual_tolerance: 1e-8,
            diis_depth: 8,
            level_shift: 0.0,
            t1t3_mode: T1T3Mode::Frozen,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CCResult {
    pub e_total: f64,
    pub e_correlation: f64,
    pub e_hf: f64,
    pub amplitudes: AmplitudeSet,
    pub iterations: usize,
    pub final_residual_norm: f64,
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct TCCResult {
    pub base: CCResult,
    pub e_as: f64,
    pub e_ext: f64,
}

/// Integral blocks over occupied/virtual slots.
struct Work {
    o: usize,
    v: usize,
    f_oo: Array2<f64>,
    f_ov: Array2<f64>,
    f_vv: Array2<f64>,
    oooo: Array4<f64>,
    ooov: Array4<f64>,
    oovv: Array4<f64>,
    ovoo: Array4<f64>,
    ovov: Array4<f64>,
    ovvo: Array4<f64>,
    ovvv: Array4<f64>,
    vvvo: Array4<f64>,
    vvvv: Array4<f64>,
    d1: Array2<f64>,
    d2: Array4<f64>,
}

impl Work {
    fn new(basis: &SpinOrbitalBasis, space: &SpaceMap, level_shift: f64) -> Self {
        let (fock, _) = build_fock(basis);
        let occ = &space.occ;
        let virt = &space.virt;
        let (o, v) = (occ.len(), virt.len());
        let pick2 = |rows: &[usize], cols: &[usize]| {
            Array2::from_shape_fn((rows.len(), cols.len()), |(p, q)| fock[(rows[p], cols[q])])
        };
        let pick4 = |a: &[usize], b: &[usize], c: &[usize], d: &[usize]| {
            Array4::from_shape_fn((a.len(), b.len(), c.len(), d.len()), |(p, q, r, s)| {
                basis.g[(a[p], b[q], c[r], d[s])]
            })
        };
        let f_oo = pick2(occ, occ);
        let f_vv = pick2(virt, virt);
        let d1 = Array2::from_shape_fn((o, v), |(i, a)| f_oo[(i, i)] - f_vv[(a, a)] - level_shift);
        let d2 = Array4::from_shape_fn((o, o, v, v), |(i, j, a, b)| {
            f_oo[(i, i)] + f_oo[(j, j)] - f_vv[(a, a)] - f_vv[(b, b)] - level_shift
        });
        Work {
            o,
            v,
            f_ov: pick2(occ, virt),
            oooo: pick4(occ, occ, occ, occ),
            ooov: pick4(occ, occ, occ, virt),
            oovv: pick4(occ, occ, virt, virt),
            ovoo: pick4(occ, virt, occ, occ),
            ovov: pick4(occ, virt, occ, virt),
            ovvo: pick4(occ, virt, virt, occ),
            ovvv: pick4(occ, virt, virt, virt),
            vvvo: pick4(virt, virt, virt, occ),
            vvvv: pick4(virt, virt, virt, virt),
            f_oo,
            f_vv,
            d1,
            d2,
        }
    }
}

/// Reshape a contiguous 4-tensor into a matrix without copying.
fn as_mat(t: &Array4<f64>, rows: usize, cols: usize) -> ndarray::ArrayView2<'_, f64> {
    t.view().into_shape_with_order((rows, cols)).unwrap()
}

fn permute(t: &Array4<f64>, axes: [usize; 4]) -> Array4<f64> {
    t.view()
        .permuted_axes(axes)
        .as_standard_layout()
        .into_owned()
}

/// Correlation energy functional; only T1 and T2 enter.
pub fn cc_energy(t1: &Array2<f64>, t2: &Array4<f64>, basis: &SpinOrbitalBasis) -> f64 {
    let space = SpaceMap::from_reference(&basis.reference_occupation, basis.n / 2);
    let (fock, _) = build_fock(basis);
    let (o, v) = (space.n_occ(), space.n_virt());
    let mut e = 0.0;
    for i in 0..o {
        for a in 0..v {
            e += fock[(space.occ[i], space.virt[a])] * t1[(i, a)];
        }
    }
    for i in 0..o {
        for j in 0..o {
            for a in 0..v {
                for b in 0..v {
                    let g = basis.g[(space.occ[i], space.occ[j], space.virt[a], space.virt[b])];
                    e += 0.25 * g * t2[(i, j, a, b)] + 0.5 * g * t1[(i, a)] * t1[(j, b)];
                }
            }
        }
    }
    e
}

fn energy_from_work(w: &Work, t1: &Array2<f64>, t2: &Array4<f64>) -> f64 {
    let mut e = 0.0;
    for i in 0..w.o {
        for a in 0..w.v {
            e += w.f_ov[(i, a)] * t1[(i, a)];
        }
    }
    for i in 0..w.o {
        for j in 0..w.o {
            for a in 0..w.v {
                for b in 0..w.v {
                    let g = w.oovv[(i, j, a, b)];
                    e += 0.25 * g * t2[(i, j, a, b)] + 0.5 * g * t1[(i, a)] * t1[(j, b)];
                }
            }
        }
    }
    e
}

/// T₁ diagnostic (Frobenius norm per √n_electrons) and D₁ (largest singular
/// value of t1).
pub fn diagnostics(t1: &Array2<f64>, n_correlated_electrons: usize) -> Result<(f64, f64)> {
    if n_correlated_electrons == 0 {
        return Err(SplitccError::InvalidInput(
            "diagnostics need at least one correlated electron".into(),
        ));
    }
    let frob = t1.iter().map(|x| x * x).sum::<f64>().sqrt();
    let t1_diag = frob / (n_correlated_electrons as f64).sqrt();
    let (o, v) = t1.dim();
    let m = nalgebra::DMatrix::from_fn(o, v, |i, a| t1[(i, a)]);
    let d1_diag = m.svd(false, false).singular_values.max();
    Ok((t1_diag, d1_diag))
}

/// Fixed rank-3/4 input for ec-CC.
struct External {
    t3: BTreeMap<ExcitationLabel, f64>,
    t4: BTreeMap<ExcitationLabel, f64>,
    /// t1 used for the frozen-mode dressing.
    t1: Array2<f64>,
    mode: T1T3Mode,
}

/// Sparse-T3/T4 residual contributions with T1-dressed integrals.
///
/// r1 += ¼ Σ ⟨mn||ef⟩ t3_imn^aef;
/// r2 += Σ χ_me t3_ijm^abe + ½ P(ab) Σ W̃_bmef t3_ijm^aef
///       − ½ P(ij) Σ W̃_mnje t3_imn^abe + ¼ Σ ⟨mn||ef⟩ t4_ijmn^abef,
/// with χ and W̃ dressed by the supplied t1.
fn high_rank_terms(
    w: &Work,
    space: &SpaceMap,
    t3: &BTreeMap<ExcitationLabel, f64>,
    t4: &BTreeMap<ExcitationLabel, f64>,
    t1: &Array2<f64>,
) -> (Array2<f64>, Array4<f64>) {
    let (o, v) = (w.o, w.v);
    let mut r1 = Array2::zeros((o, v));
    let mut r2: Array4<f64> = Array4::zeros((o, o, v, v));

    // χ_me = f_me + Σ_nf ⟨mn||ef⟩ t1_nf
    let mut chi = w.f_ov.clone();
    for m in 0..o {
        for e in 0..v {
            let mut acc = 0.0;
            for n in 0..o {
                for f in 0..v {
                    acc += w.oovv[(m, n, e, f)] * t1[(n, f)];
                }
            }
            chi[(m, e)] += acc;
        }
    }
    // W̃_bmef = ⟨bm||ef⟩ − Σ_n t1_nb ⟨nm||ef⟩  (vovv block, dressed)
    let mut wt_vovv = Array4::zeros((v, o, v, v));
    for b in 0..v {
        for m in 0..o {
            for e in 0..v {
                for f in 0..v {
                    let mut val = -w.ovvv[(m, b, e, f)];
                    for n in 0..o {
                        val -= t1[(n, b)] * w.oovv[(n, m, e, f)];
                    }
                    wt_vovv[(b, m, e, f)] = val;
                }
            }
        }
    }
    // W̃_mnje = ⟨mn||je⟩ + Σ_f t1_jf ⟨mn||fe⟩  (ooov block, dressed)
    let mut wt_ooov = Array4::zeros((o, o, o, v));
    for m in 0..o {
        for n in 0..o {
            for j in 0..o {
                for e in 0..v {
                    let mut val = w.ooov[(m, n, j, e)];
                    for f in 0..v {
                        // ⟨mn||fe⟩ = −⟨mn||ef⟩
                        val -= t1[(j, f)] * w.oovv[(m, n, e, f)];
                    }
                    wt_ooov[(m, n, j, e)] = val;
                }
            }
        }
    }

    let occ_slot = |p: usize| space.occ_slot(p).unwrap();
    let virt_slot = |p: usize| space.virt_slot(p).unwrap();
    let parity = |k: usize| if k.is_multiple_of(2) { 1.0 } else { -1.0 };

    // accumulators for the P(ab)/P(ij) terms before antisymmetrization
    let mut x_ab: Array4<f64> = Array4::zeros((o, o, v, v));
    let mut y_ij: Array4<f64> = Array4::zeros((o, o, v, v));

    for (label, &t) in t3 {
        let os: Vec<usize> = label.occ.iter().map(|&p| occ_slot(p)).collect();
        let vs: Vec<usize> = label.virt.iter().map(|&p| virt_slot(p)).collect();

        // r1: pull one (i, a) pair to the front; the rest contracts with ⟨mn||ef⟩
        for p in 0..3 {
            let i = os[p];
            let (m, n) = rest2(&os, p);
            for q in 0..3 {
                let a = vs[q];
                let (e, f) = rest2(&vs, q);
                r1[(i, a)] += parity(p) * parity(q) * t * w.oovv[(m, n, e, f)];
            }
        }
        // χ term: m, e are the *last* slots of the canonical label
        for p in 0..3 {
            let m = os[p];
            let (i, j) = rest2(&os, p);
            let sp = parity(2 - p);
            for q in 0..3 {
                let e = vs[q];
                let (a, b) = rest2(&vs, q);
                let s = sp * parity(2 - q) * t * chi[(m, e)];
                add_antisym(&mut r2, i, j, a, b, s);
            }
        }
        // ½ P(ab) Σ_mef W̃_bmef t3_ijm^aef : accumulate X_ijab = Σ W̃ t3
        for p in 0..3 {
            let m = os[p];
            let (i, j) = rest2(&os, p);
            let sp = parity(2 - p);
            for q in 0..3 {
                let a = vs[q];
                let (e, f) = rest2(&vs, q);
                let s = sp * parity(q) * t;
                for b in 0..v {
                    let val = s * wt_vovv[(b, m, e, f)];
                    x_ab[(i, j, a, b)] += val;
                    x_ab[(j, i, a, b)] -= val;
                }
            }
        }
        // −½ P(ij) Σ_mne W̃_mnje t3_imn^abe : accumulate Y_ijab
        for p in 0..3 {
            let i = os[p];
            let (m, n) = rest2(&os, p);
            let sp = parity(p);
            for q in 0..3 {
                let e = vs[q];
                let (a, b) = rest2(&vs, q);
                let s = sp * parity(2 - q) * t;
                for j in 0..o {
                    let val = s * wt_ooov[(m, n, j, e)];
                    y_ij[(i, j, a, b)] += val;
                    y_ij[(i, j, b, a)] -= val;
                }
            }
        }
    }
    // apply the outstanding antisymmetrizers
    for i in 0..o {
        for j in 0..o {
            for a in 0..v {
                for b in 0..v {
                    r2[(i, j, a, b)] += x_ab[(i, j, a, b)]
                        - x_ab[(i, j, b, a)]
                        - (y_ij[(i, j, a, b)] - y_ij[(j, i, a, b)]);
                }
            }
        }
    }

    for (label, &t) in t4 {
        let os: Vec<usize> = label.occ.iter().map(|&p| occ_slot(p)).collect();
        let vs: Vec<usize> = label.virt.iter().map(|&p| virt_slot(p)).collect();
        // choose (i, j); the remaining (m, n) contracts with ⟨mn||ef⟩
        for p1 in 0..4 {
            for p2 in p1 + 1..4 {
                let (i, j) = (os[p1], os[p2]);
                let (m, n) = rest2of4(&os, p1, p2);
                // parity of [i, j, m, n] vs ascending
                let so = parity(p1) * parity(p2 - 1);
                for q1 in 0..4 {
                    for q2 in q1 + 1..4 {
                        let (a, b) = (vs[q1], vs[q2]);
                        let (e, f) = rest2of4(&vs, q1, q2);
                        let sv = parity(q1) * parity(q2 - 1);
                        let val = so * sv * t * w.oovv[(m, n, e, f)];
                        r2[(i, j, a, b)] += val;
                        r2[(j, i, a, b)] -= val;
                        r2[(i, j, b, a)] -= val;
                        r2[(j, i, b, a)] += val;
                    }
                }
            }
        }
    }
    // the t4 loop wrote each unordered (i<j, a<b) choice once with explicit
    // images, and likewise every antisymmetric component above; scale r1 by
    // nothing further (the ¼ Σ over ordered dummies equals the m<n, e<f sum).
    (r1, r2)
}

#[inline]
fn rest2(xs: &[usize], skip: usize) -> (usize, usize) {
    let mut it = (0..xs.len()).filter(|&k| k != skip).map(|k| xs[k]);
    (it.next().unwrap(), it.next().unwrap())
}

#[inline]
fn rest2of4(xs: &[usize], skip1: usize, skip2: usize) -> (usize, usize) {
    let mut it = (0..4).filter(|&k| k != skip1 && k != skip2).map(|k| xs[k]);
    (it.next().unwrap(), it.next().unwrap())
}

#[inline]
fn add_antisym(r2: &mut Array4<f64>, i: usize, j: usize, a: usize, b: usize, val: f64) {
    r2[(i, j, a, b)] += val;
    r2[(j, i, a, b)] -= val;
    r2[(i, j, b, a)] -= val;
    r2[(j, i, b, a)] += val;
}

/// One CCSD residual evaluation: r = RHS(t) − D∘t (zero at convergence).
fn residuals(
    w: &Work,
    t1: &Array2<f64>,
    t2: &Array4<f64>,
    extra: Option<(&Array2<f64>, &Array4<f64>)>,
) -> (Array2<f64>, Array4<f64>) {
    let (o, v) = (w.o, w.v);
    let mut tau = t2.clone();
    let mut tau_t = t2.clone();
    for i in 0..o {
        for j in 0..o {
            for a in 0..v {
                for b in 0..v {
                    let d = t1[(i, a)] * t1[(j, b)] - t1[(i, b)] * t1[(j, a)];
                    tau[(i, j, a, b)] += d;
                    tau_t[(i, j, a, b)] += 0.5 * d;
                }
            }
        }
    }
    // --- one-body intermediates (off-diagonal Fock kept: non-canonical ok) ---
    let mut f_ae = Array2::zeros((v, v));
    for a in 0..v {
        for e in 0..v {
            let mut val = if a == e { 0.0 } else { w.f_vv[(a, e)] };
            for m in 0..o {
                val -= 0.5 * w.f_ov[(m, e)] * t1[(m, a)];
                for f in 0..v {
                    val += t1[(m, f)] * w.ovvv[(m, a, f, e)];
                }
            }
            f_ae[(a, e)] = val;
        }
    }
    // − ½ Σ tau~_mnaf ⟨mn||ef⟩ via GEMM: (a)(mnf) × (mnf)(e)
    {
        let tau_p = permute(&tau_t, [2, 0, 1, 3]); // a, m, n, f
        let g_p = permute(&w.oovv, [0, 1, 3, 2]); // m, n, f, e
        let prod = as_mat(&tau_p, v, o * o * v).dot(&as_mat(&g_p, o * o * v, v));
        f_ae -= &(0.5 * &prod);
    }
    let mut f_mi = Array2::zeros((o, o));
    for m in 0..o {
        for i in 0..o {
            let mut val = if m == i { 0.0 } else { w.f_oo[(m, i)] };
            for e in 0..v {
                val += 0.5 * t1[(i, e)] * w.f_ov[(m, e)];
                for n in 0..o {
                    val += t1[(n, e)] * w.ooov[(m, n, i, e)];
                }
                for n in 0..o {
                    for f in 0..v {
                        val += 0.5 * tau_t[(i, n, e, f)] * w.oovv[(m, n, e, f)];
                    }
                }
            }
            f_mi[(m, i)] = val;
        }
    }
    let mut f_me = w.f_ov.clone();
    for m in 0..o {
        for e in 0..v {
            let mut acc = 0.0;
            for n in 0..o {
                for f in 0..v {
                    acc += t1[(n, f)] * w.oovv[(m, n, e, f)];
                }
            }
            f_me[(m, e)] += acc;
        }
    }
    // --- two-body intermediates ---
    let mut w_mnij = w.oooo.clone();
    for m in 0..o {
        for n in 0..o {
            for i in 0..o {
                for j in 0..o {
                    let mut val = 0.0;
                    for e in 0..v {
                        val +=
                            t1[(j, e)] * w.ooov[(m, n, i, e)] - t1[(i, e)] * w.ooov[(m, n, j, e)];
                    }
                    w_mnij[(m, n, i, j)] += val;
                }
            }
        }
    }
    // + ¼ Σ_ef tau_ijef ⟨mn||ef⟩ via GEMM: (mn)(ef) × (ef)(ij)
    {
        let prod = as_mat(&w.oovv, o * o, v * v).dot(&as_mat(&tau, o * o, v * v).t());
        let prod4 = prod.into_shape_with_order((o, o, o, o)).unwrap();
        w_mnij += &(0.25 * &prod4);
    }
    let mut w_abef = w.vvvv.clone();
    // P(ab) Σ_m t1_mb ⟨ma||ef⟩ via GEMM: X_{b,(aef)} = t1ᵀ · ovvv
    {
        let x = t1.t().dot(&as_mat(&w.ovvv, o, v * v * v));
        let x4 = x.into_shape_with_order((v, v, v, v)).unwrap(); // b, a, e, f
        for a in 0..v {
            for b in 0..v {
                for e in 0..v {
                    for f in 0..v {
                        w_abef[(a, b, e, f)] += x4[(b, a, e, f)] - x4[(a, b, e, f)];
                    }
                }
            }
        }
    }
    // + ¼ Σ tau_mnab ⟨mn||ef⟩ via GEMM: (ab)(mn) × (mn)(ef)
    {
        let tau_p = permute(&tau, [2, 3, 0, 1]); // a, b, m, n
        let prod = as_mat(&tau_p, v * v, o * o).dot(&as_mat(&w.oovv, o * o, v * v));
        let prod4 = prod.into_shape_with_order((v, v, v, v)).unwrap();
        w_abef += &(0.25 * &prod4);
    }
    let mut w_mbej = w.ovvo.clone();
    // + Σ_f t1_jf ⟨mb||ef⟩ via GEMM: (mbe)(f) × (f)(j), same layout as w_mbej
    {
        let x = as_mat(&w.ovvv, o * v * v, v).dot(&t1.t());
        let x4 = x.into_shape_with_order((o, v, v, o)).unwrap();
        w_mbej += &x4;
    }
    // + Σ_n t1_nb ⟨mn||je⟩ via GEMM: (mje)(n) × (n)(b)
    {
        let g_p = permute(&w.ooov, [0, 2, 3, 1]); // m, j, e, n
        let x = as_mat(&g_p, o * o * v, o).dot(t1);
        let x4 = x.into_shape_with_order((o, o, v, v)).unwrap(); // m, j, e, b
        for m in 0..o {
            for b in 0..v {
                for e in 0..v {
                    for j in 0..o {
                        w_mbej[(m, b, e, j)] += x4[(m, j, e, b)];
                    }
                }
            }
        }
    }
    // − Σ_nf (½ t2_jnfb + t1_jf t1_nb) ⟨mn||ef⟩ via GEMM: (me)(nf) × (nf)(jb)
    {
        let mut dmat: Array4<f64> = permute(t2, [1, 2, 0, 3]); // n, f, j, b
        dmat.mapv_inplace(|x| 0.5 * x);
        for n in 0..o {
            for f in 0..v {
                for j in 0..o {
                    for b in 0..v {
                        dmat[(n, f, j, b)] += t1[(j, f)] * t1[(n, b)];
                    }
                }
            }
        }
        let g_p = permute(&w.oovv, [0, 2, 1, 3]); // m, e, n, f
        let x = as_mat(&g_p, o * v, o * v).dot(&as_mat(&dmat, o * v, o * v));
        let x4 = x.into_shape_with_order((o, v, o, v)).unwrap(); // m, e, j, b
        for m in 0..o {
            for b in 0..v {
                for e in 0..v {
                    for j in 0..o {
                        w_mbej[(m, b, e, j)] -= x4[(m, e, j, b)];
                    }
                }
            }
        }
    }
    // --- T1 residual ---
    let mut r1 = w.f_ov.clone();
    for i in 0..o {
        for a in 0..v {
            let mut val = 0.0;
            for e in 0..v {
                val += t1[(i, e)] * f_ae[(a, e)];
            }
            for m in 0..o {
                val -= t1[(m, a)] * f_mi[(m, i)];
                for e in 0..v {
                    val += t2[(i, m, a, e)] * f_me[(m, e)];
                    for f in 0..v {
                        val -= 0.5 * t2[(i, m, e, f)] * w.ovvv[(m, a, e, f)];
                    }
                    for n in 0..o {
                        // ⟨nm||ei⟩ = −⟨nm||ie⟩ ... stored as ooov with sign
                        val -= 0.5 * t2[(m, n, a, e)] * w.ooov[(n, m, i, e)];
                    }
                }
            }
            for n in 0..o {
                for f in 0..v {
                    // ⟨na||if⟩ = −⟨an||if⟩ ; ovov block gives ⟨na||if⟩ directly
                    val -= t1[(n, f)] * w.ovov[(n, a, i, f)];
                }
            }
            r1[(i, a)] += val - w.d1[(i, a)] * t1[(i, a)];
        }
    }
    // --- T2 residual ---
    let mut r2 = w.oovv.clone();

    // P(ab) Σ_e t2_ijae (F_be − ½ Σ_m t1_mb F_me), written b↔a swapped
    let mut fbe_eff = f_ae.clone();
    for b in 0..v {
        for e in 0..v {
            let mut val = 0.0;
            for m in 0..o {
                val -= 0.5 * t1[(m, b)] * f_me[(m, e)];
            }
            fbe_eff[(b, e)] += val;
        }
    }
    let mut fmj_eff = f_mi.clone();
    for m in 0..o {
        for j in 0..o {
            let mut val = 0.0;
            for e in 0..v {
                val += 0.5 * t1[(j, e)] * f_me[(m, e)];
            }
            fmj_eff[(m, j)] += val;
        }
    }
    // P(ab) Σ_e t2_ijae F_be via GEMM: (ija)(e) × (e)(b)
    {
        let x = as_mat(t2, o * o * v, v).dot(&fbe_eff.t());
        let x4 = x.into_shape_with_order((o, o, v, v)).unwrap(); // i, j, a, b
                                                                 // − P(ij) Σ_m t2_imab F_mj via GEMM: (iab)(m) × (m)(j)
        let t_p = permute(t2, [0, 2, 3, 1]); // i, a, b, m
        let y = as_mat(&t_p, o * v * v, o).dot(&fmj_eff);
        let y4 = y.into_shape_with_order((o, v, v, o)).unwrap(); // i, a, b, j
        for i in 0..o {
            for j in 0..o {
                for a in 0..v {
                    for b in 0..v {
                        r2[(i, j, a, b)] += x4[(i, j, a, b)]
                            - x4[(i, j, b, a)]
                            - (y4[(i, a, b, j)] - y4[(j, a, b, i)]);
                    }
                }
            }
        }
    }
    // ½ Σ_mn tau_mnab W_mnij via GEMM: (ij)(mn) × (mn)(ab)
    {
        let x = as_mat(&w_mnij, o * o, o * o)
            .t()
            .dot(&as_mat(&tau, o * o, v * v));
        let x4 = x.into_shape_with_order((o, o, v, v)).unwrap();
        r2 += &(0.5 * &x4);
    }
    // ½ Σ_ef tau_ijef W_abef via GEMM: (ij)(ef) × (ef)(ab)
    {
        let w_p = permute(&w_abef, [2, 3, 0, 1]); // e, f, a, b
        let prod = as_mat(&tau, o * o, v * v).dot(&as_mat(&w_p, v * v, v * v));
        let prod4 = prod.into_shape_with_order((o, o, v, v)).unwrap();
        r2 += &(0.5 * &prod4);
    }
    // P(ij)P(ab) Σ_me t2_imae W_mbej via GEMM: (ia)(me) × (me)(bj)
    {
        let t_p = permute(t2, [0, 2, 1, 3]); // i, a, m, e
        let w_p = permute(&w_mbej, [0, 2, 1, 3]); // m, e, b, j
        let prod = as_mat(&t_p, o * v, o * v).dot(&as_mat(&w_p, o * v, v * o));
        let x = prod.into_shape_with_order((o, v, v, o)).unwrap(); // i, a, b, j
        for i in 0..o {
            for j in 0..o {
                for a in 0..v {
                    for b in 0..v {
                        r2[(i, j, a, b)] +=
                            x[(i, a, b, j)] - x[(j, a, b, i)] - x[(i, b, a, j)] + x[(j, b, a, i)];
                    }
                }
            }
        }
    }
    // − P(ij)P(ab) Σ_me t1_ie t1_ma ⟨mb||ej⟩: two chained GEMMs
    // P(ij) Σ_e t1_ie ⟨ab||ej⟩ and − P(ab) Σ_m t1_ma ⟨mb||ij⟩: one GEMM each
    {
        let m1 = t1.t().dot(&as_mat(&w.ovvo, o, v * v * o)); // a, (b e j)
        let m4 = m1.into_shape_with_order((v, v, v, o)).unwrap();
        let m_p = permute(&m4, [2, 0, 1, 3]); // e, a, b, j
        let tt = t1.dot(&as_mat(&m_p, v, v * v * o)); // i, (a b j)
        let tt4 = tt.into_shape_with_order((o, v, v, o)).unwrap();

        let g_p = permute(&w.vvvo, [2, 0, 1, 3]); // e, a, b, j
        let u = t1.dot(&as_mat(&g_p, v, v * v * o)); // i, (a b j)
        let u4 = u.into_shape_with_order((o, v, v, o)).unwrap();

        let vmat = t1.t().dot(&as_mat(&w.ovoo, o, v * o * o)); // a, (b i j)
        let v4 = vmat.into_shape_with_order((v, v, o, o)).unwrap();

        for i in 0..o {
            for j in 0..o {
                for a in 0..v {
                    for b in 0..v {
                        let val = -(tt4[(i, a, b, j)] - tt4[(j, a, b, i)] - tt4[(i, b, a, j)]
                            + tt4[(j, b, a, i)])
                            + u4[(i, a, b, j)]
                            - u4[(j, a, b, i)]
                            - (v4[(a, b, i, j)] - v4[(b, a, i, j)]);
                        r2[(i, j, a, b)] += val - w.d2[(i, j, a, b)] * t2[(i, j, a, b)];
                    }
                }
            }
        }
    }
    if let Some((r1x, r2x)) = extra {
        r1 += r1x;
        r2 += r2x;
    }
    (r1, r2)
}

struct Diis {
    depth: usize,
    trials: Vec<Vec<f64>>,
    errors: Vec<Vec<f64>>,
}

impl Diis {
    fn new(depth: usize) -> Self {
        Diis {
            depth,
            trials: Vec::new(),
            errors: Vec::new(),
        }
    }

    fn push_and_extrapolate(&mut self, trial: Vec<f64>, error: Vec<f64>) -> Vec<f64> {
        self.trials.push(trial);
        self.errors.push(error);
        if self.trials.len() > self.depth {
            self.trials.remove(0);
            self.errors.remove(0);
        }
        let m = self.trials.len();
        if m < 2 {
            return self.trials.last().unwrap().clone();
        }
        let mut b = nalgebra::DMatrix::from_element(m + 1, m + 1, -1.0);
        b[(m, m)] = 0.0;
        for p in 0..m {
            for q in 0..m {
                b[(p, q)] = self.errors[p]
                    .iter()
                    .zip(&self.errors[q])
                    .map(|(x, y)| x * y)
                    .sum();
            }
        }
        let mut rhs = nalgebra::DVector::zeros(m + 1);
        rhs[m] = -1.0;
        match b.lu().solve(&rhs) {
            Some(c) => {
                let dim = self.trials[0].len();
                let mut out = vec![0.0; dim];
                for p in 0..m {
                    for (oi, ti) in out.iter_mut().zip(&self.trials[p]) {
                        *oi += c[p] * ti;
                    }
                }
                out
            }
            None => self.trials.last().unwrap().clone(),
        }
    }
}

fn flatten(t1: &Array2<f64>, t2: &Array4<f64>) -> Vec<f64> {
    t1.iter().chain(t2.iter()).copied().collect()
}

fn unflatten(v: &[f64], o: usize, nv: usize) -> (Array2<f64>, Array4<f64>) {
    let t1 = Array2::from_shape_vec((o, nv), v[..o * nv].to_vec()).unwrap();
    let t2 = Array4::from_shape_vec((o, o, nv, nv), v[o * nv..].to_vec()).unwrap();
    (t1, t2)
}

fn solve_core(
    basis: &SpinOrbitalBasis,
    config: &SolverConfig,
    initial: Option<&AmplitudeSet>,
    frozen: Option<&AmplitudeSet>,
    external: Option<&External>,
) -> Result<CCResult> {
    let ns = basis.n / 2;
    let space = SpaceMap::from_reference(&basis.reference_occupation, ns);
    let (o, v) = (space.n_occ(), space.n_virt());
    let w = Work::new(basis, &space, config.level_shift);
    let (_, e_hf) = build_fock(basis);

    // initial amplitudes: caller-provided, else MP2 (t2 = g/D, t1 = 0)
    let (mut t1, mut t2) = match initial {
        Some(amps) => (amps.t1.clone(), amps.t2.clone()),
        None => {
            let mut t2 = Array4::zeros((o, o, v, v));
            for i in 0..o {
                for j in 0..o {
                    for a in 0..v {
                        for b in 0..v {
                            t2[(i, j, a, b)] = w.oovv[(i, j, a, b)] / w.d2[(i, j, a, b)];
                        }
                    }
                }
            }
            (Array2::zeros((o, v)), t2)
        }
    };
    // frozen block: overwrite with the tailored values and remember the mask
    if let Some(fz) = frozen {
        for i in 0..o {
            for a in 0..v {
                if fz.frozen_t1[(i, a)] {
                    t1[(i, a)] = fz.t1[(i, a)];
                }
                for j in 0..o {
                    for b in 0..v {
                        if fz.frozen_t2[(i, j, a, b)] {
                            t2[(i, j, a, b)] = fz.t2[(i, j, a, b)];
                        }
                    }
                }
            }
        }
    }

    // cached high-rank contributions (frozen t1-dressing)
    let cached_high_rank = external.map(|ext| match ext.mode {
        T1T3Mode::Frozen => Some(high_rank_terms(&w, &space, &ext.t3, &ext.t4, &ext.t1)),
        T1T3Mode::Iterative => None,
    });

    let mask_frozen = |r1: &mut Array2<f64>, r2: &mut Array4<f64>| {
        if let Some(fz) = frozen {
            for i in 0..o {
                for a in 0..v {
                    if fz.frozen_t1[(i, a)] {
                        r1[(i, a)] = 0.0;
                    }
                    for j in 0..o {
                        for b in 0..v {
                            if fz.frozen_t2[(i, j, a, b)] {
                                r2[(i, j, a, b)] = 0.0;
                            }
                        }
                    }
                }
            }
        }
    };

    let mut diis = Diis::new(config.diis_depth);
    let mut residual_norm = f64::INFINITY;
    let mut growth_streak = 0usize;
    let mut converged = false;
    let mut iterations = 0;

    for iter in 0..config.max_iterations {
        iterations = iter + 1;
        let iter_high_rank;
        let extra = match (external, &cached_high_rank) {
            (Some(_), Some(Some(cached))) => Some((&cached.0, &cached.1)),
            (Some(ext), Some(None)) => {
                iter_high_rank = high_rank_terms(&w, &space, &ext.t3, &ext.t4, &t1);
                Some((&iter_high_rank.0, &iter_high_rank.1))
            }
            _ => None,
        };
        let (mut r1, mut r2) = match extra {
            Some((r1x, r2x)) => {
                let (mut a, mut b) = residuals(&w, &t1, &t2, None);
                a += r1x;
                b += r2x;
                (a, b)
            }
            None => residuals(&w, &t1, &t2, None),
        };
        mask_frozen(&mut r1, &mut r2);

        let norm = r1
            .iter()
            .chain(r2.iter())
            .fold(0.0f64, |acc, x| acc.max(x.abs()));
        if norm <= config.residual_tolerance {
            residual_norm = norm;
            converged = true;
            break;
        }
        if norm > residual_norm {
            growth_streak += 1;
            if growth_streak >= 10 {
                return Err(SplitccError::NonConvergence(format!(
                    "residual grew for 10 consecutive iterations (now {norm:.3e})"
                )));
            }
        } else {
            growth_streak = 0;
        }
        residual_norm = norm;

        // Jacobi step then DIIS extrapolation (from iteration 2 on)
        let mut t1_new = t1.clone();
        let mut t2_new = t2.clone();
        for i in 0..o {
            for a in 0..v {
                if frozen.is_none_or(|fz| !fz.frozen_t1[(i, a)]) {
                    t1_new[(i, a)] += r1[(i, a)] / w.d1[(i, a)];
                }
                for j in 0..o {
                    for b in 0..v {
                        if frozen.is_none_or(|fz| !fz.frozen_t2[(i, j, a, b)]) {
                            t2_new[(i, j, a, b)] += r2[(i, j, a, b)] / w.d2[(i, j, a, b)];
                        }
                    }
                }
            }
        }
        if iter >= 2 {
            let flat = diis.push_and_extrapolate(flatten(&t1_new, &t2_new), flatten(&r1, &r2));
            let (a, b) = unflatten(&flat, o, v);
            t1_new = a;
            t2_new = b;
            // keep the frozen block bit-identical
            if let Some(fz) = frozen {
                for i in 0..o {
                    for a in 0..v {
                        if fz.frozen_t1[(i, a)] {
                            t1_new[(i, a)] = fz.t1[(i, a)];
                        }
                        for j in 0..o {
                            for b in 0..v {
                                if fz.frozen_t2[(i, j, a, b)] {
                                    t2_new[(i, j, a, b)] = fz.t2[(i, j, a, b)];
                                }
                            }
                        }
                    }
                }
            }
        }
        t1 = t1_new;
        t2 = t2_new;
    }

    let e_correlation = energy_from_work(&w, &t1, &t2);
    let mut amplitudes = AmplitudeSet::zero(space);
    amplitudes.t1 = t1;
    amplitudes.t2 = t2;
    if let Some(fz) = frozen {
        amplitudes.frozen_t1 = fz.frozen_t1.clone();
        amplitudes.frozen_t2 = fz.frozen_t2.clone();
    }
    if let Some(ext) = external {
        amplitudes.t3 = ext.t3.clone();
        amplitudes.t4 = ext.t4.clone();
    }
    let result = CCResult {
        e_total: e_hf + e_correlation,
        e_correlation,
        e_hf,
        amplitudes,
        iterations,
        final_residual_norm: residual_norm,
        converged,
    };
    if !converged {
        return Err(SplitccError::NonConvergence(format!(
            "CCSD residual {:.3e} after {} iterations (tolerance {:.0e})",
            residual_norm, iterations, config.residual_tolerance
        )));
    }
    Ok(result)
}

/// Plain CCSD (optionally warm-started from `initial`).
pub fn solve_ccsd(
    basis: &SpinOrbitalBasis,
    config: &SolverConfig,
    initial: Option<&AmplitudeSet>,
) -> Result<CCResult> {
    solve_core(basis, config, initial, None, None)
}

/// Tailored CCSD: the frozen block of `frozen` is held fixed; the energy
/// splits into the active-block functional value e_as and the remainder.
pub fn solve_tccsd(
    basis: &SpinOrbitalBasis,
    config: &SolverConfig,
    frozen: &AmplitudeSet,
) -> Result<TCCResult> {
    let base = solve_core(basis, config, None, Some(frozen), None)?;
    let (e_as, e_ext) = tcc_decomposition(basis, &base);
    Ok(TCCResult { base, e_as, e_ext })
}

/// e_as = energy functional restricted to frozen-block amplitudes;
/// e_ext = e_correlation − e_as.
pub fn tcc_decomposition(basis: &SpinOrbitalBasis, result: &CCResult) -> (f64, f64) {
    let amps = &result.amplitudes;
    let mut t1a = amps.t1.clone();
    let mut t2a = amps.t2.clone();
    ndarray::Zip::from(&mut t1a)
        .and(&amps.frozen_t1)
        .for_each(|t, &fz| {
            if !fz {
                *t = 0.0;
            }
        });
    ndarray::Zip::from(&mut t2a)
        .and(&amps.frozen_t2)
        .for_each(|t, &fz| {
            if !fz {
                *t = 0.0;
            }
        });
    let e_as = cc_energy(&t1a, &t2a, basis);
    (e_as, result.e_correlation - e_as)
}

/// ec-CC: CCSDTQ singles/doubles projections with fixed sparse T3/T4 taken
/// from `external` (missing entries are zeros, degenerating to CCSD).
pub fn solve_eccc(
    basis: &SpinOrbitalBasis,
    external: &AmplitudeSet,
    config: &SolverConfig,
) -> Result<CCResult> {
    let ext = External {
        t3: external.t3.clone(),
        t4: external.t4.clone(),
        t1: external.t1.clone(),
        mode: config.t1t3_mode,
    };
    solve_core(basis, config, Some(external), None, Some(&ext))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrals::{parse_fcidump, to_spin_orbitals, Ordering};

    #[test]
    fn diagnostics_closed_forms() {
        let t1 = Array2::zeros((2, 3));
        let (t1d, d1d) = diagnostics(&t1, 2).unwrap();
        assert_eq!((t1d, d1d), (0.0, 0.0));

        let mut t1 = Array2::zeros((2, 3));
        t1[(0, 1)] = 0.1;
        let (t1d, d1d) = diagnostics(&t1, 2).unwrap();
        assert!((t1d - 0.1 / 2.0_f64.sqrt()).abs() < 1e-14);
        assert!((d1d - 0.1).abs() < 1e-12);
    }

    #[test]
    fn zero_amplitudes_zero_energy() {
        let text = "&FCI NORB=2,NELEC=2,MS2=0,\n&END\n0.5 1 1 1 1\n-1.0 1 1 0 0\n-0.3 2 2 0 0\n";
        let mi = parse_fcidump(text).unwrap();
        let b = to_spin_orbitals(&mi, Ordering::Blocked).unwrap();
        let space = SpaceMap::from_reference(&b.reference_occupation, b.n / 2);
        let t1 = Array2::zeros((space.n_occ(), space.n_virt()));
        let t2 = Array4::zeros((space.n_occ(), space.n_occ(), space.n_virt(), space.n_virt()));
        assert_eq!(cc_energy(&t1, &t2, &b), 0.0);
    }
}
