//! Determinant-basis CI: exact diagonalization (FCI/CASCI), rank-truncated
//! CI, and overlap extraction with Fermi-vacuum sign conventions.
//!
//! Determinants are (alpha, beta) bit masks over spatial orbitals; all
//! Hamiltonian matrix elements come from Slater-Condon rules evaluated on
//! the blocked spin-orbital masks.

use nalgebra::DMatrix;
use std::collections::{BTreeMap, HashMap};

use crate::error::{Result, SplitccError};
use crate::integrals::SpinOrbitalBasis;

pub const C0_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Determinant {
    pub alpha_mask: u64,
    pub beta_mask: u64,
}

impl Determinant {
    pub fn from_occupied(occ: &[usize], n_spatial: usize) -> Self {
        let mut d = Determinant {
            alpha_mask: 0,
            beta_mask: 0,
        };
        for &p in occ {
            if p < n_spatial {
                d.alpha_mask |= 1 << p;
            } else {
                d.beta_mask |= 1 << (p - n_spatial);
            }
        }
        d
    }

    /// Occupied spin orbitals in blocked ordering, ascending.
    pub fn occupied(&self, n_spatial: usize) -> Vec<usize> {
        let mut occ: Vec<usize> = (0..n_spatial)
            .filter(|p| self.alpha_mask >> p & 1 == 1)
            .collect();
        occ.extend(
            (0..n_spatial)
                .filter(|p| self.beta_mask >> p & 1 == 1)
                .map(|p| p + n_spatial),
        );
        occ
    }

    /// Combined occupation mask over blocked spin orbitals (needs 2·n_spatial ≤ 128).
    pub fn spin_mask(&self, n_spatial: usize) -> u128 {
        (self.alpha_mask as u128) | ((self.beta_mask as u128) << n_spatial)
    }

    pub fn excitation_rank_from(&self, other: &Determinant) -> u32 {
        ((self.alpha_mask ^ other.alpha_mask).count_ones()
            + (self.beta_mask ^ other.beta_mask).count_ones())
            / 2
    }
}

/// A canonical excitation: occupied and virtual spin orbitals strictly ascending.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExcitationLabel {
    pub occ: Vec<usize>,
    pub virt: Vec<usize>,
}

impl ExcitationLabel {
    pub fn new(mut occ: Vec<usize>, mut virt: Vec<usize>) -> Self {
        occ.sort_unstable();
        virt.sort_unstable();
        ExcitationLabel { occ, virt }
    }

    pub fn rank(&self) -> usize {
        self.occ.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapEntry {
    pub value: f64,
    pub variance: Option<f64>,
}

/// Excitation-labeled overlaps ⟨Φ_ν|Ψ⟩ — the "quantum input" object.
#[derive(Debug, Clone)]
pub struct OverlapSet {
    pub reference: Determinant,
    pub n_spatial: usize,
    pub c0: f64,
    pub c0_variance: Option<f64>,
    pub entries: BTreeMap<ExcitationLabel, OverlapEntry>,
}

#[derive(Debug, Clone)]
pub struct CIVector {
    pub basis: Vec<Determinant>,
    /// (re, im) pairs; exact solver output is real.
    pub coefficients: Vec<(f64, f64)>,
    pub reference: Determinant,
    pub n_spatial: usize,
}

impl CIVector {
    pub fn is_real(&self) -> bool {
        self.coefficients.iter().all(|&(_, im)| im == 0.0)
    }

    pub fn norm(&self) -> f64 {
        self.coefficients
            .iter()
            .map(|&(re, im)| re * re + im * im)
            .sum::<f64>()
            .sqrt()
    }
}

/// All determinants with the given electron counts; with `max_rank`, only
/// those within that many total excitations of `reference`.
pub fn enumerate_determinants(
    n_spatial: usize,
    n_alpha: usize,
    n_beta: usize,
    max_rank: Option<u32>,
    reference: Option<Determinant>,
) -> Result<Vec<Determinant>> {
    if n_alpha > n_spatial || n_beta > n_spatial {
        return Err(SplitccError::InvalidInput(format!(
            "electron counts ({n_alpha}, {n_beta}) exceed {n_spatial} spatial orbitals"
        )));
    }
    if max_rank.is_some() && reference.is_none() {
        return Err(SplitccError::InvalidInput(
            "max_rank requires a reference determinant".into(),
        ));
    }
    let alpha_strings = bit_combinations(n_spatial, n_alpha);
    let beta_strings = bit_combinations(n_spatial, n_beta);
    let mut dets = Vec::with_capacity(alpha_strings.len() * beta_strings.len());
    for &a in &alpha_strings {
        for &b in &beta_strings {
            let d = Determinant {
                alpha_mask: a,
                beta_mask: b,
            };
            if let (Some(r), Some(refd)) = (max_rank, reference.as_ref()) {
                if d.excitation_rank_from(refd) > r {
                    continue;
                }
            }
            dets.push(d);
        }
    }
    Ok(dets)
}

/// All `k`-subsets of `n` bits, ascending as integers.
fn bit_combinations(n: usize, k: usize) -> Vec<u64> {
    if k == 0 {
        return vec![0];
    }
    let mut out = Vec::new();
    let mut mask: u64 = (1 << k) - 1;
    let limit: u64 = 1 << n;
    while mask < limit {
        out.push(mask);
        // Gosper's hack: next subset with the same popcount
        let c = mask & mask.wrapping_neg();
        let r = mask + c;
        mask = (((r ^ mask) >> 2) / c) | r;
    }
    out
}

#[inline]
fn sign_below(mask: u128, p: usize) -> f64 {
    let below = mask & ((1u128 << p) - 1);
    if below.count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Slater-Condon matrix element ⟨D1|H|D2⟩ (without the core energy).
pub fn hamiltonian_element(basis: &SpinOrbitalBasis, d1: &Determinant, d2: &Determinant) -> f64 {
    let ns = basis.n / 2;
    let m1 = d1.spin_mask(ns);
    let m2 = d2.spin_mask(ns);
    let diff = m1 ^ m2;
    match diff.count_ones() {
        0 => {
            let occ = d1.occupied(ns);
            let mut e = 0.0;
            for &i in &occ {
                e += basis.h[(i, i)];
                for &j in &occ {
                    e += 0.5 * basis.g[(i, j, i, j)];
                }
            }
            e
        }
        2 => {
            // single excitation m (in d2) -> p (in d1)
            let p = (diff & m1).trailing_zeros() as usize;
            let m = (diff & m2).trailing_zeros() as usize;
            let mut val = basis.h[(p, m)];
            let common = m1 & m2;
            let mut rest = common;
            while rest != 0 {
                let i = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                val += basis.g[(p, i, m, i)];
            }
            // phase: electrons between m and p in the common occupation
            let (lo, hi) = if p < m { (p, m) } else { (m, p) };
            let between = common & (((1u128 << hi) - 1) ^ ((1u128 << (lo + 1)) - 1));
            if between.count_ones().is_multiple_of(2) {
                val
            } else {
                -val
            }
        }
        4 => {
            let in1 = diff & m1;
            let in2 = diff & m2;
            let p = in1.trailing_zeros() as usize;
            let q = 127 - in1.leading_zeros() as usize;
            let m = in2.trailing_zeros() as usize;
            let n = 127 - in2.leading_zeros() as usize;
            // phase from aligning both determinants to a common order
            let mut sign = 1.0;
            let mut mask = m2;
            for &(ann, _) in &[(m, 0), (n, 0)] {
                sign *= sign_below(mask, ann);
                mask &= !(1u128 << ann);
            }
            for &(cre, _) in &[(q, 0), (p, 0)] {
                sign *= sign_below(mask, cre);
                mask |= 1u128 << cre;
            }
            debug_assert_eq!(mask, m1);
            sign * basis.g[(p, q, m, n)]
        }
        _ => 0.0,
    }
}

/// Diagonal element including the core energy (Davidson preconditioner).
fn diagonal_element(basis: &SpinOrbitalBasis, d: &Determinant) -> f64 {
    basis.e_core + hamiltonian_element(basis, d, d)
}

const DENSE_DET_LIMIT: usize = 5000;
const DAVIDSON_TOL: f64 = 1e-10;
const DAVIDSON_MAX_ITER: usize = 200;

/// Lowest `n_roots` eigenpairs of H projected onto `dets`.
///
/// Dense symmetric diagonalization up to 5 000 determinants, Davidson with a
/// diagonal preconditioner above. Ground-state phase is fixed so the
/// largest-magnitude coefficient is positive.
pub fn solve_ci(
    basis: &SpinOrbitalBasis,
    dets: &[Determinant],
    n_roots: usize,
) -> Result<(Vec<f64>, Vec<CIVector>)> {
    if dets.is_empty() {
        return Err(SplitccError::InvalidInput("empty determinant basis".into()));
    }
    let ns = basis.n / 2;
    let reference = Determinant::from_occupied(&basis.reference_occupation, ns);
    let (energies, columns) = if dets.len() <= DENSE_DET_LIMIT {
        solve_dense(basis, dets, n_roots)
    } else {
        solve_davidson(basis, dets, n_roots)
    }?;
    let vectors = columns
        .into_iter()
        .map(|mut col| {
            let imax = col
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
                .map(|(i, _)| i)
                .unwrap();
            if col[imax] < 0.0 {
                for v in col.iter_mut() {
                    *v = -*v;
                }
            }
            CIVector {
                basis: dets.to_vec(),
                coefficients: col.into_iter().map(|v| (v, 0.0)).collect(),
                reference,
                n_spatial: ns,
            }
        })
        .collect();
    Ok((energies, vectors))
}

fn solve_dense(
    basis: &SpinOrbitalBasis,
    dets: &[Determinant],
    n_roots: usize,
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = dets.len();
    let mut hmat = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            if dets[i].excitation_rank_from(&dets[j]) > 2 {
                continue;
            }
            let v = hamiltonian_element(basis, &dets[i], &dets[j]);
            hmat[(i, j)] = v;
            hmat[(j, i)] = v;
        }
        hmat[(i, i)] += basis.e_core;
    }
    let eig = hmat.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let k = n_roots.min(n);
    let energies = order[..k].iter().map(|&i| eig.eigenvalues[i]).collect();
    let columns = order[..k]
        .iter()
        .map(|&i| eig.eigenvectors.column(i).iter().copied().collect())
        .collect();
    Ok((energies, columns))
}

/// Sparse Hamiltonian in triplet form, built by excitation lookup.
fn build_sparse(basis: &SpinOrbitalBasis, dets: &[Determinant]) -> Vec<Vec<(usize, f64)>> {
    let ns = basis.n / 2;
    let index: HashMap<Determinant, usize> =
        dets.iter().enumerate().map(|(i, d)| (*d, i)).collect();
    let n_spin = basis.n;
    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); dets.len()];
    for (i, det) in dets.iter().enumerate() {
        rows[i].push((i, diagonal_element(basis, det)));
        let occ = det.occupied(ns);
        let occ_mask = det.spin_mask(ns);
        let virts: Vec<usize> = (0..n_spin).filter(|&p| occ_mask >> p & 1 == 0).collect();
        // singles and doubles reachable from det; keep j < i to fill both halves
        for (oi, &o1) in occ.iter().enumerate() {
            for (vi, &v1) in virts.iter().enumerate() {
                let m1 = occ_mask & !(1u128 << o1) | (1u128 << v1);
                if let Some(&j) = index.get(&det_from_mask(m1, ns)) {
                    if j < i {
                        let v = hamiltonian_element(basis, &dets[j], det);
                        if v != 0.0 {
                            rows[i].push((j, v));
                            rows[j].push((i, v));
                        }
                    }
                }
                for &o2 in &occ[oi + 1..] {
                    for &v2 in &virts[vi + 1..] {
                        let m2 = m1 & !(1u128 << o2) | (1u128 << v2);
                        if let Some(&j) = index.get(&det_from_mask(m2, ns)) {
                            if j < i {
                                let v = hamiltonian_element(basis, &dets[j], det);
                                if v != 0.0 {
                                    rows[i].push((j, v));
                                    rows[j].push((i, v));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    rows
}

fn det_from_mask(mask: u128, n_spatial: usize) -> Determinant {
    Determinant {
        alpha_mask: (mask & ((1u128 << n_spatial) - 1)) as u64,
        beta_mask: (mask >> n_spatial) as u64,
    }
}

fn solve_davidson(
    basis: &SpinOrbitalBasis,
    dets: &[Determinant],
    n_roots: usize,
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = dets.len();
    let rows = build_sparse(basis, dets);
    let diag: Vec<f64> = (0..n)
        .map(|i| {
            rows[i]
                .iter()
                .find(|&&(j, _)| j == i)
                .map(|&(_, v)| v)
                .unwrap_or(0.0)
        })
        .collect();
    let matvec = |v: &DMatrix<f64>, col: usize| -> Vec<f64> {
        let mut out = vec![0.0; n];
        for (i, row) in rows.iter().enumerate() {
            let mut acc = 0.0;
            for &(j, h) in row {
                acc += h * v[(j, col)];
            }
            out[i] = acc;
        }
        out
    };

    // initial guesses: unit vectors at the lowest-diagonal determinants
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| diag[a].total_cmp(&diag[b]));
    let k = n_roots.min(n);
    let mut subspace: Vec<Vec<f64>> = (0..k)
        .map(|r| {
            let mut v = vec![0.0; n];
            v[order[r]] = 1.0;
            v
        })
        .collect();

    let max_subspace = (8 * k).max(24).min(n);
    for _iter in 0..DAVIDSON_MAX_ITER {
        // orthonormalize subspace (modified Gram-Schmidt)
        let mut basis_vecs: Vec<Vec<f64>> = Vec::new();
        for v in &subspace {
            let mut w = v.clone();
            for b in &basis_vecs {
                let dot: f64 = w.iter().zip(b).map(|(x, y)| x * y).sum();
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= dot * bi;
                }
            }
            let nrm: f64 = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            if nrm > 1e-8 {
                for wi in w.iter_mut() {
                    *wi /= nrm;
                }
                basis_vecs.push(w);
            }
        }
        let m = basis_vecs.len();
        let vmat = DMatrix::from_fn(n, m, |i, j| basis_vecs[j][i]);
        let mut hv = DMatrix::zeros(n, m);
        for j in 0..m {
            let col = matvec(&vmat, j);
            for i in 0..n {
                hv[(i, j)] = col[i];
            }
        }
        let hs = vmat.transpose() * &hv;
        let hs = (&hs + hs.transpose()) * 0.5;
        let eig = hs.symmetric_eigen();
        let mut sub_order: Vec<usize> = (0..m).collect();
        sub_order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

        let mut energies = Vec::with_capacity(k);
        let mut ritz: Vec<Vec<f64>> = Vec::with_capacity(k);
        let mut residuals: Vec<Vec<f64>> = Vec::with_capacity(k);
        let mut max_res = 0.0f64;
        for &s in sub_order.iter().take(k) {
            let theta = eig.eigenvalues[s];
            let y = eig.eigenvectors.column(s);
            let xv = &vmat * y;
            let rx = &hv * y - theta * &xv;
            let rnorm = rx.norm();
            max_res = max_res.max(rnorm);
            energies.push(theta);
            ritz.push(xv.iter().copied().collect());
            residuals.push(rx.iter().copied().collect());
        }
        if max_res < DAVIDSON_TOL {
            return Ok((energies, ritz));
        }
        // diagonal-preconditioned corrections
        subspace = basis_vecs;
        for r in 0..k {
            let theta = energies[r];
            let mut corr = residuals[r].clone();
            for (i, c) in corr.iter_mut().enumerate() {
                let denom = theta - diag[i];
                *c /= if denom.abs() > 1e-8 { denom } else { 1e-8 };
            }
            subspace.push(corr);
        }
        if subspace.len() > max_subspace {
            // restart from current Ritz vectors
            let mut new_sub = ritz;
            for r in 0..k {
                let theta = energies[r];
                let mut corr = residuals[r].clone();
                for (i, c) in corr.iter_mut().enumerate() {
                    let denom = theta - diag[i];
                    *c /= if denom.abs() > 1e-8 { denom } else { 1e-8 };
                }
                new_sub.push(corr);
            }
            subspace = new_sub;
        }
    }
    Err(SplitccError::NonConvergence(format!(
        "Davidson did not reach {DAVIDSON_TOL:.0e} in {DAVIDSON_MAX_ITER} iterations"
    )))
}

/// Fermi-vacuum phase relating the canonically ordered excited determinant
/// to the normal-ordered excitation string applied to `reference`.
///
/// The string is a†_{a₁}…a†_{aₖ} a_{iₖ}…a_{i₁} for ascending (i…), (a…);
/// each operator contributes (−1)^(occupied orbitals below its index).
pub fn excitation_phase(
    reference: &Determinant,
    label: &ExcitationLabel,
    n_spatial: usize,
) -> Result<f64> {
    let mut mask = reference.spin_mask(n_spatial);
    let mut sign = 1.0;
    for &i in label.occ.iter() {
        if mask >> i & 1 == 0 {
            return Err(SplitccError::InvalidInput(format!(
                "excitation annihilates unoccupied spin orbital {i}"
            )));
        }
        sign *= sign_below(mask, i);
        mask &= !(1u128 << i);
    }
    for &a in label.virt.iter().rev() {
        if mask >> a & 1 == 1 {
            return Err(SplitccError::InvalidInput(format!(
                "excitation creates into occupied spin orbital {a}"
            )));
        }
        sign *= sign_below(mask, a);
        mask |= 1u128 << a;
    }
    Ok(sign)
}

/// Apply a canonical excitation to a determinant's spin mask.
pub fn excite(reference: &Determinant, label: &ExcitationLabel, n_spatial: usize) -> Determinant {
    let mut mask = reference.spin_mask(n_spatial);
    for &i in &label.occ {
        mask &= !(1u128 << i);
    }
    for &a in &label.virt {
        mask |= 1u128 << a;
    }
    det_from_mask(mask, n_spatial)
}

/// Orbital-space relabeling for overlaps extracted in an active space.
#[derive(Debug, Clone)]
pub struct ActiveMap {
    /// Sorted active spatial orbitals in full-space numbering.
    pub active_spatial: Vec<usize>,
    pub n_spatial_full: usize,
}

impl ActiveMap {
    fn map_spin_orbital(&self, p: usize, n_spatial_act: usize) -> usize {
        if p < n_spatial_act {
            self.active_spatial[p]
        } else {
            self.active_spatial[p - n_spatial_act] + self.n_spatial_full
        }
    }
}

/// All canonical excitations of the reference up to `max_rank`, by rank.
pub fn enumerate_labels(
    reference: &Determinant,
    n_spatial: usize,
    max_rank: usize,
) -> Vec<ExcitationLabel> {
    let occ = reference.occupied(n_spatial);
    let occ_mask = reference.spin_mask(n_spatial);
    let virt: Vec<usize> = (0..2 * n_spatial)
        .filter(|&p| occ_mask >> p & 1 == 0)
        .collect();
    let n_alpha_of = |set: &[usize]| set.iter().filter(|&&p| p < n_spatial).count();
    let mut labels = Vec::new();
    for rank in 1..=max_rank {
        if rank > occ.len() || rank > virt.len() {
            break;
        }
        for o_sub in combinations(&occ, rank) {
            for v_sub in combinations(&virt, rank) {
                // spin-conserving excitations only (equal α count both sides)
                if n_alpha_of(&o_sub) != n_alpha_of(&v_sub) {
                    continue;
                }
                labels.push(ExcitationLabel {
                    occ: o_sub.clone(),
                    virt: v_sub,
                });
            }
        }
    }
    labels
}

fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    use itertools::Itertools;
    items.iter().copied().combinations(k).collect()
}

/// Overlaps ⟨Φ_ν|Ψ⟩ for every excitation ν ≤ max_rank, Fermi-vacuum signs.
///
/// Labels of determinants absent from the CI basis get value zero. With an
/// `active_map`, labels are re-indexed into full-space orbital numbering.
pub fn extract_overlaps(
    state: &CIVector,
    max_rank: usize,
    active_map: Option<&ActiveMap>,
) -> Result<OverlapSet> {
    if !state.is_real() {
        return Err(SplitccError::InvalidInput(
            "state has complex coefficients; apply phase_align first".into(),
        ));
    }
    let ns = state.n_spatial;
    let index: HashMap<Determinant, usize> = state
        .basis
        .iter()
        .enumerate()
        .map(|(i, d)| (*d, i))
        .collect();
    let c0 = index
        .get(&state.reference)
        .map(|&i| state.coefficients[i].0)
        .unwrap_or(0.0);
    if c0.abs() < C0_THRESHOLD {
        return Err(SplitccError::ReferenceDominance {
            c0,
            threshold: C0_THRESHOLD,
        });
    }
    let mut entries = BTreeMap::new();
    for label in enumerate_labels(&state.reference, ns, max_rank) {
        let det = excite(&state.reference, &label, ns);
        let value = match index.get(&det) {
            Some(&i) => excitation_phase(&state.reference, &label, ns)? * state.coefficients[i].0,
            None => 0.0,
        };
        let out_label = match active_map {
            Some(map) => ExcitationLabel::new(
                label
                    .occ
                    .iter()
                    .map(|&p| map.map_spin_orbital(p, ns))
                    .collect(),
                label
                    .virt
                    .iter()
                    .map(|&p| map.map_spin_orbital(p, ns))
                    .collect(),
            ),
            None => label,
        };
        entries.insert(
            out_label,
            OverlapEntry {
                value,
                variance: None,
            },
        );
    }
    let (reference, n_spatial) = match active_map {
        Some(map) => {
            let occ_full: Vec<usize> = state
                .reference
                .occupied(ns)
                .iter()
                .map(|&p| map.map_spin_orbital(p, ns))
                .collect();
            (
                Determinant::from_occupied(&occ_full, map.n_spatial_full),
                map.n_spatial_full,
            )
        }
        None => (state.reference, ns),
    };
    Ok(OverlapSet {
        reference,
        n_spatial,
        c0,
        c0_variance: None,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinant_counts() {
        assert_eq!(
            enumerate_determinants(6, 3, 3, None, None).unwrap().len(),
            400
        );
        assert_eq!(
            enumerate_determinants(4, 2, 2, None, None).unwrap().len(),
            36
        );
        let reference = Determinant::from_occupied(&[0, 1, 4, 5], 4);
        assert_eq!(
            enumerate_determinants(4, 2, 2, Some(1), Some(reference))
                .unwrap()
                .len(),
            9
        );
    }

    #[test]
    fn max_rank_without_reference_rejected() {
        assert!(enumerate_determinants(4, 2, 2, Some(1), None).is_err());
    }

    #[test]
    fn identity_and_adjacent_phases() {
        let reference = Determinant::from_occupied(&[0, 1, 4, 5], 4);
        let identity = ExcitationLabel::new(vec![], vec![]);
        assert_eq!(excitation_phase(&reference, &identity, 4).unwrap(), 1.0);
        // 1 -> 2: no occupied orbitals crossed after removing 1
        let single = ExcitationLabel::new(vec![1], vec![2]);
        assert_eq!(excitation_phase(&reference, &single, 4).unwrap(), 1.0);
        // 0 -> 2 crosses occupied orbital 1
        let crossing = ExcitationLabel::new(vec![0], vec![2]);
        assert_eq!(excitation_phase(&reference, &crossing, 4).unwrap(), -1.0);
    }

    #[test]
    fn phase_rejects_invalid_labels() {
        let reference = Determinant::from_occupied(&[0, 1], 2);
        let from_virtual = ExcitationLabel::new(vec![2], vec![3]);
        assert!(excitation_phase(&reference, &from_virtual, 2).is_err());
        let into_occupied = ExcitationLabel::new(vec![0], vec![1]);
        assert!(excitation_phase(&reference, &into_occupied, 2).is_err());
    }
}
