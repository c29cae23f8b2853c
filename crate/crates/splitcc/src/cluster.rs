//! Cluster analysis: conversion between CI coefficients and cluster
//! amplitudes through rank 4, plus the quantum-input post-processing steps
//! (phase alignment, variance filtering, disconnected dropping, active-space
//! embedding).
//!
//! The CI↔CC relation is C = e^T − 1 restricted to each excitation label.
//! Both directions are evaluated by enumerating pairings of a label's
//! occupied/virtual index sets into blocks; each pairing contributes the
//! product of block amplitudes with the parity of the index rearrangement.

use ndarray::{Array2, Array4};
use std::collections::BTreeMap;

use crate::ci::{CIVector, ExcitationLabel, OverlapEntry, OverlapSet};
use crate::error::{Result, SplitccError};
use crate::integrals::{ActiveSpaceSpec, SpinOrbitalBasis};

pub const DEFAULT_CI_ZERO_THRESHOLD: f64 = 1e-12;

/// Occupied/virtual spin-orbital layout of an amplitude set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpaceMap {
    pub n_spatial: usize,
    /// Occupied spin orbitals, ascending.
    pub occ: Vec<usize>,
    /// Virtual spin orbitals, ascending.
    pub virt: Vec<usize>,
}

impl SpaceMap {
    pub fn from_reference(occ: &[usize], n_spatial: usize) -> Self {
        let occ_set: std::collections::HashSet<usize> = occ.iter().copied().collect();
        let virt = (0..2 * n_spatial)
            .filter(|p| !occ_set.contains(p))
            .collect();
        SpaceMap {
            n_spatial,
            occ: {
                let mut o = occ.to_vec();
                o.sort_unstable();
                o
            },
            virt,
        }
    }

    pub fn occ_slot(&self, p: usize) -> Option<usize> {
        self.occ.binary_search(&p).ok()
    }

    pub fn virt_slot(&self, p: usize) -> Option<usize> {
        self.virt.binary_search(&p).ok()
    }

    pub fn n_occ(&self) -> usize {
        self.occ.len()
    }

    pub fn n_virt(&self) -> usize {
        self.virt.len()
    }
}

/// Dense T1/T2 plus sparse T3/T4 cluster amplitudes with a freezing mask.
#[derive(Debug, Clone)]
pub struct AmplitudeSet {
    pub space: SpaceMap,
    /// t1[i][a] over occupied/virtual slots.
    pub t1: Array2<f64>,
    /// t2[i][j][a][b], fully antisymmetric.
    pub t2: Array4<f64>,
    /// Sparse rank-3/4 amplitudes keyed by canonical spin-orbital labels.
    pub t3: BTreeMap<ExcitationLabel, f64>,
    pub t4: BTreeMap<ExcitationLabel, f64>,
    /// Slots excluded from solver updates (TCC active block); closed under
    /// index permutation by construction.
    pub frozen_t1: Array2<bool>,
    pub frozen_t2: Array4<bool>,
}

impl AmplitudeSet {
    pub fn zero(space: SpaceMap) -> Self {
        let (o, v) = (space.n_occ(), space.n_virt());
        AmplitudeSet {
            space,
            t1: Array2::zeros((o, v)),
            t2: Array4::zeros((o, o, v, v)),
            t3: BTreeMap::new(),
            t4: BTreeMap::new(),
            frozen_t1: Array2::from_elem((o, v), false),
            frozen_t2: Array4::from_elem((o, o, v, v), false),
        }
    }

    /// Value of a canonical label of any rank ≤ 4 (zero when absent).
    pub fn value(&self, label: &ExcitationLabel) -> f64 {
        match label.rank() {
            1 => {
                let (Some(i), Some(a)) = (
                    self.space.occ_slot(label.occ[0]),
                    self.space.virt_slot(label.virt[0]),
                ) else {
                    return 0.0;
                };
                self.t1[(i, a)]
            }
            2 => {
                let (Some(i), Some(j), Some(a), Some(b)) = (
                    self.space.occ_slot(label.occ[0]),
                    self.space.occ_slot(label.occ[1]),
                    self.space.virt_slot(label.virt[0]),
                    self.space.virt_slot(label.virt[1]),
                ) else {
                    return 0.0;
                };
                self.t2[(i, j, a, b)]
            }
            3 => self.t3.get(label).copied().unwrap_or(0.0),
            4 => self.t4.get(label).copied().unwrap_or(0.0),
            _ => 0.0,
        }
    }

    /// Store a canonical rank-1/2 value with all antisymmetric images.
    pub fn set_dense(&mut self, label: &ExcitationLabel, value: f64) {
        match label.rank() {
            1 => {
                let i = self.space.occ_slot(label.occ[0]).unwrap();
                let a = self.space.virt_slot(label.virt[0]).unwrap();
                self.t1[(i, a)] = value;
            }
            2 => {
                let i = self.space.occ_slot(label.occ[0]).unwrap();
                let j = self.space.occ_slot(label.occ[1]).unwrap();
                let a = self.space.virt_slot(label.virt[0]).unwrap();
                let b = self.space.virt_slot(label.virt[1]).unwrap();
                self.t2[(i, j, a, b)] = value;
                self.t2[(j, i, a, b)] = -value;
                self.t2[(i, j, b, a)] = -value;
                self.t2[(j, i, b, a)] = value;
            }
            r => panic!("set_dense supports ranks 1-2, got {r}"),
        }
    }
}

/// Post-processing bookkeeping for the filter pipeline.
#[derive(Debug, Clone, Default, serde::Serialize)]
pub struct FilterReport {
    pub n_zeroed_by_variance: usize,
    pub n_dropped_disconnected: usize,
    pub variance_multiple: Option<f64>,
    pub ci_zero_threshold: Option<f64>,
}

/// Parity of the permutation sorting `items` ascending (+1/−1).
fn sort_parity(items: &[usize]) -> f64 {
    let mut inversions = 0;
    for i in 0..items.len() {
        for j in i + 1..items.len() {
            if items[i] > items[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// All set partitions of `items` into unordered nonempty blocks.
fn set_partitions(items: &[usize]) -> Vec<Vec<Vec<usize>>> {
    if items.is_empty() {
        return vec![vec![]];
    }
    let first = items[0];
    let mut out = Vec::new();
    for mut sub in set_partitions(&items[1..]) {
        // first element joins each existing block, or opens a new one
        for b in 0..sub.len() {
            let mut clone = sub.clone();
            clone[b].insert(0, first);
            out.push(clone);
        }
        sub.insert(0, vec![first]);
        out.push(sub);
    }
    out
}

/// Ordered partitions of `items` into subsets of the given sizes.
fn sized_partitions(items: &[usize], sizes: &[usize]) -> Vec<Vec<Vec<usize>>> {
    use itertools::Itertools;
    if sizes.is_empty() {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in items.iter().copied().combinations(sizes[0]) {
        let rest: Vec<usize> = items
            .iter()
            .copied()
            .filter(|p| !first.contains(p))
            .collect();
        for mut tail in sized_partitions(&rest, &sizes[1..]) {
            tail.insert(0, first.clone());
            out.push(tail);
        }
    }
    out
}

/// Every way to factor a label into ≥ `min_blocks` sub-excitations, with the
/// rearrangement parity. Blocks are canonical (sorted) labels.
fn pairings(occ: &[usize], virt: &[usize], min_blocks: usize) -> Vec<(f64, Vec<ExcitationLabel>)> {
    let mut out = Vec::new();
    for occ_blocks in set_partitions(occ) {
        if occ_blocks.len() < min_blocks {
            continue;
        }
        let sizes: Vec<usize> = occ_blocks.iter().map(|b| b.len()).collect();
        for virt_blocks in sized_partitions(virt, &sizes) {
            let occ_concat: Vec<usize> = occ_blocks.iter().flatten().copied().collect();
            let virt_concat: Vec<usize> = virt_blocks.iter().flatten().copied().collect();
            let sign = sort_parity(&occ_concat) * sort_parity(&virt_concat);
            let blocks = occ_blocks
                .iter()
                .zip(&virt_blocks)
                .map(|(o, v)| ExcitationLabel::new(o.clone(), v.clone()))
                .collect();
            out.push((sign, blocks));
        }
    }
    out
}

/// CI coefficients → cluster amplitudes (intermediate normalization by c0).
pub fn ci_to_cc(overlaps: &OverlapSet, max_rank: usize) -> Result<AmplitudeSet> {
    if max_rank > 4 {
        return Err(SplitccError::InvalidInput(format!(
            "cluster analysis supports rank ≤ 4, got {max_rank}"
        )));
    }
    if overlaps.c0.abs() < crate::ci::C0_THRESHOLD {
        return Err(SplitccError::ReferenceDominance {
            c0: overlaps.c0,
            threshold: crate::ci::C0_THRESHOLD,
        });
    }
    let ns = overlaps.n_spatial;
    let space = SpaceMap::from_reference(&overlaps.reference.occupied(ns), ns);
    let mut t_map: BTreeMap<ExcitationLabel, f64> = BTreeMap::new();
    for rank in 1..=max_rank {
        for (label, entry) in overlaps.entries.iter().filter(|(l, _)| l.rank() == rank) {
            let c = entry.value / overlaps.c0;
            let mut disconnected = 0.0;
            for (sign, blocks) in pairings(&label.occ, &label.virt, 2) {
                let mut prod = sign;
                for b in &blocks {
                    prod *= t_map.get(b).copied().unwrap_or(0.0);
                    if prod == 0.0 {
                        break;
                    }
                }
                disconnected += prod;
            }
            let t = c - disconnected;
            if t != 0.0 || rank <= 2 {
                t_map.insert(label.clone(), t);
            }
        }
    }
    let mut amps = AmplitudeSet::zero(space);
    for (label, t) in t_map {
        match label.rank() {
            1 | 2 => amps.set_dense(&label, t),
            3 => {
                if t != 0.0 {
                    amps.t3.insert(label, t);
                }
            }
            4 => {
                if t != 0.0 {
                    amps.t4.insert(label, t);
                }
            }
            _ => unreachable!(),
        }
    }
    Ok(amps)
}

/// Cluster amplitudes → CI coefficients (c0 = 1); exact inverse of
/// [`ci_to_cc`] for ranks ≤ `max_rank`.
pub fn cc_to_ci(amps: &AmplitudeSet, max_rank: usize) -> Result<OverlapSet> {
    if max_rank > 4 {
        return Err(SplitccError::InvalidInput(format!(
            "cluster analysis supports rank ≤ 4, got {max_rank}"
        )));
    }
    let ns = amps.space.n_spatial;
    let reference = crate::ci::Determinant::from_occupied(&amps.space.occ, ns);
    let mut entries = BTreeMap::new();
    for label in crate::ci::enumerate_labels(&reference, ns, max_rank) {
        let mut c = 0.0;
        for (sign, blocks) in pairings(&label.occ, &label.virt, 1) {
            let mut prod = sign;
            for b in &blocks {
                prod *= amps.value(b);
                if prod == 0.0 {
                    break;
                }
            }
            c += prod;
        }
        entries.insert(
            label,
            OverlapEntry {
                value: c,
                variance: None,
            },
        );
    }
    Ok(OverlapSet {
        reference,
        n_spatial: ns,
        c0: 1.0,
        c0_variance: None,
        entries,
    })
}

/// Rotate by the phase of the largest-magnitude coefficient, keep the real
/// part, renormalize.
pub fn phase_align(state: &CIVector) -> Result<CIVector> {
    let norm = state.norm();
    if norm == 0.0 {
        return Err(SplitccError::InvalidInput("zero CI vector".into()));
    }
    let &(re_max, im_max) = state
        .coefficients
        .iter()
        .max_by(|a, b| (a.0 * a.0 + a.1 * a.1).total_cmp(&(b.0 * b.0 + b.1 * b.1)))
        .unwrap();
    let mag = (re_max * re_max + im_max * im_max).sqrt();
    let (cos_t, sin_t) = (re_max / mag, im_max / mag);
    // multiply by e^{-iθ}, keep the real part
    let mut real: Vec<f64> = state
        .coefficients
        .iter()
        .map(|&(re, im)| re * cos_t + im * sin_t)
        .collect();
    let rnorm = real.iter().map(|x| x * x).sum::<f64>().sqrt();
    if rnorm == 0.0 {
        return Err(SplitccError::InvalidInput(
            "vector is purely imaginary after rotation".into(),
        ));
    }
    for x in real.iter_mut() {
        *x /= rnorm;
    }
    Ok(CIVector {
        basis: state.basis.clone(),
        coefficients: real.into_iter().map(|re| (re, 0.0)).collect(),
        reference: state.reference,
        n_spatial: state.n_spatial,
    })
}

/// Zero entries that are not statistically significant.
///
/// Default rule: zero unless |value| > k·σ. The literal reading of the
/// source protocol ("zero if larger than 2σ") is available via
/// `literal_rule` for A/B comparison.
pub fn filter_variance(
    overlaps: &OverlapSet,
    k: f64,
    literal_rule: bool,
) -> Result<(OverlapSet, FilterReport)> {
    let mut out = overlaps.clone();
    let mut n_zeroed = 0;
    for entry in out.entries.values_mut() {
        let Some(var) = entry.variance else { continue };
        if var < 0.0 {
            return Err(SplitccError::InvalidInput(format!(
                "negative variance {var}"
            )));
        }
        let sigma = var.sqrt();
        let zero = if literal_rule {
            entry.value.abs() > k * sigma
        } else {
            entry.value.abs() <= k * sigma
        };
        if zero && k > 0.0 && entry.value != 0.0 {
            entry.value = 0.0;
            n_zeroed += 1;
        }
    }
    let report = FilterReport {
        n_zeroed_by_variance: n_zeroed,
        variance_multiple: Some(k),
        ..Default::default()
    };
    Ok((out, report))
}

/// Remove T3/T4 entries whose CI coefficient is (numerically) zero — the
/// purely disconnected amplitudes of the Type-II input convention.
///
/// The per-entry threshold is `ci_zero_threshold`, raised to k·σ when the
/// overlap carries a variance (so filtering and dropping compose).
pub fn drop_disconnected(
    amps: &AmplitudeSet,
    overlaps: &OverlapSet,
    ci_zero_threshold: f64,
    variance_multiple: f64,
) -> (AmplitudeSet, FilterReport) {
    let mut out = amps.clone();
    let mut n_dropped = 0;
    let is_zero = |label: &ExcitationLabel| -> bool {
        match overlaps.entries.get(label) {
            Some(entry) => {
                let threshold = match entry.variance {
                    Some(var) => ci_zero_threshold.max(variance_multiple * var.sqrt()),
                    None => ci_zero_threshold,
                };
                entry.value.abs() <= threshold
            }
            None => true,
        }
    };
    out.t3.retain(|label, _| {
        let keep = !is_zero(label);
        if !keep {
            n_dropped += 1;
        }
        keep
    });
    out.t4.retain(|label, _| {
        let keep = !is_zero(label);
        if !keep {
            n_dropped += 1;
        }
        keep
    });
    (
        out,
        FilterReport {
            n_dropped_disconnected: n_dropped,
            ci_zero_threshold: Some(ci_zero_threshold),
            ..Default::default()
        },
    )
}

/// Map active-space amplitudes into a full-space set (zero outside the
/// active image). With `freeze_t12`, the active t1/t2 block is marked frozen
/// (TCC); ec-CC embeds without freezing since t3/t4 are intrinsically fixed.
pub fn embed_active(
    amps: &AmplitudeSet,
    as_spec: &ActiveSpaceSpec,
    full_space: &SpinOrbitalBasis,
    freeze_t12: bool,
) -> Result<AmplitudeSet> {
    let ns_full = full_space.n / 2;
    as_spec.validate(ns_full)?;
    let mut active = as_spec.active_spatial_orbitals.clone();
    active.sort_unstable();
    let ns_act = amps.space.n_spatial;
    if active.len() != ns_act {
        return Err(SplitccError::InvalidInput(format!(
            "amplitude space has {ns_act} spatial orbitals but the active list has {}",
            active.len()
        )));
    }
    let map_spin = |p: usize| -> usize {
        if p < ns_act {
            active[p]
        } else {
            active[p - ns_act] + ns_full
        }
    };
    let full = SpaceMap::from_reference(&full_space.reference_occupation, ns_full);
    let mut out = AmplitudeSet::zero(full);
    let map_label = |label: &ExcitationLabel| -> Result<ExcitationLabel> {
        let occ: Vec<usize> = label.occ.iter().map(|&p| map_spin(p)).collect();
        let virt: Vec<usize> = label.virt.iter().map(|&p| map_spin(p)).collect();
        for &p in occ.iter().chain(&virt) {
            if p >= full_space.n {
                return Err(SplitccError::InvalidInput(format!(
                    "active orbital image {p} outside the full space"
                )));
            }
        }
        // sorted-active mapping is monotone per spin block, so canonical
        // labels stay canonical and no parity is introduced
        Ok(ExcitationLabel { occ, virt })
    };

    for i in 0..amps.space.n_occ() {
        for a in 0..amps.space.n_virt() {
            let label = map_label(&ExcitationLabel::new(
                vec![amps.space.occ[i]],
                vec![amps.space.virt[a]],
            ))?;
            let fi = out.space.occ_slot(label.occ[0]).ok_or_else(|| {
                SplitccError::InvalidInput(
                    "active occupied orbital is not occupied in the full reference".into(),
                )
            })?;
            let fa = out.space.virt_slot(label.virt[0]).ok_or_else(|| {
                SplitccError::InvalidInput(
                    "active virtual orbital is occupied in the full reference".into(),
                )
            })?;
            out.t1[(fi, fa)] = amps.t1[(i, a)];
            if freeze_t12 {
                out.frozen_t1[(fi, fa)] = true;
            }
            for j in 0..amps.space.n_occ() {
                for b in 0..amps.space.n_virt() {
                    let fj = out.space.occ_slot(map_spin(amps.space.occ[j])).unwrap();
                    let fb = out.space.virt_slot(map_spin(amps.space.virt[b])).unwrap();
                    out.t2[(fi, fj, fa, fb)] = amps.t2[(i, j, a, b)];
                    if freeze_t12 {
                        out.frozen_t2[(fi, fj, fa, fb)] = true;
                    }
                }
            }
        }
    }
    for (label, &t) in &amps.t3 {
        out.t3.insert(map_label(label)?, t);
    }
    for (label, &t) in &amps.t4 {
        out.t4.insert(map_label(label)?, t);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ci::Determinant;

    fn overlap_set(
        n_spatial: usize,
        occ: &[usize],
        values: &[(ExcitationLabel, f64)],
    ) -> OverlapSet {
        let reference = Determinant::from_occupied(occ, n_spatial);
        let mut entries = BTreeMap::new();
        for label in crate::ci::enumerate_labels(&reference, n_spatial, 4) {
            entries.insert(
                label,
                OverlapEntry {
                    value: 0.0,
                    variance: None,
                },
            );
        }
        for (label, v) in values {
            entries.insert(
                label.clone(),
                OverlapEntry {
                    value: *v,
                    variance: None,
                },
            );
        }
        OverlapSet {
            reference,
            n_spatial,
            c0: 1.0,
            c0_variance: None,
            entries,
        }
    }

    #[test]
    fn c1_only_gives_disconnected_t2() {
        // 2 spatial orbitals, 2 electrons (one α at 0, one β at 2)
        let l_a = ExcitationLabel::new(vec![0], vec![1]);
        let l_b = ExcitationLabel::new(vec![2], vec![3]);
        let ov = overlap_set(2, &[0, 2], &[(l_a.clone(), 0.3), (l_b.clone(), 0.5)]);
        let amps = ci_to_cc(&ov, 2).unwrap();
        assert_eq!(amps.value(&l_a), 0.3);
        assert_eq!(amps.value(&l_b), 0.5);
        // c2 = 0 ⇒ t2(0,2→1,3) = −t1(0→1)t1(2→3) (the t1(0→3)t1(2→1) image
        // vanishes because those labels are spin-flipping)
        let l2 = ExcitationLabel::new(vec![0, 2], vec![1, 3]);
        assert!((amps.value(&l2) + 0.15).abs() < 1e-14);
    }

    #[test]
    fn zero_overlaps_give_zero_amplitudes() {
        let ov = overlap_set(3, &[0, 3], &[]);
        let amps = ci_to_cc(&ov, 4).unwrap();
        assert_eq!(amps.t1.iter().map(|v| v.abs()).sum::<f64>(), 0.0);
        assert_eq!(amps.t2.iter().map(|v| v.abs()).sum::<f64>(), 0.0);
        assert!(amps.t3.is_empty());
        assert!(amps.t4.is_empty());
    }

    #[test]
    fn scale_invariance_of_intermediate_normalization() {
        let l_a = ExcitationLabel::new(vec![0, 2], vec![1, 3]);
        let ov = overlap_set(2, &[0, 2], &[(l_a.clone(), 0.4)]);
        let mut scaled = ov.clone();
        scaled.c0 *= -2.5;
        for e in scaled.entries.values_mut() {
            e.value *= -2.5;
        }
        let a1 = ci_to_cc(&ov, 2).unwrap();
        let a2 = ci_to_cc(&scaled, 2).unwrap();
        assert!((a1.value(&l_a) - a2.value(&l_a)).abs() < 1e-14);
    }

    #[test]
    fn filter_variance_rules() {
        let l = ExcitationLabel::new(vec![0], vec![1]);
        let mut ov = overlap_set(2, &[0, 2], &[(l.clone(), 0.05)]);
        ov.entries.get_mut(&l).unwrap().variance = Some(0.03 * 0.03);
        let (f, rep) = filter_variance(&ov, 2.0, false).unwrap();
        assert_eq!(f.entries[&l].value, 0.0);
        assert_eq!(rep.n_zeroed_by_variance, 1);

        ov.entries.get_mut(&l).unwrap().value = 0.5;
        let (f, rep) = filter_variance(&ov, 2.0, false).unwrap();
        assert_eq!(f.entries[&l].value, 0.5);
        assert_eq!(rep.n_zeroed_by_variance, 0);

        // k = 0 keeps everything
        ov.entries.get_mut(&l).unwrap().value = 0.0001;
        let (f, rep) = filter_variance(&ov, 0.0, false).unwrap();
        assert_eq!(f.entries[&l].value, 0.0001);
        assert_eq!(rep.n_zeroed_by_variance, 0);
    }

    #[test]
    fn phase_align_basic() {
        let reference = Determinant::from_occupied(&[0, 2], 2);
        let state = CIVector {
            basis: vec![reference, Determinant::from_occupied(&[1, 3], 2)],
            coefficients: vec![(0.9, 0.0), (0.0, 0.1)],
            reference,
            n_spatial: 2,
        };
        let aligned = phase_align(&state).unwrap();
        assert!((aligned.coefficients[0].0 - 1.0).abs() < 1e-12);
        assert_eq!(aligned.coefficients[1].0, 0.0);
        let again = phase_align(&aligned).unwrap();
        assert!((again.coefficients[0].0 - aligned.coefficients[0].0).abs() < 1e-14);
    }
}
