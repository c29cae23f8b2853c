//! Line-oriented JSON serialization for the quantum-input boundary objects:
//! CI vectors, overlap sets, and amplitude sets.
//!
//! Each file holds one JSON record per line. Determinant records carry
//! `alpha_occ`/`beta_occ` (spatial orbital indices per spin); excitation
//! records carry `rank`, `occ`, `virt` (blocked spin-orbital indices). The
//! first line is a header record with the reference determinant and the
//! spatial orbital count. Overlap records store `value_re`/`value_im` and an
//! optional `variance`; amplitude records store `t`.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::ci::{CIVector, Determinant, ExcitationLabel, OverlapEntry, OverlapSet};
use crate::cluster::{AmplitudeSet, SpaceMap};
use crate::error::{Result, SplitccError};

#[derive(Debug, Serialize, Deserialize, Default)]
struct Record {
    #[serde(skip_serializing_if = "Option::is_none")]
    n_spatial: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha_occ: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    beta_occ: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rank: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    occ: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    virt: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    value_re: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    value_im: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    variance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    t: Option<f64>,
}

fn det_record(det: &Determinant, n_spatial: usize) -> (Vec<usize>, Vec<usize>) {
    let alpha = (0..n_spatial)
        .filter(|p| det.alpha_mask >> p & 1 == 1)
        .collect();
    let beta = (0..n_spatial)
        .filter(|p| det.beta_mask >> p & 1 == 1)
        .collect();
    (alpha, beta)
}

fn det_from_record(rec: &Record) -> Result<Determinant> {
    let alpha = rec
        .alpha_occ
        .as_ref()
        .ok_or_else(|| SplitccError::Parse("determinant record missing alpha_occ".into()))?;
    let beta = rec
        .beta_occ
        .as_ref()
        .ok_or_else(|| SplitccError::Parse("determinant record missing beta_occ".into()))?;
    let mut det = Determinant {
        alpha_mask: 0,
        beta_mask: 0,
    };
    for &p in alpha {
        det.alpha_mask |= 1 << p;
    }
    for &p in beta {
        det.beta_mask |= 1 << p;
    }
    Ok(det)
}

fn write_records<W: Write>(mut w: W, records: &[Record]) -> Result<()> {
    for rec in records {
        serde_json::to_writer(&mut w, rec)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

fn read_records<R: BufRead>(r: R) -> Result<Vec<Record>> {
    let mut out = Vec::new();
    for line in r.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line)?);
    }
    if out.is_empty() {
        return Err(SplitccError::Parse("empty record file".into()));
    }
    Ok(out)
}

/// Header + one record per excitation label with value and optional variance.
/// The header's `value_re` is c0.
pub fn write_overlaps<W: Write>(w: W, ov: &OverlapSet) -> Result<()> {
    let (alpha, beta) = det_record(&ov.reference, ov.n_spatial);
    let mut records = vec![Record {
        n_spatial: Some(ov.n_spatial),
        alpha_occ: Some(alpha),
        beta_occ: Some(beta),
        value_re: Some(ov.c0),
        value_im: Some(0.0),
        variance: ov.c0_variance,
        ..Default::default()
    }];
    for (label, entry) in &ov.entries {
        records.push(Record {
            rank: Some(label.rank()),
            occ: Some(label.occ.clone()),
            virt: Some(label.virt.clone()),
            value_re: Some(entry.value),
            value_im: Some(0.0),
            variance: entry.variance,
            ..Default::default()
        });
    }
    write_records(w, &records)
}

pub fn read_overlaps<R: BufRead>(r: R) -> Result<OverlapSet> {
    let records = read_records(r)?;
    let header = &records[0];
    let n_spatial = header
        .n_spatial
        .ok_or_else(|| SplitccError::Parse("overlap header missing n_spatial".into()))?;
    let reference = det_from_record(header)?;
    let c0 = header
        .value_re
        .ok_or_else(|| SplitccError::Parse("overlap header missing value_re (c0)".into()))?;
    let mut entries = BTreeMap::new();
    for rec in &records[1..] {
        let label = label_from_record(rec)?;
        let value = rec
            .value_re
            .ok_or_else(|| SplitccError::Parse("overlap record missing value_re".into()))?;
        if rec.value_im.unwrap_or(0.0) != 0.0 {
            return Err(SplitccError::Parse(
                "overlap records must be real; phase-align the state first".into(),
            ));
        }
        entries.insert(
            label,
            OverlapEntry {
                value,
                variance: rec.variance,
            },
        );
    }
    Ok(OverlapSet {
        reference,
        n_spatial,
        c0,
        c0_variance: header.variance,
        entries,
    })
}

fn label_from_record(rec: &Record) -> Result<ExcitationLabel> {
    let occ = rec
        .occ
        .clone()
        .ok_or_else(|| SplitccError::Parse("excitation record missing occ".into()))?;
    let virt = rec
        .virt
        .clone()
        .ok_or_else(|| SplitccError::Parse("excitation record missing virt".into()))?;
    if occ.len() != virt.len() {
        return Err(SplitccError::Parse(format!(
            "excitation record with {} occupied but {} virtual indices",
            occ.len(),
            virt.len()
        )));
    }
    if let Some(rank) = rec.rank {
        if rank != occ.len() {
            return Err(SplitccError::Parse(format!(
                "excitation record rank {rank} does not match {} index pairs",
                occ.len()
            )));
        }
    }
    Ok(ExcitationLabel::new(occ, virt))
}

/// Header + one record per determinant with complex coefficient.
pub fn write_civector<W: Write>(w: W, state: &CIVector) -> Result<()> {
    let (alpha, beta) = det_record(&state.reference, state.n_spatial);
    let mut records = vec![Record {
        n_spatial: Some(state.n_spatial),
        alpha_occ: Some(alpha),
        beta_occ: Some(beta),
        ..Default::default()
    }];
    for (det, &(re, im)) in state.basis.iter().zip(&state.coefficients) {
        let (alpha, beta) = det_record(det, state.n_spatial);
        records.push(Record {
            alpha_occ: Some(alpha),
            beta_occ: Some(beta),
            value_re: Some(re),
            value_im: Some(im),
            ..Default::default()
        });
    }
    write_records(w, &records)
}

pub fn read_civector<R: BufRead>(r: R) -> Result<CIVector> {
    let records = read_records(r)?;
    let header = &records[0];
    let n_spatial = header
        .n_spatial
        .ok_or_else(|| SplitccError::Parse("CI vector header missing n_spatial".into()))?;
    let reference = det_from_record(header)?;
    let mut basis = Vec::new();
    let mut coefficients = Vec::new();
    for rec in &records[1..] {
        basis.push(det_from_record(rec)?);
        coefficients.push((
            rec.value_re
                .ok_or_else(|| SplitccError::Parse("CI record missing value_re".into()))?,
            rec.value_im.unwrap_or(0.0),
        ));
    }
    Ok(CIVector {
        basis,
        coefficients,
        reference,
        n_spatial,
    })
}

/// Header + one record per nonzero amplitude (canonical labels, field `t`).
pub fn write_amplitudes<W: Write>(w: W, amps: &AmplitudeSet, threshold: f64) -> Result<()> {
    let space = &amps.space;
    let reference = Determinant::from_occupied(&space.occ, space.n_spatial);
    let (alpha, beta) = det_record(&reference, space.n_spatial);
    let mut records = vec![Record {
        n_spatial: Some(space.n_spatial),
        alpha_occ: Some(alpha),
        beta_occ: Some(beta),
        ..Default::default()
    }];
    let mut push = |label: ExcitationLabel, t: f64| {
        if t.abs() > threshold {
            records.push(Record {
                rank: Some(label.rank()),
                occ: Some(label.occ),
                virt: Some(label.virt),
                t: Some(t),
                ..Default::default()
            });
        }
    };
    for (i, &p) in space.occ.iter().enumerate() {
        for (a, &q) in space.virt.iter().enumerate() {
            push(ExcitationLabel::new(vec![p], vec![q]), amps.t1[(i, a)]);
        }
    }
    for (i, &p) in space.occ.iter().enumerate() {
        for (j, &r) in space.occ.iter().enumerate().skip(i + 1) {
            for (a, &q) in space.virt.iter().enumerate() {
                for (b, &s) in space.virt.iter().enumerate().skip(a + 1) {
                    push(
                        ExcitationLabel::new(vec![p, r], vec![q, s]),
                        amps.t2[(i, j, a, b)],
                    );
                }
            }
        }
    }
    for (label, &t) in amps.t3.iter().chain(amps.t4.iter()) {
        push(label.clone(), t);
    }
    write_records(w, &records)
}

pub fn read_amplitudes<R: BufRead>(r: R) -> Result<AmplitudeSet> {
    let records = read_records(r)?;
    let header = &records[0];
    let n_spatial = header
        .n_spatial
        .ok_or_else(|| SplitccError::Parse("amplitude header missing n_spatial".into()))?;
    let reference = det_from_record(header)?;
    let space = SpaceMap::from_reference(&reference.occupied(n_spatial), n_spatial);
    let mut amps = AmplitudeSet::zero(space);
    for rec in &records[1..] {
        let label = label_from_record(rec)?;
        let t = rec
            .t
            .ok_or_else(|| SplitccError::Parse("amplitude record missing t".into()))?;
        match label.rank() {
            1 | 2 => amps.set_dense(&label, t),
            3 => {
                amps.t3.insert(label, t);
            }
            4 => {
                amps.t4.insert(label, t);
            }
            r => {
                return Err(SplitccError::Parse(format!(
                    "amplitude rank {r} outside the supported range 1-4"
                )))
            }
        }
    }
    Ok(amps)
}

pub fn write_overlaps_file(path: &Path, ov: &OverlapSet) -> Result<()> {
    write_overlaps(std::io::BufWriter::new(std::fs::File::create(path)?), ov)
}

pub fn read_overlaps_file(path: &Path) -> Result<OverlapSet> {
    read_overlaps(std::io::BufReader::new(std::fs::File::open(path)?))
}

pub fn write_civector_file(path: &Path, state: &CIVector) -> Result<()> {
    write_civector(std::io::BufWriter::new(std::fs::File::create(path)?), state)
}

pub fn read_civector_file(path: &Path) -> Result<CIVector> {
    read_civector(std::io::BufReader::new(std::fs::File::open(path)?))
}

pub fn write_amplitudes_file(path: &Path, amps: &AmplitudeSet, threshold: f64) -> Result<()> {
    write_amplitudes(
        std::io::BufWriter::new(std::fs::File::create(path)?),
        amps,
        threshold,
    )
}

pub fn read_amplitudes_file(path: &Path) -> Result<AmplitudeSet> {
    read_amplitudes(std::io::BufReader::new(std::fs::File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overlap_round_trip() {
        let reference = Determinant::from_occupied(&[0, 1, 4, 5], 4);
        let mut entries = BTreeMap::new();
        entries.insert(
            ExcitationLabel::new(vec![0], vec![2]),
            OverlapEntry {
                value: 0.25,
                variance: None,
            },
        );
        entries.insert(
            ExcitationLabel::new(vec![0, 4], vec![2, 6]),
            OverlapEntry {
                value: -0.125,
                variance: Some(1e-6),
            },
        );
        let ov = OverlapSet {
            reference,
            n_spatial: 4,
            c0: 0.9,
            c0_variance: Some(1e-6),
            entries,
        };
        let mut buf = Vec::new();
        write_overlaps(&mut buf, &ov).unwrap();
        let back = read_overlaps(buf.as_slice()).unwrap();
        assert_eq!(back.reference, ov.reference);
        assert_eq!(back.c0, ov.c0);
        assert_eq!(back.c0_variance, ov.c0_variance);
        assert_eq!(back.entries, ov.entries);
    }

    #[test]
    fn amplitude_round_trip() {
        let space = SpaceMap::from_reference(&[0, 1, 4, 5], 4);
        let mut amps = AmplitudeSet::zero(space);
        amps.set_dense(&ExcitationLabel::new(vec![0], vec![3]), 0.1);
        amps.set_dense(&ExcitationLabel::new(vec![0, 4], vec![2, 7]), -0.05);
        amps.t3
            .insert(ExcitationLabel::new(vec![0, 1, 4], vec![2, 3, 6]), 0.01);
        let mut buf = Vec::new();
        write_amplitudes(&mut buf, &amps, 0.0).unwrap();
        let back = read_amplitudes(buf.as_slice()).unwrap();
        assert_eq!(back.t1, amps.t1);
        assert_eq!(back.t2, amps.t2);
        assert_eq!(back.t3, amps.t3);
        assert_eq!(back.t4, amps.t4);
    }

    #[test]
    fn civector_round_trip() {
        let reference = Determinant::from_occupied(&[0, 2], 2);
        let basis = vec![reference, Determinant::from_occupied(&[1, 3], 2)];
        let state = CIVector {
            basis: basis.clone(),
            coefficients: vec![(0.8, 0.0), (-0.6, 0.0)],
            reference,
            n_spatial: 2,
        };
        let mut buf = Vec::new();
        write_civector(&mut buf, &state).unwrap();
        let back = read_civector(buf.as_slice()).unwrap();
        assert_eq!(back.basis, state.basis);
        assert_eq!(back.coefficients, state.coefficients);
    }
}
