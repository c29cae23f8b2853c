//! FCIDUMP parsing and spin-orbital integral construction.
//!
//! Spatial integrals are stored in chemists' ordering exactly as on disk;
//! [`to_spin_orbitals`] produces the antisymmetrized physicists' tensor
//! ⟨pq||rs⟩ over blocked spin orbitals (all α, then all β).

use ndarray::{Array2, Array4};
use std::io::Read;
use std::path::Path;

use crate::error::{Result, SplitccError};

/// Spatial-orbital integrals as read from an FCIDUMP file.
#[derive(Debug, Clone)]
pub struct MolecularIntegrals {
    pub n_spatial: usize,
    pub n_electrons: usize,
    pub ms2: i32,
    /// One-electron integrals h[p][q] (symmetric).
    pub h: Array2<f64>,
    /// Two-electron integrals (pq|rs), chemists' ordering, 8-fold symmetric.
    pub eri: Array4<f64>,
    pub e_core: f64,
    /// Point-group labels from ORBSYM; parsed but ignored by the solvers.
    pub orbital_symmetries: Vec<i32>,
}

/// Spin-orbital ordering convention tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ordering {
    /// Spin orbital p < n_spatial is α spatial p; p + n_spatial is β spatial p.
    Blocked,
}

/// Antisymmetrized spin-orbital integrals and the reference determinant.
#[derive(Debug, Clone)]
pub struct SpinOrbitalBasis {
    /// Number of spin orbitals, 2 · n_spatial.
    pub n: usize,
    pub h: Array2<f64>,
    /// ⟨pq||rs⟩ = ⟨pq|rs⟩ − ⟨pq|sr⟩, physicists' notation.
    pub g: Array4<f64>,
    pub e_core: f64,
    /// Occupied spin orbitals of the aufbau reference, ascending.
    pub reference_occupation: Vec<usize>,
    pub ordering: Ordering,
}

/// Active-space selection over spatial orbitals.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct ActiveSpaceSpec {
    pub active_spatial_orbitals: Vec<usize>,
    pub n_active_alpha: usize,
    pub n_active_beta: usize,
}

pub fn parse_fcidump(text: &str) -> Result<MolecularIntegrals> {
    let lower = text.to_lowercase();
    let header_end = lower
        .find("&end")
        .map(|i| (i, i + 4))
        .or_else(|| {
            // some dialects close the namelist with a bare slash
            lower.find('/').map(|i| (i, i + 1))
        })
        .ok_or_else(|| SplitccError::Parse("FCIDUMP header terminator not found".into()))?;
    let header = &text[..header_end.0];
    let body = &text[header_end.1..];

    let get_int = |key: &str| -> Option<i64> {
        let lk = header.to_lowercase();
        let pos = lk.find(&key.to_lowercase())?;
        let rest = &header[pos + key.len()..];
        let rest = rest.trim_start().strip_prefix('=')?.trim_start();
        let end = rest
            .find(|c: char| !(c.is_ascii_digit() || c == '-' || c == '+'))
            .unwrap_or(rest.len());
        rest[..end].parse().ok()
    };
    let n_spatial = get_int("NORB")
        .ok_or_else(|| SplitccError::Parse("NORB missing from FCIDUMP header".into()))?
        as usize;
    let n_electrons = get_int("NELEC")
        .ok_or_else(|| SplitccError::Parse("NELEC missing from FCIDUMP header".into()))?
        as usize;
    let ms2 = get_int("MS2").unwrap_or(0) as i32;

    let orbital_symmetries = {
        let lk = header.to_lowercase();
        match lk.find("orbsym") {
            Some(pos) => {
                let rest = &header[pos + 6..];
                let rest = rest.trim_start().strip_prefix('=').unwrap_or(rest);
                rest.split(',')
                    .map_while(|tok| tok.trim().parse::<i32>().ok())
                    .collect()
            }
            None => vec![1; n_spatial],
        }
    };

    let mut h: Array2<f64> = Array2::zeros((n_spatial, n_spatial));
    let mut eri: Array4<f64> = Array4::zeros((n_spatial, n_spatial, n_spatial, n_spatial));
    let mut eri_set = vec![false; n_spatial.pow(4)];
    let mut h_set = vec![false; n_spatial.pow(2)];
    let mut e_core = 0.0;

    for line in body.lines() {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        if toks.len() != 5 {
            return Err(SplitccError::Parse(format!(
                "expected `value i j k l` record, got: {line:?}"
            )));
        }
        let value: f64 = toks[0]
            .replace(['D', 'd'], "E")
            .parse()
            .map_err(|_| SplitccError::Parse(format!("bad value in record: {line:?}")))?;
        let idx: Vec<i64> = toks[1..]
            .iter()
            .map(|t| t.parse())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| SplitccError::Parse(format!("bad index in record: {line:?}")))?;
        if idx.iter().any(|&i| i < 0 || i as usize > n_spatial) {
            return Err(SplitccError::Parse(format!(
                "orbital index out of range in record: {line:?}"
            )));
        }
        let (i, j, k, l) = (idx[0], idx[1], idx[2], idx[3]);
        match (i, j, k, l) {
            (0, 0, 0, 0) => e_core = value,
            (i, j, 0, 0) => {
                let (i, j) = (i as usize - 1, j as usize - 1);
                for (a, b) in [(i, j), (j, i)] {
                    if h_set[a * n_spatial + b] && (h[(a, b)] - value).abs() > 1e-10 {
                        return Err(SplitccError::Parse(format!(
                            "contradictory duplicate one-electron record at ({},{})",
                            a + 1,
                            b + 1
                        )));
                    }
                    h[(a, b)] = value;
                    h_set[a * n_spatial + b] = true;
                }
            }
            (i, j, k, l) if i > 0 && j > 0 && k > 0 && l > 0 => {
                let (i, j, k, l) = (
                    i as usize - 1,
                    j as usize - 1,
                    k as usize - 1,
                    l as usize - 1,
                );
                for (a, b, c, d) in [
                    (i, j, k, l),
                    (j, i, k, l),
                    (i, j, l, k),
                    (j, i, l, k),
                    (k, l, i, j),
                    (l, k, i, j),
                    (k, l, j, i),
                    (l, k, j, i),
                ] {
                    let flat = ((a * n_spatial + b) * n_spatial + c) * n_spatial + d;
                    if eri_set[flat] && (eri[(a, b, c, d)] - value).abs() > 1e-10 {
                        return Err(SplitccError::Parse(format!(
                            "contradictory duplicate two-electron record at \
                             ({},{},{},{})",
                            a + 1,
                            b + 1,
                            c + 1,
                            d + 1
                        )));
                    }
                    eri[(a, b, c, d)] = value;
                    eri_set[flat] = true;
                }
            }
            _ => {
                return Err(SplitccError::Parse(format!(
                    "inconsistent zero indices in record: {line:?}"
                )))
            }
        }
    }

    Ok(MolecularIntegrals {
        n_spatial,
        n_electrons,
        ms2,
        h,
        eri,
        e_core,
        orbital_symmetries,
    })
}

/// Read an FCIDUMP file; `.gz` paths are decompressed transparently.
pub fn read_fcidump(path: &Path) -> Result<MolecularIntegrals> {
    let raw = std::fs::read(path)?;
    let text = if path.extension().is_some_and(|e| e == "gz") {
        let mut s = String::new();
        flate2::read::GzDecoder::new(&raw[..]).read_to_string(&mut s)?;
        s
    } else {
        String::from_utf8(raw)
            .map_err(|_| SplitccError::Parse("FCIDUMP is not valid UTF-8".into()))?
    };
    parse_fcidump(&text)
}

/// Spatial orbital and spin of a blocked spin-orbital index.
#[inline]
pub fn spatial_spin(p: usize, n_spatial: usize) -> (usize, bool) {
    if p < n_spatial {
        (p, false)
    } else {
        (p - n_spatial, true)
    }
}

pub fn to_spin_orbitals(mi: &MolecularIntegrals, ordering: Ordering) -> Result<SpinOrbitalBasis> {
    if mi.ms2 == 0 && !mi.n_electrons.is_multiple_of(2) {
        return Err(SplitccError::InvalidInput(
            "odd electron count is inconsistent with MS2 = 0".into(),
        ));
    }
    let ns = mi.n_spatial;
    let n = 2 * ns;
    let mut h = Array2::zeros((n, n));
    for p in 0..n {
        let (ps, pspin) = spatial_spin(p, ns);
        for q in 0..n {
            let (qs, qspin) = spatial_spin(q, ns);
            if pspin == qspin {
                h[(p, q)] = mi.h[(ps, qs)];
            }
        }
    }
    let mut g = Array4::zeros((n, n, n, n));
    for p in 0..n {
        let (ps, sp) = spatial_spin(p, ns);
        for q in 0..n {
            let (qs, sq) = spatial_spin(q, ns);
            for r in 0..n {
                let (rs, sr) = spatial_spin(r, ns);
                for s in 0..n {
                    let (ss, sspin) = spatial_spin(s, ns);
                    // ⟨pq|rs⟩ = (pr|qs) with spin deltas (p,r) and (q,s)
                    let coulomb = if sp == sr && sq == sspin {
                        mi.eri[(ps, rs, qs, ss)]
                    } else {
                        0.0
                    };
                    let exchange = if sp == sspin && sq == sr {
                        mi.eri[(ps, ss, qs, rs)]
                    } else {
                        0.0
                    };
                    g[(p, q, r, s)] = coulomb - exchange;
                }
            }
        }
    }
    let n_alpha = (mi.n_electrons as i64 + mi.ms2 as i64) / 2;
    let n_beta = mi.n_electrons as i64 - n_alpha;
    if n_beta < 0 || n_alpha as usize > ns || n_beta as usize > ns {
        return Err(SplitccError::InvalidInput(format!(
            "electron counts (alpha {n_alpha}, beta {n_beta}) do not fit {ns} spatial orbitals"
        )));
    }
    let mut reference_occupation: Vec<usize> = (0..n_alpha as usize).collect();
    reference_occupation.extend((0..n_beta as usize).map(|p| p + ns));
    Ok(SpinOrbitalBasis {
        n,
        h,
        g,
        e_core: mi.e_core,
        reference_occupation,
        ordering,
    })
}

/// Fock matrix and Hartree-Fock energy of the reference determinant.
pub fn build_fock(basis: &SpinOrbitalBasis) -> (Array2<f64>, f64) {
    let n = basis.n;
    let occ = &basis.reference_occupation;
    let mut fock = basis.h.clone();
    for p in 0..n {
        for q in 0..n {
            for &i in occ {
                fock[(p, q)] += basis.g[(p, i, q, i)];
            }
        }
    }
    let mut e_hf = basis.e_core;
    for &i in occ {
        e_hf += basis.h[(i, i)];
        for &j in occ {
            e_hf += 0.5 * basis.g[(i, j, i, j)];
        }
    }
    (fock, e_hf)
}

impl ActiveSpaceSpec {
    pub fn validate(&self, n_spatial: usize) -> Result<()> {
        let mut seen = std::collections::HashSet::new();
        for &o in &self.active_spatial_orbitals {
            if o >= n_spatial {
                return Err(SplitccError::InvalidInput(format!(
                    "active orbital {o} outside [0, {n_spatial})"
                )));
            }
            if !seen.insert(o) {
                return Err(SplitccError::InvalidInput(format!(
                    "duplicate active orbital {o}"
                )));
            }
        }
        if self.n_active_alpha > self.active_spatial_orbitals.len()
            || self.n_active_beta > self.active_spatial_orbitals.len()
        {
            return Err(SplitccError::InvalidInput(
                "more active electrons per spin than active orbitals".into(),
            ));
        }
        Ok(())
    }
}

/// Fold the inactive-occupied mean field into an active-space Hamiltonian.
///
/// Returns the restricted basis (blocked spin orbitals over the sorted active
/// spatial orbitals) whose core energy is the frozen-core energy.
pub fn build_active_hamiltonian(
    basis: &SpinOrbitalBasis,
    as_spec: &ActiveSpaceSpec,
) -> Result<(SpinOrbitalBasis, f64)> {
    let ns = basis.n / 2;
    as_spec.validate(ns)?;
    let mut active = as_spec.active_spatial_orbitals.clone();
    active.sort_unstable();
    let active_set: std::collections::HashSet<usize> = active.iter().copied().collect();

    // inactive-occupied spin orbitals from the reference
    let inactive_occ: Vec<usize> = basis
        .reference_occupation
        .iter()
        .copied()
        .filter(|&p| !active_set.contains(&spatial_spin(p, ns).0))
        .collect();
    // every inactive-occupied spatial orbital must be doubly occupied
    {
        let mut count = std::collections::HashMap::new();
        for &p in &inactive_occ {
            *count.entry(spatial_spin(p, ns).0).or_insert(0usize) += 1;
        }
        if let Some((orb, _)) = count.iter().find(|(_, &c)| c != 2) {
            return Err(SplitccError::InvalidInput(format!(
                "inactive orbital {orb} is half-occupied; it must be inside the active space"
            )));
        }
    }
    let expected_active_electrons = basis.reference_occupation.len() - inactive_occ.len();
    if as_spec.n_active_alpha + as_spec.n_active_beta != expected_active_electrons {
        return Err(SplitccError::InvalidInput(format!(
            "active electron count {} inconsistent with reference ({} electrons outside \
             the inactive core)",
            as_spec.n_active_alpha + as_spec.n_active_beta,
            expected_active_electrons
        )));
    }

    let na = active.len();
    let n_act = 2 * na;
    // map restricted spin orbital -> full spin orbital
    let to_full = |t: usize| -> usize {
        let (ts, spin) = spatial_spin(t, na);
        active[ts] + if spin { ns } else { 0 }
    };

    let mut e_frozen = basis.e_core;
    for &i in &inactive_occ {
        e_frozen += basis.h[(i, i)];
        for &j in &inactive_occ {
            e_frozen += 0.5 * basis.g[(i, j, i, j)];
        }
    }

    let mut h = Array2::zeros((n_act, n_act));
    for t in 0..n_act {
        for u in 0..n_act {
            let (ft, fu) = (to_full(t), to_full(u));
            let mut val = basis.h[(ft, fu)];
            for &i in &inactive_occ {
                val += basis.g[(ft, i, fu, i)];
            }
            h[(t, u)] = val;
        }
    }
    let mut g = Array4::zeros((n_act, n_act, n_act, n_act));
    for t in 0..n_act {
        for u in 0..n_act {
            for v in 0..n_act {
                for w in 0..n_act {
                    g[(t, u, v, w)] = basis.g[(to_full(t), to_full(u), to_full(v), to_full(w))];
                }
            }
        }
    }
    let mut reference_occupation: Vec<usize> = (0..as_spec.n_active_alpha).collect();
    reference_occupation.extend((0..as_spec.n_active_beta).map(|p| p + na));
    Ok((
        SpinOrbitalBasis {
            n: n_act,
            h,
            g,
            e_core: e_frozen,
            reference_occupation,
            ordering: basis.ordering,
        },
        e_frozen,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_dump() -> &'static str {
        "&FCI NORB=2,NELEC=2,MS2=0,\n  ORBSYM=1,1,\n  ISYM=1,\n&END\n\
         0.7000000000000000E+00    1    1    1    1\n\
         0.1000000000000000E+00    2    1    1    1\n\
         -0.1200000000000000E+01    1    1    0    0\n\
         -0.1500000000000000E+01    0    0    0    0\n"
    }

    #[test]
    fn parses_header_and_core_energy() {
        let mi = parse_fcidump(tiny_dump()).unwrap();
        assert_eq!(mi.n_spatial, 2);
        assert_eq!(mi.n_electrons, 2);
        assert_eq!(mi.ms2, 0);
        assert_eq!(mi.e_core, -1.5);
        assert_eq!(mi.h[(0, 0)], -1.2);
    }

    #[test]
    fn completes_eightfold_symmetry() {
        let mi = parse_fcidump(tiny_dump()).unwrap();
        assert_eq!(mi.eri[(0, 0, 0, 0)], 0.7);
        for perm in [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)] {
            assert_eq!(mi.eri[perm], 0.1, "image {perm:?}");
        }
    }

    #[test]
    fn rejects_contradictory_duplicates() {
        let text = format!("{}0.9 1 1 1 1\n", tiny_dump());
        assert!(parse_fcidump(&text).is_err());
    }

    #[test]
    fn rejects_out_of_range_indices() {
        let text = format!("{}0.9 3 1 1 1\n", tiny_dump());
        assert!(parse_fcidump(&text).is_err());
    }

    #[test]
    fn spin_orbital_antisymmetry() {
        let mi = parse_fcidump(tiny_dump()).unwrap();
        let b = to_spin_orbitals(&mi, Ordering::Blocked).unwrap();
        for p in 0..b.n {
            for q in 0..b.n {
                for r in 0..b.n {
                    for s in 0..b.n {
                        let v = b.g[(p, q, r, s)];
                        assert_eq!(v, -b.g[(q, p, r, s)]);
                        assert_eq!(v, -b.g[(p, q, s, r)]);
                        assert_eq!(v, b.g[(r, s, p, q)]);
                    }
                }
            }
            assert_eq!(b.g[(p, p, p, p)], 0.0);
        }
    }

    #[test]
    fn empty_occupation_fock_is_h() {
        let mi = parse_fcidump(tiny_dump()).unwrap();
        let mut b = to_spin_orbitals(&mi, Ordering::Blocked).unwrap();
        b.reference_occupation.clear();
        let (fock, e_hf) = build_fock(&b);
        assert_eq!(e_hf, b.e_core);
        assert_eq!(fock, b.h);
    }

    #[test]
    fn full_active_space_is_identity() {
        let mi = parse_fcidump(tiny_dump()).unwrap();
        let b = to_spin_orbitals(&mi, Ordering::Blocked).unwrap();
        let spec = ActiveSpaceSpec {
            active_spatial_orbitals: vec![0, 1],
            n_active_alpha: 1,
            n_active_beta: 1,
        };
        let (act, e_frozen) = build_active_hamiltonian(&b, &spec).unwrap();
        assert_eq!(e_frozen, b.e_core);
        assert_eq!(act.h, b.h);
        assert_eq!(act.g, b.g);
        assert_eq!(act.reference_occupation, b.reference_occupation);
    }

    #[test]
    fn empty_active_space_freezes_everything() {
        let mi = parse_fcidump(tiny_dump()).unwrap();
        let b = to_spin_orbitals(&mi, Ordering::Blocked).unwrap();
        let (_, e_hf) = build_fock(&b);
        // active = the unoccupied orbital only, zero active electrons
        let spec = ActiveSpaceSpec {
            active_spatial_orbitals: vec![1],
            n_active_alpha: 0,
            n_active_beta: 0,
        };
        let (_, e_frozen) = build_active_hamiltonian(&b, &spec).unwrap();
        assert!((e_frozen - e_hf).abs() < 1e-12);
    }
}
