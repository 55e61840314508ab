//! Boundary-matrix reduction over GF(2).
//!
//! Columns are sparse sorted lists of row indices (positions in the
//! filtration); the pivot of a column is its largest row index. Reduction
//! runs top dimension first so that columns paired as births can be cleared
//! before the lower-dimensional pass (the twist optimization). The pairing
//! is the standard one: when column `j` reduces to a nonzero column with
//! pivot `i`, simplex `i` is the birth and simplex `j` the death of one
//! feature of dimension `dim(i)`.

use std::collections::HashMap;

use super::{Filtration, PersistenceDiagram, PersistencePair, PhError, Simplex};

/// XOR two sorted index lists (symmetric difference).
fn xor_into(target: &mut Vec<usize>, other: &[usize]) {
    let mut out = Vec::with_capacity(target.len() + other.len());
    let (mut a, mut b) = (0, 0);
    while a < target.len() && b < other.len() {
        match target[a].cmp(&other[b]) {
            std::cmp::Ordering::Less => {
                out.push(target[a]);
                a += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(other[b]);
                b += 1;
            }
            std::cmp::Ordering::Equal => {
                a += 1;
                b += 1;
            }
        }
    }
    out.extend_from_slice(&target[a..]);
    out.extend_from_slice(&other[b..]);
    *target = out;
}

fn validate(filt: &Filtration, index_of: &HashMap<&Simplex, usize>) -> Result<(), PhError> {
    for w in filt.entries.windows(2) {
        let key_a = (w[0].appearance, w[0].simplex.dim(), &w[0].simplex);
        let key_b = (w[1].appearance, w[1].simplex.dim(), &w[1].simplex);
        let ordered = key_a.0.total_cmp(&key_b.0).then(key_a.1.cmp(&key_b.1)).then(key_a.2.cmp(key_b.2));
        if ordered == std::cmp::Ordering::Greater {
            return Err(PhError::InvalidFiltration("entries out of order".into()));
        }
    }
    for (j, entry) in filt.entries.iter().enumerate() {
        for face in entry.simplex.facets() {
            match index_of.get(&face) {
                Some(&i) if i < j => {
                    if filt.entries[i].appearance > entry.appearance {
                        return Err(PhError::InvalidFiltration(format!(
                            "face {:?} appears after its cofacet",
                            face.vertices()
                        )));
                    }
                }
                _ => {
                    return Err(PhError::InvalidFiltration(format!(
                        "missing face {:?}",
                        face.vertices()
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Persistence diagrams of a Rips filtration, one per dimension `0..max_dim`.
///
/// Zero-persistence pairs (birth == death) are dropped; unpaired positive
/// simplices become essential classes with infinite death.
pub fn compute_persistence(filt: &Filtration) -> Result<Vec<PersistenceDiagram>, PhError> {
    let m = filt.entries.len();
    let index_of: HashMap<&Simplex, usize> = filt
        .entries
        .iter()
        .enumerate()
        .map(|(i, e)| (&e.simplex, i))
        .collect();
    if index_of.len() != m {
        return Err(PhError::InvalidFiltration("duplicate simplex".into()));
    }
    validate(filt, &index_of)?;

    // boundary columns, indices sorted ascending
    let columns: Vec<Vec<usize>> = filt
        .entries
        .iter()
        .map(|e| {
            let mut col: Vec<usize> = e
                .simplex
                .facets()
                .iter()
                .map(|f| index_of[f])
                .collect();
            col.sort_unstable();
            col
        })
        .collect();

    let mut pivot_of_row: Vec<Option<usize>> = vec![None; m];
    let mut paired_as_birth = vec![false; m];
    let mut paired_as_death = vec![false; m];
    let mut reduced: Vec<Option<Vec<usize>>> = vec![None; m];
    let mut pairs: Vec<PersistencePair> = Vec::new();

    // top dimension first, clearing birth columns before the next pass
    for dim in (1..=filt.max_dim).rev() {
        for j in 0..m {
            if filt.entries[j].simplex.dim() != dim || paired_as_birth[j] {
                continue;
            }
            let mut col = columns[j].clone();
            while let Some(&low) = col.last() {
                match pivot_of_row[low] {
                    Some(k) => xor_into(&mut col, reduced[k].as_ref().unwrap()),
                    None => break,
                }
            }
            if let Some(&low) = col.last() {
                pivot_of_row[low] = Some(j);
                paired_as_birth[low] = true;
                paired_as_death[j] = true;
                let birth = filt.entries[low].appearance;
                let death = filt.entries[j].appearance;
                if birth < death {
                    pairs.push(PersistencePair {
                        dim: filt.entries[low].simplex.dim(),
                        birth,
                        death,
                    });
                }
            }
            reduced[j] = Some(col);
        }
    }

    // unpaired positive simplices are essential classes
    for j in 0..m {
        if !paired_as_birth[j] && !paired_as_death[j] {
            let dim = filt.entries[j].simplex.dim();
            if dim < filt.max_dim {
                pairs.push(PersistencePair {
                    dim,
                    birth: filt.entries[j].appearance,
                    death: f64::INFINITY,
                });
            }
        }
    }

    let mut diagrams: Vec<PersistenceDiagram> = (0..filt.max_dim)
        .map(|dim| PersistenceDiagram { dim, pairs: Vec::new() })
        .collect();
    for p in pairs {
        if p.dim < filt.max_dim {
            diagrams[p.dim].pairs.push(p);
        }
    }
    for d in &mut diagrams {
        d.pairs
            .sort_by(|a, b| a.birth.total_cmp(&b.birth).then(a.death.total_cmp(&b.death)));
    }
    Ok(diagrams)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ph::{build_rips_filtration, pairwise_distances, FiltrationEntry, PointCloud};

    fn rips(points: Vec<(f64, f64)>, eps: f64, max_dim: usize) -> Filtration {
        build_rips_filtration(&pairwise_distances(&PointCloud::new(points)), eps, max_dim).unwrap()
    }

    #[test]
    fn two_points_merge_once() {
        let diags = compute_persistence(&rips(vec![(0.0, 0.0), (3.0, 4.0)], 10.0, 1)).unwrap();
        assert_eq!(diags.len(), 1);
        let h0 = &diags[0].pairs;
        assert_eq!(h0.len(), 2);
        assert_eq!((h0[0].birth, h0[0].death), (0.0, 5.0));
        assert_eq!(h0[1].birth, 0.0);
        assert!(h0[1].is_essential());
    }

    #[test]
    fn single_point_is_essential() {
        let diags = compute_persistence(&rips(vec![(2.0, 2.0)], 1.0, 2)).unwrap();
        assert_eq!(diags[0].pairs.len(), 1);
        assert!(diags[0].pairs[0].is_essential());
        assert!(diags[1].pairs.is_empty());
    }

    #[test]
    fn unit_square_has_one_loop() {
        let diags = compute_persistence(&rips(
            vec![(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)],
            2.0,
            2,
        ))
        .unwrap();
        let h1 = &diags[1].pairs;
        assert_eq!(h1.len(), 1);
        assert!((h1[0].birth - 1.0).abs() < 1e-12);
        assert!((h1[0].death - 2.0f64.sqrt()).abs() < 1e-12);
        // every point merges into one component
        assert_eq!(diags[0].pairs.len(), 4);
        assert_eq!(diags[0].pairs.iter().filter(|p| p.is_essential()).count(), 1);
    }

    #[test]
    fn rejects_missing_face() {
        let filt = Filtration {
            entries: vec![
                FiltrationEntry { simplex: Simplex::vertex(0), appearance: 0.0 },
                FiltrationEntry { simplex: Simplex::edge(0, 1), appearance: 1.0 },
            ],
            eps_max: 2.0,
            max_dim: 1,
        };
        assert!(matches!(
            compute_persistence(&filt),
            Err(PhError::InvalidFiltration(_))
        ));
    }

    #[test]
    fn rejects_order_violation() {
        let filt = Filtration {
            entries: vec![
                FiltrationEntry { simplex: Simplex::vertex(0), appearance: 0.5 },
                FiltrationEntry { simplex: Simplex::vertex(1), appearance: 0.0 },
            ],
            eps_max: 1.0,
            max_dim: 1,
        };
        assert!(matches!(
            compute_persistence(&filt),
            Err(PhError::InvalidFiltration(_))
        ));
    }

    #[test]
    fn coincident_points_drop_zero_persistence() {
        let diags = compute_persistence(&rips(vec![(1.0, 1.0), (1.0, 1.0)], 1.0, 1)).unwrap();
        // the merge at distance 0 carries no information
        assert_eq!(diags[0].pairs.len(), 1);
        assert!(diags[0].pairs[0].is_essential());
    }
}
