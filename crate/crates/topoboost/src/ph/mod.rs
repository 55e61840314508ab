//! Persistent homology over Vietoris-Rips filtrations.
//!
//! A [`PointCloud`] gives a [`DistanceMatrix`], which gives a [`Filtration`]
//! of simplices up to dimension 2, which boundary-matrix reduction over GF(2)
//! turns into [`PersistenceDiagram`]s for H0 and H1.

mod reduction;

pub use reduction::compute_persistence;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PhError {
    #[error("distance matrix contains a non-finite entry")]
    NonFiniteDistance,
    #[error("invalid filtration: {0}")]
    InvalidFiltration(String),
}

/// Finite set of 2-D points in pixel coordinates.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PointCloud {
    pub points: Vec<(f64, f64)>,
}

impl PointCloud {
    pub fn new(points: Vec<(f64, f64)>) -> Self {
        PointCloud { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Largest pairwise distance, or 0 for clouds of fewer than two points.
    pub fn diameter(&self) -> f64 {
        let mut best = 0.0f64;
        for i in 0..self.points.len() {
            for j in (i + 1)..self.points.len() {
                best = best.max(euclidean(self.points[i], self.points[j]));
            }
        }
        best
    }
}

fn euclidean(a: (f64, f64), b: (f64, f64)) -> f64 {
    let dx = a.0 - b.0;
    let dy = a.1 - b.1;
    (dx * dx + dy * dy).sqrt()
}

/// Symmetric Euclidean distance matrix with zero diagonal.
#[derive(Clone, Debug)]
pub struct DistanceMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl DistanceMatrix {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|d| d.is_finite())
    }
}

/// Euclidean pairwise distances of a cloud. Empty cloud gives a 0x0 matrix.
pub fn pairwise_distances(cloud: &PointCloud) -> DistanceMatrix {
    let n = cloud.len();
    let mut entries = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = euclidean(cloud.points[i], cloud.points[j]);
            entries[i * n + j] = d;
            entries[j * n + i] = d;
        }
    }
    DistanceMatrix { n, entries }
}

/// Simplex of dimension 0, 1 or 2: strictly increasing vertex indices.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Simplex {
    vertices: Vec<usize>,
}

impl Simplex {
    pub fn vertex(v: usize) -> Self {
        Simplex { vertices: vec![v] }
    }

    pub fn edge(a: usize, b: usize) -> Self {
        debug_assert!(a < b);
        Simplex { vertices: vec![a, b] }
    }

    pub fn triangle(a: usize, b: usize, c: usize) -> Self {
        debug_assert!(a < b && b < c);
        Simplex { vertices: vec![a, b, c] }
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    /// Codimension-1 faces, in lexicographic order.
    pub fn facets(&self) -> Vec<Simplex> {
        if self.vertices.len() == 1 {
            return Vec::new();
        }
        (0..self.vertices.len())
            .rev()
            .map(|skip| {
                let vs = self
                    .vertices
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| *k != skip)
                    .map(|(_, v)| *v)
                    .collect();
                Simplex { vertices: vs }
            })
            .collect()
    }
}

/// One simplex with its appearance value in the filtration.
#[derive(Clone, Debug, PartialEq)]
pub struct FiltrationEntry {
    pub simplex: Simplex,
    pub appearance: f64,
}

/// Vietoris-Rips filtration: simplices sorted by
/// (appearance, dimension, lexicographic vertices).
#[derive(Clone, Debug)]
pub struct Filtration {
    pub entries: Vec<FiltrationEntry>,
    pub eps_max: f64,
    pub max_dim: usize,
}

/// Build the Rips filtration capped at `eps_max`.
///
/// Vertices appear at 0, edges at their length, triangles (when
/// `max_dim == 2`) at their longest edge. Simplices above the cap are
/// dropped entirely.
pub fn build_rips_filtration(
    dist: &DistanceMatrix,
    eps_max: f64,
    max_dim: usize,
) -> Result<Filtration, PhError> {
    assert!(max_dim == 1 || max_dim == 2, "max_dim must be 1 or 2");
    assert!(eps_max >= 0.0);
    if !dist.is_finite() {
        return Err(PhError::NonFiniteDistance);
    }
    let n = dist.len();
    let mut entries = Vec::new();
    for v in 0..n {
        entries.push(FiltrationEntry {
            simplex: Simplex::vertex(v),
            appearance: 0.0,
        });
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let d = dist.get(i, j);
            if d <= eps_max {
                entries.push(FiltrationEntry {
                    simplex: Simplex::edge(i, j),
                    appearance: d,
                });
            }
        }
    }
    if max_dim == 2 {
        for i in 0..n {
            for j in (i + 1)..n {
                let dij = dist.get(i, j);
                if dij > eps_max {
                    continue;
                }
                for k in (j + 1)..n {
                    let longest = dij.max(dist.get(i, k)).max(dist.get(j, k));
                    if longest <= eps_max {
                        entries.push(FiltrationEntry {
                            simplex: Simplex::triangle(i, j, k),
                            appearance: longest,
                        });
                    }
                }
            }
        }
    }
    entries.sort_by(|a, b| {
        a.appearance
            .total_cmp(&b.appearance)
            .then(a.simplex.dim().cmp(&b.simplex.dim()))
            .then_with(|| a.simplex.cmp(&b.simplex))
    });
    Ok(Filtration {
        entries,
        eps_max,
        max_dim,
    })
}

/// Death value of a persistence pair; `f64::INFINITY` marks an essential class.
pub type Death = f64;

/// A single (birth, death) feature of homology dimension `dim`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PersistencePair {
    pub dim: usize,
    pub birth: f64,
    pub death: Death,
}

impl PersistencePair {
    pub fn is_essential(&self) -> bool {
        self.death.is_infinite()
    }
}

/// death - birth, with infinite deaths capped at `eps_max` first.
pub fn persistence_value(pair: &PersistencePair, eps_max: f64) -> f64 {
    let death = if pair.is_essential() { eps_max } else { pair.death };
    death - pair.birth
}

/// Multiset of persistence pairs of one homology dimension.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PersistenceDiagram {
    pub dim: usize,
    pub pairs: Vec<PersistencePair>,
}

impl PersistenceDiagram {
    /// Betti number at threshold `t`: pairs with birth <= t < death.
    pub fn alive_at(&self, t: f64) -> usize {
        self.pairs
            .iter()
            .filter(|p| p.birth <= t && t < p.death)
            .count()
    }
}

/// Parse the point-cloud CSV fixture format: header `x,y`, one point per row.
pub fn parse_cloud_csv(text: &str) -> Result<PointCloud, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == "x,y" => {}
        _ => return Err("expected header `x,y`".into()),
    }
    let mut points = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut it = line.split(',');
        let (x, y) = match (it.next(), it.next(), it.next()) {
            (Some(x), Some(y), None) => (x, y),
            _ => return Err(format!("line {}: expected two fields", lineno + 2)),
        };
        let x: f64 = x.trim().parse().map_err(|e| format!("line {}: {e}", lineno + 2))?;
        let y: f64 = y.trim().parse().map_err(|e| format!("line {}: {e}", lineno + 2))?;
        if !x.is_finite() || !y.is_finite() {
            return Err(format!("line {}: non-finite coordinate", lineno + 2));
        }
        points.push((x, y));
    }
    Ok(PointCloud::new(points))
}

/// Serialize diagrams as CSV: header `dim,birth,death`, `inf` for essentials.
pub fn diagrams_to_csv(diags: &[PersistenceDiagram]) -> String {
    let mut out = String::from("dim,birth,death\n");
    for d in diags {
        for p in &d.pairs {
            if p.is_essential() {
                out.push_str(&format!("{},{},inf\n", p.dim, p.birth));
            } else {
                out.push_str(&format!("{},{},{}\n", p.dim, p.birth, p.death));
            }
        }
    }
    out
}
