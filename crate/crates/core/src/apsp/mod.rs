//! All-pairs shortest paths with Floyd-Warshall, path reconstruction from the
//! intermediate-vertex matrix, and a Dijkstra oracle used by the tests.
//!
//! Relaxation uses a strict `<`, so the first optimum found in pivot order is
//! kept and the intermediate matrix is reproducible. Infinity is
//! `f64::INFINITY`; `inf + x` stays infinite and never compares below
//! anything, so unreachable pivots never update a pair.

mod kernel;

use std::collections::HashSet;

use crate::error::{square_buffer, Error, Result};
use crate::field::{CellId, Field};
use crate::visibility::WeightMatrix;

/// Shortest distances `d` and, per pair, the last pivot that improved it.
#[derive(Debug, Clone, PartialEq)]
pub struct ApspResult {
    n: usize,
    dist: Vec<f64>,
    via: Vec<u32>,
}

impl ApspResult {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Distance for 0-based vertex indices.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n + j]
    }

    pub fn distance(&self, from: CellId, to: CellId) -> f64 {
        self.get(from.index(), to.index())
    }

    /// Intermediate vertex recorded for the pair, `None` when the direct edge is optimal.
    pub fn intermediate(&self, from: CellId, to: CellId) -> Option<CellId> {
        match self.via[from.index() * self.n + to.index()] {
            0 => None,
            k => CellId::new(k as u64),
        }
    }

    pub fn distances(&self) -> &[f64] {
        &self.dist
    }

    /// Raw intermediate matrix, 1-based cell ids with 0 meaning "none".
    pub fn intermediates(&self) -> &[u32] {
        &self.via
    }
}

/// Which implementation of the relaxation sweep to run. All of them produce
/// bitwise-identical results.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Kernel {
    /// The plain k-i-j triple loop.
    Reference,
    /// Pivot-blocked sweep in portable code.
    Portable,
    /// Pivot-blocked sweep, vectorised when the CPU supports AVX-512.
    #[default]
    Auto,
}

impl Kernel {
    /// Whether [`Kernel::Auto`] resolves to the vectorised path on this machine.
    pub fn simd_available() -> bool {
        kernel::simd_available()
    }
}

pub fn floyd(w: &WeightMatrix) -> Result<ApspResult> {
    floyd_with(w, Kernel::Auto)
}

pub fn floyd_with(w: &WeightMatrix, kernel: Kernel) -> Result<ApspResult> {
    let n = w.n();
    let mut dist = square_buffer(n, 0.0f64)?;
    dist.copy_from_slice(w.as_slice());
    let mut via = square_buffer(n, 0u32)?;
    match kernel {
        Kernel::Reference => relax_reference(n, &mut dist, &mut via),
        Kernel::Portable => kernel::run_blocked(n, &mut dist, &mut via, false),
        Kernel::Auto => kernel::run_blocked(n, &mut dist, &mut via, true),
    }
    Ok(ApspResult { n, dist, via })
}

fn relax_reference(n: usize, dist: &mut [f64], via: &mut [u32]) {
    for k in 0..n {
        for i in 0..n {
            let dik = dist[i * n + k];
            for j in 0..n {
                let cand = dik + dist[k * n + j];
                if cand < dist[i * n + j] {
                    dist[i * n + j] = cand;
                    via[i * n + j] = (k + 1) as u32;
                }
            }
        }
    }
}

/// Cells visited from source to destination and the flown distance.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    pub cells: Vec<CellId>,
    pub length: f64,
}

impl Path {
    fn from_cells(field: &Field, cells: Vec<CellId>) -> Result<Self> {
        let mut length = 0.0;
        for pair in cells.windows(2) {
            length += field
                .cell_center(pair[0])?
                .distance(field.cell_center(pair[1])?);
        }
        Ok(Path { cells, length })
    }
}

/// Expands the intermediate matrix into the cell sequence from `from` to
/// `to`. Returns `Ok(None)` when `to` is unreachable.
pub fn reconstruct_path(
    apsp: &ApspResult,
    field: &Field,
    from: CellId,
    to: CellId,
) -> Result<Option<Path>> {
    field.check(from)?;
    field.check(to)?;
    if field.cell_count() != apsp.n() {
        return Err(Error::Shape(format!(
            "field has {} cells but the shortest-path result covers {}",
            field.cell_count(),
            apsp.n()
        )));
    }
    if apsp.distance(from, to).is_infinite() {
        return Ok(None);
    }
    if from == to {
        return Path::from_cells(field, vec![from]).map(Some);
    }

    let mut cells = vec![from];
    let mut pending = vec![(from, to)];
    let mut expanded = HashSet::new();
    while let Some((a, b)) = pending.pop() {
        if !expanded.insert((a, b)) {
            return Err(Error::Internal(format!(
                "intermediate matrix revisits pair ({a}, {b})"
            )));
        }
        match apsp.intermediate(a, b) {
            None => cells.push(b),
            Some(k) if k == a || k == b => {
                return Err(Error::Internal(format!(
                    "pair ({a}, {b}) lists an endpoint as its intermediate"
                )))
            }
            Some(k) => {
                pending.push((k, b));
                pending.push((a, k));
            }
        }
    }
    Path::from_cells(field, cells).map(Some)
}

/// Single-source distances by array-based Dijkstra; an independent check on
/// [`floyd`].
pub fn dijkstra_oracle(w: &WeightMatrix, source: CellId) -> Result<Vec<f64>> {
    let n = w.n();
    if source.index() >= n {
        return Err(Error::InvalidCell {
            id: source.get() as u64,
            cells: n,
        });
    }
    let mut dist = vec![f64::INFINITY; n];
    let mut done = vec![false; n];
    dist[source.index()] = 0.0;
    for _ in 0..n {
        let next = (0..n)
            .filter(|&v| !done[v] && dist[v].is_finite())
            .min_by(|&a, &b| dist[a].total_cmp(&dist[b]));
        let Some(u) = next else { break };
        done[u] = true;
        for (v, &weight) in w.row(u).iter().enumerate() {
            if !done[v] && weight.is_finite() && dist[u] + weight < dist[v] {
                dist[v] = dist[u] + weight;
            }
        }
    }
    Ok(dist)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::parse_field;
    use crate::visibility::build_weight_matrix;

    const INF: f64 = f64::INFINITY;

    fn id(n: u64) -> CellId {
        CellId::new(n).unwrap()
    }

    fn example_field() -> Field {
        parse_field(".#..\n..##\n.#..\n....").unwrap()
    }

    #[test]
    fn worked_field_distances() {
        let f = example_field();
        let r = floyd(&build_weight_matrix(&f).unwrap()).unwrap();
        assert!((r.distance(id(1), id(16)) - 6.0).abs() < 1e-9);
        assert_eq!(r.distance(id(1), id(3)), INF);
        assert!((0..16).all(|i| r.get(i, i) == 0.0));
    }

    #[test]
    fn open_field_keeps_direct_edges() {
        let f = Field::empty(3, 3).unwrap();
        let w = build_weight_matrix(&f).unwrap();
        let r = floyd(&w).unwrap();
        assert_eq!(r.distance(id(1), id(9)), 2.0 * std::f64::consts::SQRT_2);
        assert_eq!(r.distances(), w.as_slice());
        assert!(r.intermediates().iter().all(|&k| k == 0));
    }

    #[test]
    fn directed_input_is_handled() {
        let w = WeightMatrix::from_rows(&[
            vec![0.0, 1.0, INF],
            vec![INF, 0.0, 2.0],
            vec![1.0, INF, 0.0],
        ])
        .unwrap();
        for kernel in [Kernel::Reference, Kernel::Portable, Kernel::Auto] {
            let r = floyd_with(&w, kernel).unwrap();
            assert_eq!(r.get(0, 2), 3.0);
            assert_eq!(r.get(2, 1), 2.0);
            assert_eq!(r.get(1, 0), 3.0);
            assert_eq!(r.intermediate(id(1), id(3)), Some(id(2)));
        }
    }

    #[test]
    fn ties_keep_the_first_pivot() {
        // 1 -> 4 via 2 or via 3, both length 2; pivot 2 is found first.
        let w = WeightMatrix::from_rows(&[
            vec![0.0, 1.0, 1.0, INF],
            vec![1.0, 0.0, INF, 1.0],
            vec![1.0, INF, 0.0, 1.0],
            vec![INF, 1.0, 1.0, 0.0],
        ])
        .unwrap();
        let r = floyd(&w).unwrap();
        assert_eq!(r.intermediate(id(1), id(4)), Some(id(2)));
    }

    #[test]
    fn paths_on_the_worked_field() {
        let f = example_field();
        let r = floyd(&build_weight_matrix(&f).unwrap()).unwrap();
        let p = reconstruct_path(&r, &f, id(1), id(16)).unwrap().unwrap();
        assert_eq!(p.cells.first(), Some(&id(1)));
        assert_eq!(p.cells.last(), Some(&id(16)));
        assert!((p.length - 6.0).abs() < 1e-9);

        let p = reconstruct_path(&r, &f, id(6), id(6)).unwrap().unwrap();
        assert_eq!(p.cells, vec![id(6)]);
        assert_eq!(p.length, 0.0);

        assert_eq!(reconstruct_path(&r, &f, id(1), id(3)).unwrap(), None);
        assert!(reconstruct_path(&r, &f, id(1), id(20)).is_err());
    }

    #[test]
    fn cyclic_intermediates_are_reported() {
        let f = Field::empty(3, 1).unwrap();
        let broken = ApspResult {
            n: 3,
            dist: vec![0.0, 1.0, 2.0, 1.0, 0.0, 1.0, 2.0, 1.0, 0.0],
            via: vec![0, 0, 2, 0, 0, 0, 0, 0, 0],
        };
        // valid: 1 -> 2 -> 3
        assert_eq!(
            reconstruct_path(&broken, &f, id(1), id(3))
                .unwrap()
                .unwrap()
                .cells,
            vec![id(1), id(2), id(3)]
        );
        let looping = ApspResult {
            via: vec![0, 3, 2, 0, 0, 0, 0, 0, 0],
            ..broken
        };
        assert!(matches!(
            reconstruct_path(&looping, &f, id(1), id(3)),
            Err(Error::Internal(_))
        ));
    }

    #[test]
    fn dijkstra_small_cases() {
        let w = WeightMatrix::from_rows(&[vec![0.0]]).unwrap();
        assert_eq!(dijkstra_oracle(&w, id(1)).unwrap(), vec![0.0]);

        let w = build_weight_matrix(&Field::empty(2, 2).unwrap()).unwrap();
        assert_eq!(
            dijkstra_oracle(&w, id(1)).unwrap(),
            vec![0.0, 1.0, 1.0, std::f64::consts::SQRT_2]
        );
        assert!(dijkstra_oracle(&w, id(5)).is_err());
    }

    #[test]
    fn kernels_agree_bitwise_on_awkward_sizes() {
        // sizes straddling the 16-column tiles, 4-row groups and the 32-pivot block
        for (width, height, obstacles, seed) in [
            (1, 1, 0, 1),
            (5, 3, 3, 2),
            (7, 5, 6, 3),
            (9, 9, 20, 4),
            (13, 11, 30, 5),
        ] {
            let f = crate::field::random_field(width, height, obstacles, &[], seed).unwrap();
            let w = build_weight_matrix(&f).unwrap();
            let reference = floyd_with(&w, Kernel::Reference).unwrap();
            for kernel in [Kernel::Portable, Kernel::Auto] {
                let r = floyd_with(&w, kernel).unwrap();
                assert_eq!(r.intermediates(), reference.intermediates());
                let same = r
                    .distances()
                    .iter()
                    .zip(reference.distances())
                    .all(|(a, b)| a.to_bits() == b.to_bits());
                assert!(same, "{kernel:?} on {width}x{height}");
            }
        }
    }
}
