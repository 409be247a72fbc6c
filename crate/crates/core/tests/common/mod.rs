//! Helpers shared by the integration tests and the acceptance runner.
#![allow(dead_code)]

use std::path::PathBuf;

use gridfloyd::{
    build_weight_matrix, dijkstra_oracle, floyd, random_field, reconstruct_path, visible, CellId,
    Field, WeightMatrix,
};
use proptest::test_runner::{Config as ProptestConfig, FileFailurePersistence};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const TOL: f64 = 1e-9;

pub fn id(n: u64) -> CellId {
    CellId::new(n).unwrap()
}

pub fn testdata(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("testdata")
        .join(name)
}

pub fn proptest_config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: Some(Box::new(FileFailurePersistence::WithSource("regressions"))),
        ..ProptestConfig::default()
    }
}

/// The 4x4 example field with obstacles in cells 2, 7, 8 and 10.
pub fn example_field() -> Field {
    Field::new(4, 4, [2, 7, 8, 10].map(id)).unwrap()
}

/// Weight table of the example field, read from its symbolic transcription
/// (`inf`, `sqrt2`, `sqrt5` or an integer, first row and column are labels).
pub fn golden_weights() -> WeightMatrix {
    let text = std::fs::read_to_string(testdata("example_weights.txt")).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|line| {
            line.split_whitespace()
                .skip(1)
                .map(|tok| match tok {
                    "inf" => f64::INFINITY,
                    "sqrt2" => 2f64.sqrt(),
                    "sqrt5" => 5f64.sqrt(),
                    n => n.parse().unwrap(),
                })
                .collect()
        })
        .collect();
    WeightMatrix::from_rows(&rows).unwrap()
}

/// Pairs of the example field whose answer depends on edge or corner contact,
/// with the expected visibility.
pub const GRAZING_CASES: [(u64, u64, bool); 4] = [
    (6, 11, false),
    (11, 14, false),
    (9, 14, false),
    (12, 14, true),
];

type Frac = (i64, i64);

fn frac_lt(a: Frac, b: Frac) -> bool {
    // denominators are positive
    (a.0 as i128) * (b.1 as i128) < (b.0 as i128) * (a.1 as i128)
}

fn axis_range(p: i64, d: i64, lo: i64, hi: i64) -> Option<(Frac, Frac)> {
    if d == 0 {
        return (lo <= p && p <= hi).then_some(((0, 1), (1, 1)));
    }
    let (a, b) = ((lo - p, d), (hi - p, d));
    let norm = |f: Frac| if f.1 < 0 { (-f.0, -f.1) } else { f };
    let (a, b) = (norm(a), norm(b));
    Some(if frac_lt(b, a) { (b, a) } else { (a, b) })
}

/// Parametric clipping of the center-to-center segment against the closed
/// square of `cell`, in exact rationals on doubled coordinates.
pub fn clip_oracle(field: &Field, a: CellId, b: CellId, cell: CellId) -> bool {
    let (ra, ca) = field.row_col(a).unwrap();
    let (rb, cb) = field.row_col(b).unwrap();
    let (r, c) = field.row_col(cell).unwrap();
    let (px, py) = (2 * ca as i64 + 1, 2 * ra as i64 + 1);
    let (dx, dy) = (2 * (cb as i64 - ca as i64), 2 * (rb as i64 - ra as i64));
    let (x0, y0) = (2 * c as i64, 2 * r as i64);
    let mut lo: Frac = (0, 1);
    let mut hi: Frac = (1, 1);
    for range in [
        axis_range(px, dx, x0, x0 + 2),
        axis_range(py, dy, y0, y0 + 2),
    ] {
        let Some((l, h)) = range else { return false };
        if frac_lt(lo, l) {
            lo = l;
        }
        if frac_lt(h, hi) {
            hi = h;
        }
    }
    !frac_lt(hi, lo)
}

pub fn visible_oracle(field: &Field, a: CellId, b: CellId) -> bool {
    if a == b {
        return true;
    }
    field.obstacles().all(|o| !clip_oracle(field, a, b, o))
}

/// Seeded random fields of 1..=`max_side` per dimension with obstacle density
/// drawn uniformly from [0, `max_density`].
pub fn corpus(count: usize, max_side: usize, max_density: f64, seed: u64) -> Vec<Field> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let w = rng.random_range(1..=max_side);
            let h = rng.random_range(1..=max_side);
            let density = rng.random_range(0.0..=max_density);
            let k = (density * (w * h) as f64).round() as usize;
            random_field(w, h, k, &[], rng.random()).unwrap()
        })
        .collect()
}

fn close(a: f64, b: f64) -> bool {
    if a.is_infinite() || b.is_infinite() {
        a == b
    } else {
        (a - b).abs() <= TOL
    }
}

/// Floyd distances agree with Dijkstra from every source.
pub fn check_oracle(field: &Field) -> Result<(), String> {
    let w = build_weight_matrix(field).map_err(|e| e.to_string())?;
    let apsp = floyd(&w).map_err(|e| e.to_string())?;
    for s in field.cells() {
        let d = dijkstra_oracle(&w, s).map_err(|e| e.to_string())?;
        for t in field.cells() {
            let (f, o) = (apsp.distance(s, t), d[t.index()]);
            if !close(f, o) {
                return Err(format!("{field:?}: d[{s}][{t}] floyd {f} dijkstra {o}"));
            }
        }
    }
    Ok(())
}

/// Triangle inequality, symmetry, zero diagonal and d <= w.
pub fn check_metric(field: &Field) -> Result<(), String> {
    let w = build_weight_matrix(field).map_err(|e| e.to_string())?;
    let apsp = floyd(&w).map_err(|e| e.to_string())?;
    let n = w.n();
    for i in 0..n {
        if apsp.get(i, i) != 0.0 {
            return Err(format!("d[{i}][{i}] = {}", apsp.get(i, i)));
        }
        for j in 0..n {
            let dij = apsp.get(i, j);
            if !close(dij, apsp.get(j, i)) {
                return Err(format!("asymmetric at ({i}, {j})"));
            }
            if dij > w.get(i, j) + TOL {
                return Err(format!("d[{i}][{j}] = {dij} exceeds w = {}", w.get(i, j)));
            }
            for k in 0..n {
                if apsp.get(i, k) > dij + apsp.get(j, k) + TOL {
                    return Err(format!("triangle inequality fails for ({i}, {j}, {k})"));
                }
            }
        }
    }
    Ok(())
}

/// Every reachable pair expands to a path of mutually visible hops whose
/// length equals the distance; unreachable pairs give no path.
pub fn check_paths(field: &Field) -> Result<(), String> {
    let w = build_weight_matrix(field).map_err(|e| e.to_string())?;
    let apsp = floyd(&w).map_err(|e| e.to_string())?;
    for s in field.cells() {
        for t in field.cells() {
            let d = apsp.distance(s, t);
            let path = reconstruct_path(&apsp, field, s, t).map_err(|e| e.to_string())?;
            match path {
                None if d.is_infinite() => {}
                None => return Err(format!("no path for finite d[{s}][{t}] = {d}")),
                Some(_) if d.is_infinite() => {
                    return Err(format!("path returned for unreachable ({s}, {t})"))
                }
                Some(p) => {
                    if p.cells.first() != Some(&s) || p.cells.last() != Some(&t) {
                        return Err(format!("path {:?} does not join {s} and {t}", p.cells));
                    }
                    for hop in p.cells.windows(2) {
                        if !visible(field, hop[0], hop[1]).unwrap()
                            || !visible_oracle(field, hop[0], hop[1])
                        {
                            return Err(format!("hop {} -> {} is blocked", hop[0], hop[1]));
                        }
                    }
                    if !close(p.length, d) {
                        return Err(format!("path length {} != d[{s}][{t}] = {d}", p.length));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Copies of `field` with one obstacle moved to a free neighbouring cell
/// (4-neighbourhood), skipping moves onto `keep`.
pub fn perturbations(field: &Field, keep: &[CellId]) -> Vec<Field> {
    let mut out = Vec::new();
    let obstacles: Vec<CellId> = field.obstacles().collect();
    for (i, &o) in obstacles.iter().enumerate() {
        let (r, c) = field.row_col(o).unwrap();
        let moves = [(-1i64, 0i64), (1, 0), (0, -1), (0, 1)];
        for (dr, dc) in moves {
            let (nr, nc) = (r as i64 + dr, c as i64 + dc);
            if nr < 0 || nc < 0 {
                continue;
            }
            let Ok(target) = field.cell_at(nr as usize, nc as usize) else {
                continue;
            };
            if field.is_obstacle(target).unwrap() || keep.contains(&target) {
                continue;
            }
            let mut moved = obstacles.clone();
            moved[i] = target;
            out.push(Field::new(field.width(), field.height(), moved).unwrap());
        }
    }
    out
}

/// Visibility of the grazing pairs under every one-cell obstacle move agrees
/// with the clipping oracle. Returns how many moves flipped a pair.
pub fn check_grazing_perturbations() -> Result<usize, String> {
    let field = example_field();
    let mut flips = 0;
    for (a, b, expected) in GRAZING_CASES {
        let (a, b) = (id(a), id(b));
        if visible(&field, a, b).unwrap() != expected {
            return Err(format!("{a} <-> {b} should be visible = {expected}"));
        }
        for moved in perturbations(&field, &[a, b]) {
            let got = visible(&moved, a, b).unwrap();
            let want = visible_oracle(&moved, a, b);
            if got != want {
                return Err(format!(
                    "{a} <-> {b} on\n{}gave {got}, oracle {want}",
                    moved.to_map_string()
                ));
            }
            if got != expected {
                flips += 1;
            }
        }
    }
    Ok(flips)
}
