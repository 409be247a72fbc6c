//! Line of sight between cell centers and the direct-flight weight matrix.
//!
//! A segment between two centers is blocked when it meets the *closed*
//! square of any obstacle, so grazing an obstacle's edge or corner blocks it.
//! All blocking decisions use integer arithmetic on doubled coordinates
//! (cell `(row, col)` has its center at `(2 col + 1, 2 row + 1)` and its
//! square spans `[2 col, 2 col + 2] x [2 row, 2 row + 2]`).

use crate::error::{square_buffer, Error, Result};
use crate::field::{CellId, Field};

/// Square matrix of direct-flight distances; `f64::INFINITY` marks a pair
/// with no straight-line route.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    n: usize,
    data: Vec<f64>,
}

impl WeightMatrix {
    /// Wraps a row-major buffer. Entries must be non-negative or `+inf` and
    /// the diagonal must be zero.
    pub fn from_vec(n: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Shape("matrix must have at least one vertex".into()));
        }
        if n.checked_mul(n) != Some(data.len()) {
            return Err(Error::Shape(format!(
                "{} entries cannot form a {n}x{n} matrix",
                data.len()
            )));
        }
        for (idx, &v) in data.iter().enumerate() {
            let (i, j) = (idx / n, idx % n);
            if v.is_nan() || v < 0.0 {
                return Err(Error::Domain(format!(
                    "weight ({}, {}) = {v} is not a non-negative distance",
                    i + 1,
                    j + 1
                )));
            }
            if i == j && v != 0.0 {
                return Err(Error::Domain(format!(
                    "diagonal entry {} is {v}, expected 0",
                    i + 1
                )));
            }
        }
        Ok(WeightMatrix { n, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::Shape(format!(
                "row {} has {} entries, expected {n}",
                i + 1,
                row.len()
            )));
        }
        WeightMatrix::from_vec(n, rows.concat())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Entry for 0-based vertex indices.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn weight(&self, a: CellId, b: CellId) -> f64 {
        self.get(a.index(), b.index())
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.n)
    }
}

type Doubled = (i64, i64);

fn doubled_center(row: usize, col: usize) -> Doubled {
    (2 * col as i64 + 1, 2 * row as i64 + 1)
}

fn orient(p: Doubled, q: Doubled, r: Doubled) -> i64 {
    (q.0 - p.0) * (r.1 - p.1) - (q.1 - p.1) * (r.0 - p.0)
}

/// Exact test of whether the segment between the centers of `from` and `to`
/// meets the closed square of `cell`. Arguments are 0-based `(row, col)`.
///
/// Separating-axis test: the two coordinate axes via bounding boxes, then the
/// segment normal via the orientation of the square's corners.
pub fn segment_touches_cell(
    from: (usize, usize),
    to: (usize, usize),
    cell: (usize, usize),
) -> bool {
    let p = doubled_center(from.0, from.1);
    let q = doubled_center(to.0, to.1);
    let (x0, y0) = (2 * cell.1 as i64, 2 * cell.0 as i64);
    let (x1, y1) = (x0 + 2, y0 + 2);

    if p.0.max(q.0) < x0 || p.0.min(q.0) > x1 || p.1.max(q.1) < y0 || p.1.min(q.1) > y1 {
        return false;
    }
    let sides = [(x0, y0), (x1, y0), (x1, y1), (x0, y1)].map(|c| orient(p, q, c));
    !(sides.iter().all(|&s| s > 0) || sides.iter().all(|&s| s < 0))
}

fn ceil_div(a: i64, b: i64) -> i64 {
    -((-a).div_euclid(b))
}

/// Visits the strips (unit-wide bands along one axis) that the segment from
/// `p` to `q` crosses. Points are `(along, across)` in doubled coordinates
/// with `p.0 <= q.0`. For each strip, `hit(strip, lo, hi)` is asked whether
/// any obstacle sits in cells `lo..=hi` across it; those are exactly the
/// cells whose closed squares the segment meets inside that strip.
fn strips_blocked(
    p: Doubled,
    q: Doubled,
    across_len: usize,
    mut hit: impl FnMut(usize, usize, usize) -> bool,
) -> bool {
    debug_assert!(p.0 <= q.0);
    let da = q.0 - p.0;
    let dc = q.1 - p.1;
    let first = ((p.0 - 1) / 2) as usize;
    let last = ((q.0 - 1) / 2) as usize;
    if da == 0 {
        let (lo, hi) = (p.1.min(q.1), p.1.max(q.1));
        return hit(first, ((lo - 1) / 2) as usize, ((hi - 1) / 2) as usize);
    }
    let max_across = across_len as i64 - 1;
    let den = 2 * da;
    for strip in first..=last {
        let enter = (2 * strip as i64).max(p.0);
        let leave = (2 * strip as i64 + 2).min(q.0);
        // `across * da` where the segment enters and leaves this strip
        let y_enter = p.1 * da + (enter - p.0) * dc;
        let y_leave = p.1 * da + (leave - p.0) * dc;
        let (lo, hi) = (y_enter.min(y_leave), y_enter.max(y_leave));
        let lo = (ceil_div(lo, den) - 1).max(0);
        let hi = hi.div_euclid(den).min(max_across);
        if hit(strip, lo as usize, hi as usize) {
            return true;
        }
    }
    false
}

/// Runs [`strips_blocked`] along whichever axis the segment crosses fewer
/// strips of. `by_col(col, r0, r1)` and `by_row(row, c0, c1)` report
/// obstacles in a column or row span.
fn segment_blocked_with(
    field: &Field,
    a: (usize, usize),
    b: (usize, usize),
    by_col: impl FnMut(usize, usize, usize) -> bool,
    by_row: impl FnMut(usize, usize, usize) -> bool,
) -> bool {
    let (pa, pb) = (doubled_center(a.0, a.1), doubled_center(b.0, b.1));
    let order = |p: Doubled, q: Doubled| if p.0 <= q.0 { (p, q) } else { (q, p) };
    if a.1.abs_diff(b.1) <= a.0.abs_diff(b.0) {
        let (p, q) = order(pa, pb);
        strips_blocked(p, q, field.height(), by_col)
    } else {
        let (p, q) = order((pa.1, pa.0), (pb.1, pb.0));
        strips_blocked(p, q, field.width(), by_row)
    }
}

/// Single-query blocking test that inspects cells directly.
fn segment_blocked(field: &Field, a: (usize, usize), b: (usize, usize)) -> bool {
    segment_blocked_with(
        field,
        a,
        b,
        |col, r0, r1| (r0..=r1).any(|r| field.blocked_at(r, col)),
        |row, c0, c1| (c0..=c1).any(|c| field.blocked_at(row, c)),
    )
}

/// Prefix counts of obstacles along every row and column, so a span can be
/// tested in constant time.
struct ObstacleSpans {
    width: usize,
    height: usize,
    /// `cols[col * (height + 1) + r]` = obstacles in rows `0..r` of `col`
    cols: Vec<u32>,
    /// `rows[row * (width + 1) + c]` = obstacles in columns `0..c` of `row`
    rows: Vec<u32>,
}

impl ObstacleSpans {
    fn new(field: &Field) -> Self {
        let (width, height) = (field.width(), field.height());
        let mut cols = vec![0; width * (height + 1)];
        let mut rows = vec![0; height * (width + 1)];
        for r in 0..height {
            for c in 0..width {
                let b = field.blocked_at(r, c) as u32;
                cols[c * (height + 1) + r + 1] = cols[c * (height + 1) + r] + b;
                rows[r * (width + 1) + c + 1] = rows[r * (width + 1) + c] + b;
            }
        }
        ObstacleSpans {
            width,
            height,
            cols,
            rows,
        }
    }

    fn col(&self, col: usize, r0: usize, r1: usize) -> bool {
        let base = col * (self.height + 1);
        self.cols[base + r1 + 1] > self.cols[base + r0]
    }

    fn row(&self, row: usize, c0: usize, c1: usize) -> bool {
        let base = row * (self.width + 1);
        self.rows[base + c1 + 1] > self.rows[base + c0]
    }
}

type RowCol = (usize, usize);

fn endpoints(field: &Field, a: CellId, b: CellId) -> Result<Option<(RowCol, RowCol)>> {
    let ra = field.row_col(a)?;
    let rb = field.row_col(b)?;
    if field.is_obstacle(a)? || field.is_obstacle(b)? {
        return Ok(None);
    }
    Ok(Some((ra, rb)))
}

/// Whether a UAV can fly straight from `a` to `b`. Every cell sees itself.
pub fn visible(field: &Field, a: CellId, b: CellId) -> Result<bool> {
    if a == b {
        field.check(a)?;
        return Ok(true);
    }
    Ok(match endpoints(field, a, b)? {
        Some((ra, rb)) => !segment_blocked(field, ra, rb),
        None => false,
    })
}

/// Same decision as [`visible`], obtained by testing the segment against
/// every obstacle square with [`segment_touches_cell`]. Quadratically slower;
/// kept as an independent route for cross-checking.
pub fn visible_by_scan(field: &Field, a: CellId, b: CellId) -> Result<bool> {
    if a == b {
        field.check(a)?;
        return Ok(true);
    }
    let Some((ra, rb)) = endpoints(field, a, b)? else {
        return Ok(false);
    };
    for obstacle in field.obstacles() {
        if segment_touches_cell(ra, rb, field.row_col(obstacle)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Builds the direct-flight matrix: 0 on the diagonal, the center distance
/// for mutually visible cells and infinity otherwise.
pub fn build_weight_matrix(field: &Field) -> Result<WeightMatrix> {
    let n = field.cell_count();
    let w = field.width();
    let spans = ObstacleSpans::new(field);
    let mut data = square_buffer(n, f64::INFINITY)?;
    for i in 0..n {
        data[i * n + i] = 0.0;
        if field.blocked_index(i) {
            continue;
        }
        let a = (i / w, i % w);
        for j in i + 1..n {
            if field.blocked_index(j) {
                continue;
            }
            let b = (j / w, j % w);
            let blocked = segment_blocked_with(
                field,
                a,
                b,
                |col, r0, r1| spans.col(col, r0, r1),
                |row, c0, c1| spans.row(row, c0, c1),
            );
            if !blocked {
                let dr = a.0.abs_diff(b.0) as f64;
                let dc = a.1.abs_diff(b.1) as f64;
                let dist = (dr * dr + dc * dc).sqrt();
                data[i * n + j] = dist;
                data[j * n + i] = dist;
            }
        }
    }
    Ok(WeightMatrix { n, data })
}
