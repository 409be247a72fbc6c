//! The grid world: cell numbering, obstacle sets and the ASCII map format.
//!
//! Cells are unit squares numbered from 1 in row-major order with row 0 at
//! the top, so in a 4-wide field cells 1, 5, 9 and 13 form the left column.
//! The map format uses one text row per grid row: `.` is free, `#` is an
//! obstacle.

use std::fmt;
use std::num::NonZeroU32;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// 1-based, row-major cell number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellId(NonZeroU32);

impl CellId {
    /// Returns `None` for 0 or ids that do not fit in 32 bits.
    pub fn new(id: u64) -> Option<Self> {
        u32::try_from(id).ok().and_then(NonZeroU32::new).map(CellId)
    }

    /// Cell for a 0-based vertex index.
    pub fn from_index(index: usize) -> Self {
        let id = u32::try_from(index + 1).expect("cell index exceeds u32 range");
        CellId(NonZeroU32::new(id).unwrap())
    }

    pub fn get(self) -> u32 {
        self.0.get()
    }

    /// 0-based vertex index.
    pub fn index(self) -> usize {
        self.0.get() as usize - 1
    }
}

impl fmt::Display for CellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl FromStr for CellId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let raw: u64 = s
            .trim()
            .parse()
            .map_err(|_| Error::Argument(format!("`{s}` is not a cell id")))?;
        CellId::new(raw).ok_or(Error::InvalidCell { id: raw, cells: 0 })
    }
}

/// A position in unit-grid lengths; `x` runs along columns, `y` down rows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Rectangular grid with a set of obstacle cells. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Field {
    width: usize,
    height: usize,
    blocked: Vec<bool>,
}

impl Field {
    /// Builds a field; duplicate obstacle ids collapse into one.
    pub fn new(
        width: usize,
        height: usize,
        obstacles: impl IntoIterator<Item = CellId>,
    ) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Argument(format!(
                "field dimensions must be positive, got {width}x{height}"
            )));
        }
        let cells = width
            .checked_mul(height)
            .filter(|&c| c <= u32::MAX as usize)
            .ok_or_else(|| Error::Capacity(format!("{width}x{height} field is too large")))?;
        let mut blocked = vec![false; cells];
        for cell in obstacles {
            if cell.index() >= cells {
                return Err(Error::InvalidCell {
                    id: cell.get() as u64,
                    cells,
                });
            }
            blocked[cell.index()] = true;
        }
        Ok(Field {
            width,
            height,
            blocked,
        })
    }

    pub fn empty(width: usize, height: usize) -> Result<Self> {
        Field::new(width, height, [])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn cell_count(&self) -> usize {
        self.blocked.len()
    }

    /// Validates that `cell` lies within this field.
    pub fn check(&self, cell: CellId) -> Result<CellId> {
        if cell.index() < self.cell_count() {
            Ok(cell)
        } else {
            Err(Error::InvalidCell {
                id: cell.get() as u64,
                cells: self.cell_count(),
            })
        }
    }

    /// Validates a raw id and converts it.
    pub fn cell(&self, id: u64) -> Result<CellId> {
        CellId::new(id)
            .ok_or(Error::InvalidCell {
                id,
                cells: self.cell_count(),
            })
            .and_then(|c| self.check(c))
    }

    pub fn cell_at(&self, row: usize, col: usize) -> Result<CellId> {
        if row >= self.height || col >= self.width {
            return Err(Error::Argument(format!(
                "({row}, {col}) lies outside the {}x{} field",
                self.width, self.height
            )));
        }
        Ok(CellId::from_index(row * self.width + col))
    }

    /// 0-based `(row, col)` of a cell.
    pub fn row_col(&self, cell: CellId) -> Result<(usize, usize)> {
        let idx = self.check(cell)?.index();
        Ok((idx / self.width, idx % self.width))
    }

    pub fn is_obstacle(&self, cell: CellId) -> Result<bool> {
        Ok(self.blocked[self.check(cell)?.index()])
    }

    pub(crate) fn blocked_at(&self, row: usize, col: usize) -> bool {
        self.blocked[row * self.width + col]
    }

    pub(crate) fn blocked_index(&self, index: usize) -> bool {
        self.blocked[index]
    }

    /// Obstacle cells in ascending id order.
    pub fn obstacles(&self) -> impl Iterator<Item = CellId> + '_ {
        self.blocked
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| CellId::from_index(i))
    }

    pub fn obstacle_count(&self) -> usize {
        self.blocked.iter().filter(|&&b| b).count()
    }

    pub fn cells(&self) -> impl Iterator<Item = CellId> {
        (0..self.cell_count()).map(CellId::from_index)
    }

    /// Center of `cell` in unit-grid coordinates, always at half-integers.
    pub fn cell_center(&self, cell: CellId) -> Result<Point> {
        let (row, col) = self.row_col(cell)?;
        Ok(Point {
            x: col as f64 + 0.5,
            y: row as f64 + 0.5,
        })
    }

    /// Canonical map text: `.`/`#` rows joined by LF, with a trailing LF.
    pub fn to_map_string(&self) -> String {
        let mut out = String::with_capacity((self.width + 1) * self.height);
        for row in self.blocked.chunks(self.width) {
            out.extend(row.iter().map(|&b| if b { '#' } else { '.' }));
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_map_string())
    }
}

impl FromStr for Field {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_field(s)
    }
}

/// Parses the ASCII map format. LF and CRLF line endings are accepted and the
/// trailing newline is optional.
pub fn parse_field(text: &str) -> Result<Field> {
    let body = text
        .strip_suffix("\r\n")
        .or_else(|| text.strip_suffix('\n'))
        .unwrap_or(text);
    if body.is_empty() {
        return Err(Error::format(1, "empty map"));
    }

    let mut width = None;
    let mut blocked = Vec::new();
    let mut height = 0;
    for (lineno, line) in body.split('\n').enumerate() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        let lineno = lineno + 1;
        let before = blocked.len();
        for (col, ch) in line.chars().enumerate() {
            match ch {
                '.' => blocked.push(false),
                '#' => blocked.push(true),
                other => {
                    return Err(Error::format(
                        lineno,
                        format!("unexpected character {other:?} in column {}", col + 1),
                    ))
                }
            }
        }
        let len = blocked.len() - before;
        match width {
            None if len == 0 => return Err(Error::format(lineno, "empty row")),
            None => width = Some(len),
            Some(w) if w != len => {
                return Err(Error::format(
                    lineno,
                    format!("row has {len} cells, expected {w}"),
                ))
            }
            Some(_) => {}
        }
        height += 1;
    }

    let width = width.expect("non-empty body has at least one row");
    let obstacles: Vec<CellId> = blocked
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| CellId::from_index(i))
        .collect();
    Field::new(width, height, obstacles)
}

/// Places `num_obstacles` obstacles uniformly without replacement among the
/// cells not in `excluded`. The same seed and parameters always give the same
/// field.
pub fn random_field(
    width: usize,
    height: usize,
    num_obstacles: usize,
    excluded: &[CellId],
    seed: u64,
) -> Result<Field> {
    let empty = Field::empty(width, height)?;
    let mut skip = vec![false; empty.cell_count()];
    for &cell in excluded {
        skip[empty.check(cell)?.index()] = true;
    }
    let candidates: Vec<CellId> = empty.cells().filter(|c| !skip[c.index()]).collect();
    if num_obstacles > candidates.len() {
        return Err(Error::Capacity(format!(
            "{num_obstacles} obstacles requested but only {} cells are available",
            candidates.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picks = rand::seq::index::sample(&mut rng, candidates.len(), num_obstacles);
    Field::new(width, height, picks.into_iter().map(|i| candidates[i]))
}
