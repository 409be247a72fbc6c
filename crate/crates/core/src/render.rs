//! Static SVG pictures of a field with planned paths.

use std::fmt::Write;

use crate::apsp::Path;
use crate::error::Result;
use crate::field::{CellId, Field};

pub const DEFAULT_CELL_PIXELS: u32 = 24;

const FREE_FILL: &str = "#ffffff";
const OBSTACLE_FILL: &str = "#333333";
const GRID_STROKE: &str = "#bbbbbb";
const PATH_STROKE: &str = "#1f77b4";
const SOURCE_FILL: &str = "#2ca02c";
const DESTINATION_FILL: &str = "#d62728";

#[derive(Debug, Clone)]
pub struct RenderSpec<'a> {
    pub field: &'a Field,
    pub paths: Vec<Path>,
    pub sources: Vec<CellId>,
    pub destination: Option<CellId>,
    pub cell_pixels: u32,
}

impl<'a> RenderSpec<'a> {
    pub fn new(field: &'a Field) -> Self {
        RenderSpec {
            field,
            paths: Vec::new(),
            sources: Vec::new(),
            destination: None,
            cell_pixels: DEFAULT_CELL_PIXELS,
        }
    }

    fn validate(&self) -> Result<()> {
        let path_cells = self.paths.iter().flat_map(|p| p.cells.iter());
        for &cell in path_cells.chain(&self.sources).chain(&self.destination) {
            self.field.check(cell)?;
        }
        Ok(())
    }
}

/// Renders the field: one square per cell with obstacles filled dark, each
/// path as a polyline through cell centers, sources as green dots and the
/// destination as a red dot. Identical input gives byte-identical output.
pub fn render_svg(spec: &RenderSpec<'_>) -> Result<String> {
    spec.validate()?;
    let field = spec.field;
    let px = spec.cell_pixels.max(1) as f64;
    let (width, height) = (field.width() as f64 * px, field.height() as f64 * px);
    let center = |cell: CellId| -> Result<(f64, f64)> {
        let p = field.cell_center(cell)?;
        Ok((p.x * px, p.y * px))
    };

    let mut svg = String::new();
    // writing into a String is infallible
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(svg, r#"<g stroke="{GRID_STROKE}" stroke-width="1">"#);
    for cell in field.cells() {
        let (row, col) = field.row_col(cell)?;
        let (class, fill) = if field.is_obstacle(cell)? {
            ("cell obstacle", OBSTACLE_FILL)
        } else {
            ("cell", FREE_FILL)
        };
        let _ = writeln!(
            svg,
            r#"<rect class="{class}" x="{}" y="{}" width="{px}" height="{px}" fill="{fill}"/>"#,
            col as f64 * px,
            row as f64 * px,
        );
    }
    svg.push_str("</g>\n");

    for path in &spec.paths {
        let points = path
            .cells
            .iter()
            .map(|&c| center(c).map(|(x, y)| format!("{x},{y}")))
            .collect::<Result<Vec<_>>>()?;
        let _ = writeln!(
            svg,
            r#"<polyline class="path" points="{}" fill="none" stroke="{PATH_STROKE}" stroke-width="{}" stroke-linejoin="round"/>"#,
            points.join(" "),
            (px / 8.0).max(1.0)
        );
    }

    let radius = px / 4.0;
    for &source in &spec.sources {
        let (x, y) = center(source)?;
        let _ = writeln!(
            svg,
            r#"<circle class="source" cx="{x}" cy="{y}" r="{radius}" fill="{SOURCE_FILL}"/>"#
        );
    }
    if let Some(dest) = spec.destination {
        let (x, y) = center(dest)?;
        let _ = writeln!(
            svg,
            r#"<circle class="destination" cx="{x}" cy="{y}" r="{radius}" fill="{DESTINATION_FILL}"/>"#
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
