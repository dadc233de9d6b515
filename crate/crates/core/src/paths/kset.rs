use std::fmt::Write as _;

use super::Point2;
use crate::error::{precondition, Error, Result};

/// A compact set `K ⊆ D(0, 1)`, rasterized over `[-1, 1]²`.
///
/// Cells are squares of side `h`; a cell belongs to `K` when its centre
/// does. Membership of a point additionally requires `|q| < 1`, so `K`
/// never leaves the open unit disc even where a boundary cell pokes out.
#[derive(Debug, Clone, PartialEq)]
pub struct KSet {
    h: f64,
    side: usize,
    /// Row-major with row 0 at the bottom (`y ∈ [-1, -1 + h)`).
    cells: Vec<bool>,
    area: f64,
}

/// Default raster resolution.
pub const DEFAULT_CELL: f64 = 1.0 / 512.0;

impl KSet {
    fn from_predicate(h: f64, inside: impl Fn(Point2) -> bool) -> Result<Self> {
        let side = Self::side_for(h)?;
        let mut cells = vec![false; side * side];
        for row in 0..side {
            let y = -1.0 + (row as f64 + 0.5) * h;
            for col in 0..side {
                let c = Point2::new(-1.0 + (col as f64 + 0.5) * h, y);
                cells[row * side + col] = c.norm2() < 1.0 && inside(c);
            }
        }
        Self::from_cells(h, side, cells)
    }

    fn side_for(h: f64) -> Result<usize> {
        if !(h > 0.0 && h <= 1.0) {
            return Err(precondition(format!("cell size must lie in (0, 1], got {h}")));
        }
        let side = (2.0 / h).round() as usize;
        if ((side as f64) * h - 2.0).abs() > 1e-9 {
            return Err(precondition(format!("cell size {h} does not tile [-1, 1]")));
        }
        Ok(side)
    }

    fn from_cells(h: f64, side: usize, cells: Vec<bool>) -> Result<Self> {
        let count = cells.iter().filter(|&&c| c).count();
        if count == 0 {
            return Err(precondition("K-set is empty"));
        }
        Ok(Self { h, side, cells, area: count as f64 * h * h })
    }

    /// The unit disc itself.
    pub fn disc(h: f64) -> Result<Self> {
        Self::from_predicate(h, |_| true)
    }

    /// Upper half of the unit disc (`y >= 0`).
    pub fn half_disc(h: f64) -> Result<Self> {
        Self::from_predicate(h, |c| c.y >= 0.0)
    }

    /// Rasterizes a simple polygon by the even-odd rule on cell centres.
    pub fn from_polygon(vertices: &[Point2], h: f64) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(precondition("a polygon needs at least three vertices"));
        }
        Self::from_predicate(h, |c| point_in_polygon(c, vertices))
    }

    pub fn cell_size(&self) -> f64 {
        self.h
    }

    /// Lebesgue measure `|K|` of the raster.
    pub fn area(&self) -> f64 {
        self.area
    }

    #[inline]
    pub fn contains(&self, q: Point2) -> bool {
        if q.norm2() >= 1.0 {
            return false;
        }
        let col = ((q.x + 1.0) / self.h) as usize;
        let row = ((q.y + 1.0) / self.h) as usize;
        // |q| < 1 keeps both indices in range except for rounding at the edge.
        row < self.side && col < self.side && self.cells[row * self.side + col]
    }

    /// `p ∈ x + εK`.
    #[inline]
    pub fn contains_scaled(&self, p: Point2, center: Point2, eps: f64) -> bool {
        self.contains((p - center) * (1.0 / eps))
    }

    /// Parses the text format:
    ///
    /// ```text
    /// polygon 3        raster 0.5
    /// 0 0              0110
    /// 0.5 0            1111
    /// 0 0.5            1111
    ///                  0110
    /// ```
    ///
    /// Raster rows run from the top (`y` near 1) down, columns left to right;
    /// digits may be separated by spaces. Polygons are rasterized at
    /// [`DEFAULT_CELL`].
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
        let (hl, header) = lines.next().ok_or(Error::Parse { line: 1, message: "empty K-set file".into() })?;
        let mut words = header.split_whitespace();
        let parse_err = |line: usize, message: String| Error::Parse { line: line + 1, message };
        match (words.next(), words.next()) {
            (Some("polygon"), Some(n)) => {
                let n: usize = n.parse().map_err(|e| parse_err(hl, format!("bad vertex count: {e}")))?;
                let mut vertices = Vec::with_capacity(n);
                for (ln, line) in lines.by_ref().take(n) {
                    let nums: Vec<f64> = line
                        .split_whitespace()
                        .map(str::parse)
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|e| parse_err(ln, format!("bad coordinate: {e}")))?;
                    if nums.len() != 2 {
                        return Err(parse_err(ln, "expected two coordinates".into()));
                    }
                    vertices.push(Point2::new(nums[0], nums[1]));
                }
                if vertices.len() != n {
                    return Err(parse_err(hl, format!("expected {n} vertices, found {}", vertices.len())));
                }
                if let Some((ln, _)) = lines.next() {
                    return Err(parse_err(ln, "trailing content after polygon".into()));
                }
                Self::from_polygon(&vertices, DEFAULT_CELL)
            }
            (Some("raster"), Some(h)) => {
                let h: f64 = h.parse().map_err(|e| parse_err(hl, format!("bad cell size: {e}")))?;
                let side = Self::side_for(h).map_err(|e| parse_err(hl, e.to_string()))?;
                let mut cells = vec![false; side * side];
                let mut rows = 0;
                for (ln, line) in lines {
                    if rows == side {
                        return Err(parse_err(ln, format!("more than {side} raster rows")));
                    }
                    let bits: Vec<bool> = line
                        .chars()
                        .filter(|c| !c.is_whitespace())
                        .map(|c| match c {
                            '0' => Ok(false),
                            '1' => Ok(true),
                            other => Err(parse_err(ln, format!("unexpected character {other:?}"))),
                        })
                        .collect::<Result<_>>()?;
                    if bits.len() != side {
                        return Err(parse_err(ln, format!("expected {side} cells, found {}", bits.len())));
                    }
                    let row = side - 1 - rows;
                    cells[row * side..(row + 1) * side].copy_from_slice(&bits);
                    rows += 1;
                }
                if rows != side {
                    return Err(parse_err(hl, format!("expected {side} raster rows, found {rows}")));
                }
                for row in 0..side {
                    for col in 0..side {
                        let c = Point2::new(-1.0 + (col as f64 + 0.5) * h, -1.0 + (row as f64 + 0.5) * h);
                        if cells[row * side + col] && c.norm2() >= 1.0 {
                            return Err(parse_err(hl, format!("cell ({row}, {col}) lies outside the unit disc")));
                        }
                    }
                }
                Self::from_cells(h, side, cells)
            }
            _ => Err(parse_err(hl, "expected 'polygon n' or 'raster h'".into())),
        }
    }

    pub fn to_raster_text(&self) -> String {
        let mut out = format!("raster {}\n", self.h);
        for row in (0..self.side).rev() {
            for col in 0..self.side {
                out.push(if self.cells[row * self.side + col] { '1' } else { '0' });
            }
            out.push('\n');
        }
        out
    }

    pub fn describe(&self) -> String {
        let mut s = String::new();
        let _ = write!(s, "raster {}x{} cells of side {}, area {:.6}", self.side, self.side, self.h, self.area);
        s
    }
}

fn point_in_polygon(p: Point2, v: &[Point2]) -> bool {
    let mut inside = false;
    let mut j = v.len() - 1;
    for i in 0..v.len() {
        let (a, b) = (v[i], v[j]);
        if (a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x {
            inside = !inside;
        }
        j = i;
    }
    inside
}
