use serde::{Deserialize, Serialize};

use super::KnotDiagram;

/// Arc colors in `{0, 1, 2}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tricoloring {
    pub colors: Vec<u8>,
    pub valid: bool,
    pub non_monochromatic: bool,
}

impl Tricoloring {
    /// At every crossing the over arc and both under arcs are all equal or
    /// all distinct.
    pub fn check(diagram: &KnotDiagram, colors: &[u8]) -> bool {
        colors.len() == diagram.arcs.len()
            && colors.iter().all(|&c| c < 3)
            && diagram.crossings.iter().all(|c| {
                let a = colors[c.over_arc];
                let b = colors[c.under_arcs[0]];
                let d = colors[c.under_arcs[1]];
                (a as u32 + b as u32 + d as u32) % 3 == 0
            })
    }

    pub fn colors_used(&self) -> usize {
        (0..3u8).filter(|c| self.colors.contains(c)).count()
    }
}

/// Row-reduces `rows` over GF(3) in place and returns the pivot columns.
fn rref_mod3(rows: &mut [Vec<u8>], cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(r, p);
        // 1 and 2 are their own inverses mod 3.
        let inv = rows[r][col];
        for x in rows[r].iter_mut() {
            *x = (*x * inv) % 3;
        }
        for i in 0..rows.len() {
            if i != r && rows[i][col] != 0 {
                let f = rows[i][col];
                for j in 0..cols {
                    rows[i][j] = (rows[i][j] + 9 - f * rows[r][j]) % 3;
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    pivots
}

/// Nullspace basis of the crossing relations `over + under + under = 0`
/// over GF(3), one vector per free arc.
pub fn coloring_space(diagram: &KnotDiagram) -> Vec<Vec<u8>> {
    let m = diagram.arcs.len();
    let mut rows: Vec<Vec<u8>> = diagram
        .crossings
        .iter()
        .map(|c| {
            let mut row = vec![0u8; m];
            for a in [c.over_arc, c.under_arcs[0], c.under_arcs[1]] {
                row[a] = (row[a] + 1) % 3;
            }
            row
        })
        .collect();
    let pivots = rref_mod3(&mut rows, m);
    let free: Vec<usize> = (0..m).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![0u8; m];
            v[f] = 1;
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = (3 - rows[r][f]) % 3;
            }
            v
        })
        .collect()
}

/// A non-monochromatic coloring if one exists. Constant colorings always
/// solve the relations, so one exists exactly when the solution space has
/// dimension at least two.
pub fn tricolorable(diagram: &KnotDiagram) -> Option<Tricoloring> {
    let basis = coloring_space(diagram);
    let v = basis.into_iter().find(|v| v.iter().any(|&x| x != v[0]))?;
    // Shift so that arc 0 gets color 0.
    let colors: Vec<u8> = v.iter().map(|&x| (x + 3 - v[0]) % 3).collect();
    let valid = Tricoloring::check(diagram, &colors);
    Some(Tricoloring { colors, valid, non_monochromatic: true })
}
