//! Correspondence analysis of clique × contexonym tables.
//!
//! With `P = N / n`, row masses `r` and column masses `c`, the standardized
//! residuals `S = D_r^{-1/2} (P - r cᵀ) D_c^{-1/2}` are decomposed as
//! `S = U Σ Vᵀ`. Principal coordinates are `F = D_r^{-1/2} U Σ` for rows
//! and `G = D_c^{-1/2} V Σ` for columns. The trivial factor (singular value
//! 0, vectors `√r` and `√c`) is dropped, leaving `min(R, C) - 1` axes.
//!
//! Results are made reproducible by working on a canonical row order
//! (rows sorted by content) and by orienting every axis so that its
//! largest-magnitude row loading is positive.

use std::cmp::Ordering;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::cliques::Clique;
use crate::error::{Error, Result};
use crate::morpho::LexicalUnit;

/// Relative cut below which a singular value is treated as a null factor.
pub const NULL_FACTOR_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Weighting {
    #[default]
    Binary,
    Support,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContingencyTable {
    /// Clique id of each row.
    pub rows: Vec<usize>,
    pub cols: Vec<LexicalUnit>,
    pub counts: DMatrix<f64>,
    pub weighting: Weighting,
}

impl ContingencyTable {
    /// Wraps a raw matrix (rows and columns labelled by index). The matrix
    /// must be non-negative with no all-zero row or column and at least two
    /// of each.
    pub fn from_matrix(counts: DMatrix<f64>) -> Result<Self> {
        validate_counts(&counts)?;
        Ok(ContingencyTable {
            rows: (0..counts.nrows()).collect(),
            cols: (0..counts.ncols())
                .map(|j| LexicalUnit::new(format!("c{j}"), crate::morpho::PosTag::X))
                .collect(),
            counts,
            weighting: Weighting::Support,
        })
    }

    pub fn nrows(&self) -> usize {
        self.counts.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.counts.ncols()
    }
}

fn validate_counts(counts: &DMatrix<f64>) -> Result<()> {
    let (r, c) = counts.shape();
    if r < 2 || c < 2 {
        return Err(Error::NotMappable(format!("{r}x{c} table needs at least 2 rows and 2 columns")));
    }
    if counts.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::Config("contingency counts must be finite and non-negative".into()));
    }
    if counts.row_iter().any(|row| row.sum() == 0.0) || counts.column_iter().any(|col| col.sum() == 0.0) {
        return Err(Error::Config("contingency table has an all-zero row or column".into()));
    }
    Ok(())
}

/// Cliques × member units. `Binary` marks membership; `Support` counts the
/// distinct contexts attesting the unit's edges inside the clique. All-zero
/// rows and columns are dropped, and `rows` keeps the original clique ids.
pub fn contingency(cliques: &[Clique], weighting: Weighting) -> Result<ContingencyTable> {
    let mut cols: Vec<LexicalUnit> = cliques.iter().flat_map(|c| c.members.iter().cloned()).collect();
    cols.sort();
    cols.dedup();
    let mut counts = DMatrix::<f64>::zeros(cliques.len(), cols.len());
    for (i, clique) in cliques.iter().enumerate() {
        for (m, unit) in clique.members.iter().enumerate() {
            let j = cols.binary_search(unit).expect("member present in column set");
            counts[(i, j)] = match weighting {
                Weighting::Binary => 1.0,
                Weighting::Support => clique.member_support.get(m).copied().unwrap_or(0) as f64,
            };
        }
    }

    let keep_rows: Vec<usize> = (0..counts.nrows()).filter(|&i| counts.row(i).sum() > 0.0).collect();
    let keep_cols: Vec<usize> = (0..counts.ncols()).filter(|&j| counts.column(j).sum() > 0.0).collect();
    if keep_rows.len() < 2 || keep_cols.len() < 2 {
        return Err(Error::NotMappable(format!(
            "{} clique(s) over {} contexonym(s) after cleaning",
            keep_rows.len(),
            keep_cols.len()
        )));
    }
    let counts = DMatrix::from_fn(keep_rows.len(), keep_cols.len(), |i, j| counts[(keep_rows[i], keep_cols[j])]);
    Ok(ContingencyTable {
        rows: keep_rows.iter().map(|&i| cliques[i].clique_id).collect(),
        cols: keep_cols.into_iter().map(|j| cols[j].clone()).collect(),
        counts,
        weighting,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaResult {
    /// R × K principal coordinates of the rows.
    pub row_coords: DMatrix<f64>,
    /// C × K principal coordinates of the columns.
    pub col_coords: DMatrix<f64>,
    /// Descending, length K.
    pub singular_values: Vec<f64>,
    pub inertia_total: f64,
    pub inertia_share: Vec<f64>,
    pub row_masses: Vec<f64>,
    pub col_masses: Vec<f64>,
}

impl CaResult {
    pub fn n_axes(&self) -> usize {
        self.singular_values.len()
    }
}

fn lexicographic_rows(m: &DMatrix<f64>, a: usize, b: usize) -> Ordering {
    m.row(a)
        .iter()
        .zip(m.row(b).iter())
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

pub fn correspondence_analysis(table: &ContingencyTable) -> Result<CaResult> {
    let counts = &table.counts;
    validate_counts(counts)?;
    let (nr, nc) = counts.shape();

    let mut order: Vec<usize> = (0..nr).collect();
    order.sort_by(|&a, &b| lexicographic_rows(counts, a, b).then(a.cmp(&b)));
    let canon = DMatrix::from_fn(nr, nc, |i, j| counts[(order[i], j)]);

    let total: f64 = canon.iter().sum();
    let p = &canon / total;
    let r: Vec<f64> = (0..nr).map(|i| p.row(i).sum()).collect();
    let c: Vec<f64> = (0..nc).map(|j| p.column(j).sum()).collect();
    let s = faer::Mat::<f64>::from_fn(nr, nc, |i, j| (p[(i, j)] - r[i] * c[j]) / (r[i] * c[j]).sqrt());

    let svd = s.thin_svd().map_err(|_| Error::Numerical { rows: nr, cols: nc })?;
    let (u, v) = (svd.U(), svd.V());
    let sv: Vec<f64> = (0..nr.min(nc)).map(|a| svd.S()[a]).collect();
    let mut idx: Vec<usize> = (0..sv.len()).collect();
    idx.sort_by(|&a, &b| sv[b].total_cmp(&sv[a]).then(a.cmp(&b)));

    let k = nr.min(nc) - 1;
    let sigma_max = sv[idx[0]];
    let mut singular_values = Vec::with_capacity(k);
    let mut row_canon = DMatrix::<f64>::zeros(nr, k);
    let mut col_coords = DMatrix::<f64>::zeros(nc, k);
    for (axis, &src) in idx.iter().take(k).enumerate() {
        let sigma = sv[src];
        if sigma.is_nan() || sigma <= NULL_FACTOR_TOLERANCE * sigma_max {
            singular_values.push(0.0);
            continue;
        }
        let mut lead = 0;
        for i in 1..nr {
            if u[(i, src)].abs() > u[(lead, src)].abs() {
                lead = i;
            }
        }
        let sign = if u[(lead, src)] < 0.0 { -1.0 } else { 1.0 };
        for i in 0..nr {
            row_canon[(i, axis)] = sign * sigma * u[(i, src)] / r[i].sqrt();
        }
        for j in 0..nc {
            col_coords[(j, axis)] = sign * sigma * v[(j, src)] / c[j].sqrt();
        }
        singular_values.push(sigma);
    }

    // Identical rows are equal up to rounding; give them the first copy's
    // coordinates so their order cannot leak into the result.
    for i in 1..nr {
        if canon.row(i) == canon.row(i - 1) {
            let prev = row_canon.row(i - 1).into_owned();
            row_canon.set_row(i, &prev);
        }
    }

    let mut row_coords = DMatrix::<f64>::zeros(nr, k);
    let mut row_masses = vec![0.0; nr];
    for (canon_i, &orig_i) in order.iter().enumerate() {
        row_coords.set_row(orig_i, &row_canon.row(canon_i));
        row_masses[orig_i] = r[canon_i];
    }

    let inertia_total: f64 = singular_values.iter().map(|s| s * s).sum();
    let inertia_share = singular_values
        .iter()
        .map(|s| if inertia_total > 0.0 { s * s / inertia_total } else { 0.0 })
        .collect();

    Ok(CaResult {
        row_coords,
        col_coords,
        singular_values,
        inertia_total,
        inertia_share,
        row_masses,
        col_masses: c,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Projection {
    /// 1-based axes.
    pub axis_pair: (usize, usize),
    pub points: Vec<[f64; 2]>,
    pub labels: Vec<[f64; 2]>,
}

/// Picks two 1-based axes. Axes beyond the last one read as zeros, so a
/// one-axis map can still be drawn on a plane.
pub fn project(res: &CaResult, k1: usize, k2: usize) -> Result<Projection> {
    if k1 == 0 || k2 == 0 {
        return Err(Error::Config("axes are numbered from 1".into()));
    }
    if k1 == k2 {
        return Err(Error::Config(format!("axes must differ, got {k1} twice")));
    }
    let k = res.n_axes();
    let pick = |m: &DMatrix<f64>, i: usize, axis: usize| if axis <= k { m[(i, axis - 1)] } else { 0.0 };
    Ok(Projection {
        axis_pair: (k1, k2),
        points: (0..res.row_coords.nrows())
            .map(|i| [pick(&res.row_coords, i, k1), pick(&res.row_coords, i, k2)])
            .collect(),
        labels: (0..res.col_coords.nrows())
            .map(|j| [pick(&res.col_coords, j, k1), pick(&res.col_coords, j, k2)])
            .collect(),
    })
}
