//! Correspondence analysis of a clique × contexonym table.
//!
//! Prints singular values, inertia shares and the first two principal
//! coordinates, then checks that total inertia equals χ²/n.

use nalgebra::DMatrix;
use semantic_atlas::ca::{correspondence_analysis, project, ContingencyTable};

fn main() -> semantic_atlas::Result<()> {
    #[rustfmt::skip]
    let counts = DMatrix::from_row_slice(4, 5, &[
        1.0, 1.0, 1.0, 0.0, 0.0,
        1.0, 1.0, 0.0, 1.0, 0.0,
        0.0, 0.0, 1.0, 1.0, 1.0,
        0.0, 0.0, 0.0, 1.0, 1.0,
    ]);
    let table = ContingencyTable::from_matrix(counts.clone())?;
    let ca = correspondence_analysis(&table)?;

    println!("axes: {}", ca.n_axes());
    for (k, (s, share)) in ca.singular_values.iter().zip(&ca.inertia_share).enumerate() {
        println!("axis {}: sigma {s:.6}, share {:.1}%", k + 1, 100.0 * share);
    }

    let proj = project(&ca, 1, 2)?;
    for (i, p) in proj.points.iter().enumerate() {
        println!("row {i}: ({:+.4}, {:+.4})", p[0], p[1]);
    }
    for (j, p) in proj.labels.iter().enumerate() {
        println!("col {j}: ({:+.4}, {:+.4})", p[0], p[1]);
    }

    let n: f64 = counts.iter().sum();
    let (nr, nc) = counts.shape();
    let mut chi2 = 0.0;
    for i in 0..nr {
        for j in 0..nc {
            let e = counts.row(i).sum() * counts.column(j).sum() / n;
            chi2 += (counts[(i, j)] - e).powi(2) / e;
        }
    }
    println!("total inertia {:.10}, chi2/n {:.10}", ca.inertia_total, chi2 / n);
    Ok(())
}
