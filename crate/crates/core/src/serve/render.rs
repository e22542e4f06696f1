//! Static renderings of a projected map: an SVG scatter and a coordinate
//! table.

use std::fmt::Write;

use crate::atlas::SemanticMap;
use crate::ca::Projection;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const MARGIN: f64 = 60.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

/// One line per clique point then one per contexonym label:
/// `kind  id  label  x  y`.
pub fn coordinates_tsv(map: &SemanticMap, proj: &Projection) -> String {
    let (k1, k2) = proj.axis_pair;
    let mut out = format!("kind\tid\tlabel\taxis{k1}\taxis{k2}\n");
    for (&clique_id, p) in map.rows.iter().zip(&proj.points) {
        let members = map
            .clique(clique_id)
            .map(|c| c.members.iter().map(|u| u.key.as_ref()).collect::<Vec<_>>().join(" "))
            .unwrap_or_default();
        let _ = writeln!(out, "clique\t{clique_id}\t{members}\t{}\t{}", p[0], p[1]);
    }
    for (j, (unit, p)) in map.columns.iter().zip(&proj.labels).enumerate() {
        let _ = writeln!(out, "contexonym\t{j}\t{unit}\t{}\t{}", p[0], p[1]);
    }
    out
}

fn escape_xml(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Convex hull by the monotone chain, counter-clockwise, without repeats.
fn convex_hull(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    let mut hull: Vec<[f64; 2]> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &[f64; 2]>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

struct Frame {
    min: [f64; 2],
    scale: f64,
}

impl Frame {
    fn fit(points: impl Iterator<Item = [f64; 2]>) -> Self {
        let mut min = [f64::INFINITY; 2];
        let mut max = [f64::NEG_INFINITY; 2];
        for p in points {
            for d in 0..2 {
                min[d] = min[d].min(p[d]);
                max[d] = max[d].max(p[d]);
            }
        }
        if !min[0].is_finite() {
            min = [-1.0, -1.0];
            max = [1.0, 1.0];
        }
        let span = (max[0] - min[0]).max(max[1] - min[1]).max(1e-9);
        let scale = ((WIDTH - 2.0 * MARGIN) / span).min((HEIGHT - 2.0 * MARGIN) / span);
        Frame { min, scale }
    }

    fn place(&self, p: [f64; 2]) -> (f64, f64) {
        (
            MARGIN + (p[0] - self.min[0]) * self.scale,
            HEIGHT - MARGIN - (p[1] - self.min[1]) * self.scale,
        )
    }
}

/// Cliques as coloured points, contexonyms as grey labels, one hull per
/// cluster.
pub fn map_svg(map: &SemanticMap, proj: &Projection) -> String {
    let frame = Frame::fit(proj.points.iter().chain(&proj.labels).copied());
    let (k1, k2) = proj.axis_pair;
    let share = |k: usize| map.geometry.inertia_share.get(k - 1).copied().unwrap_or(0.0) * 100.0;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{MARGIN}" y="30" font-size="18">{}</text>"#,
        escape_xml(&map.headword.to_string())
    );
    let _ = writeln!(
        svg,
        r#"<text x="{MARGIN}" y="{}" font-size="12">axis {k1} ({:.1}%) / axis {k2} ({:.1}%)</text>"#,
        HEIGHT - 15.0,
        share(k1),
        share(k2)
    );
    let (ox, oy) = frame.place([0.0, 0.0]);
    let _ = writeln!(
        svg,
        r##"<g stroke="#ccc"><line x1="0" y1="{oy:.2}" x2="{WIDTH}" y2="{oy:.2}"/><line x1="{ox:.2}" y1="0" x2="{ox:.2}" y2="{HEIGHT}"/></g>"##
    );

    let point_of = |clique_id: usize| map.row_of(clique_id).map(|r| proj.points[r]);
    for cluster in &map.clusters {
        let color = PALETTE[cluster.cluster_id % PALETTE.len()];
        let pts: Vec<[f64; 2]> = cluster.clique_ids.iter().filter_map(|&c| point_of(c)).collect();
        let hull = convex_hull(&pts);
        if hull.len() >= 2 {
            let path: Vec<String> = hull
                .iter()
                .map(|&p| {
                    let (x, y) = frame.place(p);
                    format!("{x:.2},{y:.2}")
                })
                .collect();
            let _ = writeln!(
                svg,
                r#"<polygon points="{}" fill="{color}" fill-opacity="0.12" stroke="{color}" stroke-width="8" stroke-opacity="0.25" stroke-linejoin="round"/>"#,
                path.join(" ")
            );
        }
    }

    for (j, (unit, p)) in map.columns.iter().zip(&proj.labels).enumerate() {
        let (x, y) = frame.place(*p);
        let _ = writeln!(
            svg,
            r##"<text class="label" data-col="{j}" x="{x:.2}" y="{y:.2}" font-size="11" fill="#555">{}</text>"##,
            escape_xml(&unit.key)
        );
    }

    for (&clique_id, p) in map.rows.iter().zip(&proj.points) {
        let cluster = map.clusters.iter().find(|c| c.clique_ids.contains(&clique_id));
        let color = PALETTE[cluster.map_or(0, |c| c.cluster_id) % PALETTE.len()];
        let (x, y) = frame.place(*p);
        let _ = writeln!(
            svg,
            r#"<circle class="clique" data-clique="{clique_id}" cx="{x:.2}" cy="{y:.2}" r="4" fill="{color}"/>"#
        );
    }
    svg.push_str("</svg>\n");
    svg
}
