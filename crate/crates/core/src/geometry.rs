//! Planar polyline utilities.

/// A proper crossing between polyline segments `i < j` (not adjacent) at
/// parameters `t` on segment `i` and `u` on segment `j`, both in `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentCrossing {
    pub i: usize,
    pub j: usize,
    pub t: f64,
    pub u: f64,
}

fn cross(ax: f64, ay: f64, bx: f64, by: f64) -> f64 {
    ax * by - ay * bx
}

fn segment_intersection(p0: [f64; 2], p1: [f64; 2], q0: [f64; 2], q1: [f64; 2]) -> Option<(f64, f64)> {
    let r = [p1[0] - p0[0], p1[1] - p0[1]];
    let s = [q1[0] - q0[0], q1[1] - q0[1]];
    let denom = cross(r[0], r[1], s[0], s[1]);
    if denom == 0.0 {
        return None;
    }
    let qp = [q0[0] - p0[0], q0[1] - p0[1]];
    let t = cross(qp[0], qp[1], s[0], s[1]) / denom;
    let u = cross(qp[0], qp[1], r[0], r[1]) / denom;
    // Half-open ranges so a crossing through a shared vertex counts once.
    ((0.0..1.0).contains(&t) && (0.0..1.0).contains(&u)).then_some((t, u))
}

/// All crossings of an open polyline with itself, found by a sweep over
/// segments sorted by their lower vertical bound.
pub fn self_crossings(points: &[[f64; 2]]) -> Vec<SegmentCrossing> {
    if points.len() < 4 {
        return Vec::new();
    }
    let n = points.len() - 1;
    let bbox = |k: usize| {
        let (a, b) = (points[k], points[k + 1]);
        (a[0].min(b[0]), a[0].max(b[0]), a[1].min(b[1]), a[1].max(b[1]))
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&p, &q| bbox(p).2.total_cmp(&bbox(q).2).then(p.cmp(&q)));

    let mut out = Vec::new();
    for (pos, &i) in order.iter().enumerate() {
        let bi = bbox(i);
        for &j in &order[pos + 1..] {
            let bj = bbox(j);
            if bj.2 > bi.3 {
                break;
            }
            if i.abs_diff(j) < 2 || bj.1 < bi.0 || bj.0 > bi.1 {
                continue;
            }
            let (lo, hi) = if i < j { (i, j) } else { (j, i) };
            if let Some((t, u)) =
                segment_intersection(points[lo], points[lo + 1], points[hi], points[hi + 1])
            {
                out.push(SegmentCrossing { i: lo, j: hi, t, u });
            }
        }
    }
    out.sort_by(|p, q| (p.i, p.j).cmp(&(q.i, q.j)));
    out
}
