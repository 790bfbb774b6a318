//! Zero-level extraction on a rectangular grid of samples.
//!
//! Sign changes along cell edges are located by linear interpolation and then
//! tightened with a few Illinois (modified regula falsi) steps on the same
//! edge. Nodes whose sample is exactly zero are emitted as points themselves.

const NONE: usize = usize::MAX;

pub(crate) struct Curve {
    pub points: Vec<(f64, f64)>,
    pub segments: Vec<(usize, usize)>,
}

/// `values[i * ny + j]` samples the field at `coord(i, j)`; NaN marks a
/// masked node, and edges touching one are skipped. `exact` evaluates the
/// field anywhere and is used for refinement.
pub(crate) fn zero_curve(
    nx: usize,
    ny: usize,
    values: &[f64],
    coord: impl Fn(usize, usize) -> (f64, f64),
    exact: impl Fn(f64, f64) -> Option<f64>,
) -> Curve {
    debug_assert_eq!(values.len(), nx * ny);
    let mut points = Vec::new();
    let mut node_pt = vec![NONE; nx * ny];
    for (idx, &v) in values.iter().enumerate() {
        if v == 0.0 {
            node_pt[idx] = points.len();
            points.push(coord(idx / ny, idx % ny));
        }
    }

    // crossing point index per edge; horizontal edges go (i,j)→(i+1,j)
    let mut h_edge = vec![NONE; nx * ny];
    let mut v_edge = vec![NONE; nx * ny];
    let crossing = |a: (usize, usize), b: (usize, usize), points: &mut Vec<(f64, f64)>| {
        let va = values[a.0 * ny + a.1];
        let vb = values[b.0 * ny + b.1];
        if !(va.is_finite() && vb.is_finite()) || va * vb >= 0.0 {
            return NONE;
        }
        let pa = coord(a.0, a.1);
        let pb = coord(b.0, b.1);
        let s = refine(va, vb, |s| exact(pa.0 + s * (pb.0 - pa.0), pa.1 + s * (pb.1 - pa.1)));
        points.push((pa.0 + s * (pb.0 - pa.0), pa.1 + s * (pb.1 - pa.1)));
        points.len() - 1
    };
    for i in 0..nx {
        for j in 0..ny {
            if i + 1 < nx {
                h_edge[i * ny + j] = crossing((i, j), (i + 1, j), &mut points);
            }
            if j + 1 < ny {
                v_edge[i * ny + j] = crossing((i, j), (i, j + 1), &mut points);
            }
        }
    }

    let mut segments = Vec::new();
    let mut ring = Vec::with_capacity(8);
    for i in 0..nx.saturating_sub(1) {
        for j in 0..ny.saturating_sub(1) {
            ring.clear();
            let cyc = [
                node_pt[i * ny + j],
                h_edge[i * ny + j],
                node_pt[(i + 1) * ny + j],
                v_edge[(i + 1) * ny + j],
                node_pt[(i + 1) * ny + j + 1],
                h_edge[i * ny + j + 1],
                node_pt[i * ny + j + 1],
                v_edge[i * ny + j],
            ];
            ring.extend(cyc.into_iter().filter(|&p| p != NONE));
            match ring.len() {
                0 | 1 => {}
                4 => {
                    segments.push((ring[0], ring[1]));
                    segments.push((ring[2], ring[3]));
                }
                _ => segments.extend(ring.windows(2).map(|w| (w[0], w[1]))),
            }
        }
    }
    Curve { points, segments }
}

/// Root of a bracketed edge, as a fraction of the edge from `a` to `b`.
fn refine(va: f64, vb: f64, f: impl Fn(f64) -> Option<f64>) -> f64 {
    let (mut s0, mut s1, mut f0, mut f1) = (0.0, 1.0, va, vb);
    let mut s = f0 / (f0 - f1);
    let scale = va.abs().max(vb.abs());
    let mut side = 0i8;
    for _ in 0..12 {
        let Some(fs) = f(s) else { break };
        if !fs.is_finite() || fs.abs() <= 1e-15 * scale {
            break;
        }
        if (fs > 0.0) == (f0 > 0.0) {
            s0 = s;
            f0 = fs;
            if side == -1 {
                f1 *= 0.5;
            }
            side = -1;
        } else {
            s1 = s;
            f1 = fs;
            if side == 1 {
                f0 *= 0.5;
            }
            side = 1;
        }
        s = s0 + f0 / (f0 - f1) * (s1 - s0);
    }
    s.clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(nx: usize, ny: usize, h: f64, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        let mut v = Vec::with_capacity(nx * ny);
        for i in 0..nx {
            for j in 0..ny {
                v.push(f(-1.0 + i as f64 * h, -1.0 + j as f64 * h));
            }
        }
        v
    }

    #[test]
    fn circle_points_lie_on_circle() {
        let h = 0.05;
        let n = 41;
        let f = |x: f64, y: f64| x * x + y * y - 0.49;
        let values = sample(n, n, h, f);
        let c = zero_curve(n, n, &values, |i, j| (-1.0 + i as f64 * h, -1.0 + j as f64 * h), |x, y| Some(f(x, y)));
        assert!(!c.points.is_empty());
        for &(x, y) in &c.points {
            assert!((x.hypot(y) - 0.7).abs() < 1e-10);
        }
        // closed curve: every point is shared by two segments
        let mut degree = vec![0; c.points.len()];
        for &(a, b) in &c.segments {
            degree[a] += 1;
            degree[b] += 1;
        }
        assert!(degree.iter().all(|&d| d == 2));
    }

    #[test]
    fn exact_zero_nodes_are_emitted() {
        let h = 0.5;
        let values = sample(5, 5, h, |x, y| x * x + y * y);
        let c = zero_curve(5, 5, &values, |i, j| (-1.0 + i as f64 * h, -1.0 + j as f64 * h), |_, _| None);
        assert_eq!(c.points, vec![(0.0, 0.0)]);
    }

    #[test]
    fn masked_edges_are_skipped() {
        let h = 0.5;
        let mut values = sample(5, 5, h, |x, _| x - 0.25);
        for j in 0..5 {
            values[2 * 5 + j] = f64::NAN;
        }
        let c = zero_curve(5, 5, &values, |i, j| (-1.0 + i as f64 * h, -1.0 + j as f64 * h), |_, _| None);
        assert!(c.points.is_empty());
    }
}
