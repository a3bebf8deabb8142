//! Planar polygon predicates shared by boundary clipping and hex retention.
//!
//! Containment uses the even-odd ray-casting rule with on-edge points
//! counted inside, over all rings (holes flip parity naturally).

/// Signed shoelace area of a closed ring (last point repeats the first).
pub fn ring_signed_area(ring: &[(f64, f64)]) -> f64 {
    let mut acc = 0.0;
    for w in ring.windows(2) {
        let (x0, y0) = w[0];
        let (x1, y1) = w[1];
        acc += x0 * y1 - x1 * y0;
    }
    acc / 2.0
}

/// True when `p` lies on the closed segment [a, b].
fn on_segment(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> bool {
    let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
    if cross != 0.0 {
        return false;
    }
    p.0 >= a.0.min(b.0) && p.0 <= a.0.max(b.0) && p.1 >= a.1.min(b.1) && p.1 <= a.1.max(b.1)
}

/// Even-odd containment for a single closed ring; on-edge counts as inside.
pub fn point_in_ring(p: (f64, f64), ring: &[(f64, f64)]) -> bool {
    match ring_crossings(p, ring) {
        RingPosition::OnEdge => true,
        RingPosition::Crossings(c) => c % 2 == 1,
    }
}

enum RingPosition {
    OnEdge,
    Crossings(usize),
}

fn ring_crossings(p: (f64, f64), ring: &[(f64, f64)]) -> RingPosition {
    let mut crossings = 0usize;
    for w in ring.windows(2) {
        let a = w[0];
        let b = w[1];
        if on_segment(p, a, b) {
            return RingPosition::OnEdge;
        }
        // Half-open rule on y so a ray through a shared vertex counts once.
        if (a.1 > p.1) != (b.1 > p.1) {
            let t = (p.1 - a.1) / (b.1 - a.1);
            let x_int = a.0 + t * (b.0 - a.0);
            if p.0 < x_int {
                crossings += 1;
            }
        }
    }
    RingPosition::Crossings(crossings)
}

/// Even-odd containment over several rings (exterior plus holes).
/// A point on any ring edge is inside; otherwise total crossing parity decides.
pub fn point_in_rings(p: (f64, f64), rings: &[Vec<(f64, f64)>]) -> bool {
    let mut crossings = 0usize;
    for ring in rings {
        match ring_crossings(p, ring) {
            RingPosition::OnEdge => return true,
            RingPosition::Crossings(c) => crossings += c,
        }
    }
    crossings % 2 == 1
}

fn orient(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> f64 {
    (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)
}

fn segments_properly_intersect(a: (f64, f64), b: (f64, f64), c: (f64, f64), d: (f64, f64)) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

/// Checks a closed ring for self-intersection between non-adjacent edges.
/// Returns the index of the first offending edge, if any.
pub fn ring_self_intersection(ring: &[(f64, f64)]) -> Option<usize> {
    // Edges i = 0..n-1 connect ring[i] -> ring[i+1]; the last edge closes the ring.
    let n = ring.len() - 1;
    for i in 0..n {
        for j in (i + 1)..n {
            // Skip adjacent edges (they share a vertex); edge 0 and edge n-1
            // are adjacent through the closing vertex.
            if j == i + 1 || (i == 0 && j == n - 1) {
                continue;
            }
            if segments_properly_intersect(ring[i], ring[i + 1], ring[j], ring[j + 1]) {
                return Some(i);
            }
        }
    }
    None
}
