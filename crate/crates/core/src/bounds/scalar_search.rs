//! One-dimensional maximizers used for the chord constants.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

pub const REFINE_GRID_POINTS: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalarMax {
    pub x: f64,
    pub value: f64,
}

impl ScalarMax {
    fn better(self, other: ScalarMax) -> ScalarMax {
        if other.value > self.value {
            other
        } else {
            self
        }
    }
}

/// Golden-section search for the maximum of a unimodal `h` on `[lo, hi]`.
/// The endpoints are compared against the interior estimate, so a maximum
/// sitting on the boundary is returned exactly.
pub fn golden_section_max(h: impl Fn(f64) -> f64, lo: f64, hi: f64) -> ScalarMax {
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut hc = h(c);
    let mut hd = h(d);
    for _ in 0..200 {
        if (b - a).abs() <= 1e-13 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if hc >= hd {
            b = d;
            d = c;
            hd = hc;
            c = b - INV_PHI * (b - a);
            hc = h(c);
        } else {
            a = c;
            c = d;
            hc = hd;
            d = a + INV_PHI * (b - a);
            hd = h(d);
        }
    }
    let mid = 0.5 * (a + b);
    [
        ScalarMax { x: c, value: hc },
        ScalarMax { x: d, value: hd },
        ScalarMax { x: mid, value: h(mid) },
        ScalarMax { x: lo, value: h(lo) },
        ScalarMax { x: hi, value: h(hi) },
    ]
    .into_iter()
    .reduce(ScalarMax::better)
    .unwrap()
}

/// Best point of a uniform `points`-grid on `[lo, hi]`.
pub fn grid_max(h: impl Fn(f64) -> f64, lo: f64, hi: f64, points: usize) -> (usize, ScalarMax) {
    let step = (hi - lo) / (points - 1) as f64;
    let mut best = (0, ScalarMax { x: lo, value: h(lo) });
    for i in 1..points {
        let x = if i + 1 == points { hi } else { lo + step * i as f64 };
        let v = h(x);
        if v > best.1.value {
            best = (i, ScalarMax { x, value: v });
        }
    }
    best
}

/// Dense grid followed by a parabolic step and a golden-section polish
/// inside the bracket around the best grid point. Makes no unimodality
/// assumption globally.
pub fn grid_refined_max(h: impl Fn(f64) -> f64, lo: f64, hi: f64) -> ScalarMax {
    let points = REFINE_GRID_POINTS + 1;
    let (k, mut best) = grid_max(&h, lo, hi, points);
    let step = (hi - lo) / (points - 1) as f64;
    let left = (lo + step * k.saturating_sub(1) as f64).max(lo);
    let right = (lo + step * (k + 1) as f64).min(hi);
    if k > 0 && k + 1 < points {
        let (x0, x1, x2) = (left, best.x, right);
        let (f0, f1, f2) = (h(x0), best.value, h(x2));
        let denom = (x1 - x0) * (f1 - f2) - (x1 - x2) * (f1 - f0);
        if denom != 0.0 {
            let num = (x1 - x0).powi(2) * (f1 - f2) - (x1 - x2).powi(2) * (f1 - f0);
            let xv = x1 - 0.5 * num / denom;
            if xv > x0 && xv < x2 {
                best = best.better(ScalarMax { x: xv, value: h(xv) });
            }
        }
    }
    if right > left {
        best = best.better(golden_section_max(&h, left, right));
    }
    best
}
