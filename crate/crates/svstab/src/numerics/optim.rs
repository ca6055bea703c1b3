//! Derivative-free optimization helpers: 2d Nelder-Mead and a golden-section
//! line search, used for refining spectral-surface maxima.

/// Minimize f over R^2 with Nelder-Mead starting at `x0` with simplex scale
/// `step`. Returns (argmin, min).
pub fn nelder_mead_2d(
    f: &dyn Fn([f64; 2]) -> f64,
    x0: [f64; 2],
    step: [f64; 2],
    ftol: f64,
    max_iter: usize,
) -> ([f64; 2], f64) {
    let mut pts = [
        x0,
        [x0[0] + step[0], x0[1]],
        [x0[0], x0[1] + step[1]],
    ];
    let mut vals = [f(pts[0]), f(pts[1]), f(pts[2])];
    for _ in 0..max_iter {
        // order ascending
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&a, &b| vals[a].partial_cmp(&vals[b]).unwrap());
        let (best, mid, worst) = (idx[0], idx[1], idx[2]);
        if (vals[worst] - vals[best]).abs() < ftol {
            return (pts[best], vals[best]);
        }
        let centroid = [
            0.5 * (pts[best][0] + pts[mid][0]),
            0.5 * (pts[best][1] + pts[mid][1]),
        ];
        let refl = [
            centroid[0] + (centroid[0] - pts[worst][0]),
            centroid[1] + (centroid[1] - pts[worst][1]),
        ];
        let frefl = f(refl);
        if frefl < vals[best] {
            let expand = [
                centroid[0] + 2.0 * (centroid[0] - pts[worst][0]),
                centroid[1] + 2.0 * (centroid[1] - pts[worst][1]),
            ];
            let fexp = f(expand);
            if fexp < frefl {
                pts[worst] = expand;
                vals[worst] = fexp;
            } else {
                pts[worst] = refl;
                vals[worst] = frefl;
            }
        } else if frefl < vals[mid] {
            pts[worst] = refl;
            vals[worst] = frefl;
        } else {
            let contract = [
                centroid[0] + 0.5 * (pts[worst][0] - centroid[0]),
                centroid[1] + 0.5 * (pts[worst][1] - centroid[1]),
            ];
            let fcon = f(contract);
            if fcon < vals[worst] {
                pts[worst] = contract;
                vals[worst] = fcon;
            } else {
                // shrink toward best
                for i in 0..3 {
                    if i != best {
                        pts[i] = [
                            pts[best][0] + 0.5 * (pts[i][0] - pts[best][0]),
                            pts[best][1] + 0.5 * (pts[i][1] - pts[best][1]),
                        ];
                        vals[i] = f(pts[i]);
                    }
                }
            }
        }
    }
    let mut idx = [0usize, 1, 2];
    idx.sort_by(|&a, &b| vals[a].partial_cmp(&vals[b]).unwrap());
    (pts[idx[0]], vals[idx[0]])
}

/// Golden-section minimization on [a, b].
pub fn golden_min(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, xtol: f64) -> (f64, f64) {
    let phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > xtol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}
