//! Natural cubic spline interpolation with analytic derivatives and exact
//! per-segment extrema (needed to bound sampled mirror trajectories).

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct CubicSpline {
    ts: Vec<f64>,
    ys: Vec<f64>,
    /// second derivatives at the knots, natural end conditions (m[0] = m[n-1] = 0)
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn natural(ts: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        let n = ts.len();
        if n < 2 || ys.len() != n {
            return Err(Error::InvalidTrajectory(format!(
                "spline needs >= 2 knots with matching values, got {} / {}",
                n,
                ys.len()
            )));
        }
        for pair in ts.windows(2) {
            if !(pair[1] > pair[0]) {
                return Err(Error::InvalidTrajectory(
                    "spline knots must be strictly increasing".into(),
                ));
            }
        }
        if ts.iter().chain(ys.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidTrajectory("non-finite spline knot".into()));
        }
        let mut m = vec![0.0; n];
        if n > 2 {
            // Thomas solve of the tridiagonal system for interior second derivatives
            let k = n - 2;
            let mut diag = vec![0.0; k];
            let mut upper = vec![0.0; k];
            let mut rhs = vec![0.0; k];
            for i in 0..k {
                let h0 = ts[i + 1] - ts[i];
                let h1 = ts[i + 2] - ts[i + 1];
                diag[i] = (h0 + h1) / 3.0;
                upper[i] = h1 / 6.0;
                rhs[i] = (ys[i + 2] - ys[i + 1]) / h1 - (ys[i + 1] - ys[i]) / h0;
            }
            for i in 1..k {
                let h0 = ts[i + 1] - ts[i];
                let lower = h0 / 6.0;
                let w = lower / diag[i - 1];
                diag[i] -= w * upper[i - 1];
                rhs[i] -= w * rhs[i - 1];
            }
            m[k] = rhs[k - 1] / diag[k - 1];
            for i in (1..k).rev() {
                m[i] = (rhs[i - 1] - upper[i - 1] * m[i + 1]) / diag[i - 1];
            }
        }
        Ok(Self { ts, ys, m })
    }

    pub fn t_first(&self) -> f64 {
        self.ts[0]
    }

    pub fn t_last(&self) -> f64 {
        *self.ts.last().unwrap()
    }

    pub fn y_first(&self) -> f64 {
        self.ys[0]
    }

    pub fn y_last(&self) -> f64 {
        *self.ys.last().unwrap()
    }

    pub fn knots(&self) -> &[f64] {
        &self.ts
    }

    fn segment(&self, t: f64) -> usize {
        match self.ts.binary_search_by(|probe| probe.total_cmp(&t)) {
            Ok(i) => i.min(self.ts.len() - 2),
            Err(i) => i.clamp(1, self.ts.len() - 1) - 1,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let t = t.clamp(self.t_first(), self.t_last());
        let i = self.segment(t);
        let (t0, t1) = (self.ts[i], self.ts[i + 1]);
        let h = t1 - t0;
        let (a, b) = (t1 - t, t - t0);
        self.m[i] * a * a * a / (6.0 * h)
            + self.m[i + 1] * b * b * b / (6.0 * h)
            + (self.ys[i] / h - self.m[i] * h / 6.0) * a
            + (self.ys[i + 1] / h - self.m[i + 1] * h / 6.0) * b
    }

    pub fn deriv1(&self, t: f64) -> f64 {
        if t < self.t_first() || t > self.t_last() {
            return 0.0;
        }
        let i = self.segment(t);
        let (t0, t1) = (self.ts[i], self.ts[i + 1]);
        let h = t1 - t0;
        let (a, b) = (t1 - t, t - t0);
        -self.m[i] * a * a / (2.0 * h) + self.m[i + 1] * b * b / (2.0 * h)
            + (self.ys[i + 1] - self.ys[i]) / h
            - (self.m[i + 1] - self.m[i]) * h / 6.0
    }

    pub fn deriv2(&self, t: f64) -> f64 {
        if t < self.t_first() || t > self.t_last() {
            return 0.0;
        }
        let i = self.segment(t);
        let (t0, t1) = (self.ts[i], self.ts[i + 1]);
        let h = t1 - t0;
        (self.m[i] * (t1 - t) + self.m[i + 1] * (t - t0)) / h
    }

    /// Piecewise-constant third derivative (taken from the segment containing `t`).
    pub fn deriv3(&self, t: f64) -> f64 {
        if t < self.t_first() || t > self.t_last() {
            return 0.0;
        }
        let i = self.segment(t);
        (self.m[i + 1] - self.m[i]) / (self.ts[i + 1] - self.ts[i])
    }

    /// Exact global minimum and maximum of the spline over its knot range.
    pub fn min_max(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut take = |v: f64| {
            lo = lo.min(v);
            hi = hi.max(v);
        };
        for (i, &y) in self.ys.iter().enumerate() {
            take(y);
            if i + 1 == self.ts.len() {
                break;
            }
            // interior extrema of the segment cubic: S'(t) = 0 is a quadratic
            let (t0, t1) = (self.ts[i], self.ts[i + 1]);
            let h = t1 - t0;
            let c2 = (self.m[i + 1] - self.m[i]) / (2.0 * h);
            let c1 = (self.m[i] * t1 - self.m[i + 1] * t0) / h;
            let c0 = -self.m[i] * t1 * t1 / (2.0 * h) + self.m[i + 1] * t0 * t0 / (2.0 * h)
                + (self.ys[i + 1] - self.ys[i]) / h
                - (self.m[i + 1] - self.m[i]) * h / 6.0;
            let roots: Vec<f64> = if c2.abs() < 1e-300 {
                if c1.abs() < 1e-300 { vec![] } else { vec![-c0 / c1] }
            } else {
                let disc = c1 * c1 - 4.0 * c2 * c0;
                if disc < 0.0 {
                    vec![]
                } else {
                    let s = disc.sqrt();
                    vec![(-c1 - s) / (2.0 * c2), (-c1 + s) / (2.0 * c2)]
                }
            };
            for r in roots {
                if r > t0 && r < t1 {
                    take(self.eval(r));
                }
            }
        }
        (lo, hi)
    }

    /// Max |S'(t)| over the knot range: endpoint slopes of each segment plus
    /// the interior extremum of the quadratic S'.
    pub fn max_abs_deriv1(&self) -> f64 {
        let mut best: f64 = 0.0;
        for i in 0..self.ts.len() - 1 {
            let (t0, t1) = (self.ts[i], self.ts[i + 1]);
            best = best.max(self.deriv1(t0).abs()).max(self.deriv1(t1).abs());
            // S'' is linear; S' extremum where S'' = 0
            let denom = self.m[i + 1] - self.m[i];
            if denom.abs() > 1e-300 {
                let tc = (self.m[i + 1] * t0 - self.m[i] * t1) / denom;
                if tc > t0 && tc < t1 {
                    best = best.max(self.deriv1(tc).abs());
                }
            }
        }
        best
    }
}
