//! Discretized observer trajectories `q(t)`.
//!
//! A closed trajectory returns to its starting point on the torus: the last
//! sample equals the first up to a lattice translation in `2πℤ³`. The last
//! sample is then the periodic image of the first and is skipped by the
//! quadrature.

use std::f64::consts::PI;
use std::path::Path;

use crate::error::{Error, Result};

const CLOSURE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    points: Vec<[f64; 3]>,
    closed: bool,
}

impl Trajectory {
    pub fn new(samples: Vec<(f64, [f64; 3])>, closed: bool) -> Result<Self> {
        if samples.len() < 3 {
            return Err(Error::DegenerateTrajectory(format!(
                "{} samples, at least 3 required",
                samples.len()
            )));
        }
        let (times, points): (Vec<_>, Vec<_>) = samples.into_iter().unzip();
        if let Some(w) = times.windows(2).find(|w| !(w[1] > w[0])) {
            return Err(Error::DegenerateTrajectory(format!(
                "times not strictly increasing at t = {}",
                w[0]
            )));
        }
        let traj = Trajectory {
            times,
            points,
            closed,
        };
        if closed {
            let shift = traj.lattice_shift();
            let off = shift
                .iter()
                .map(|s| (s / (2.0 * PI) - (s / (2.0 * PI)).round()).abs() * 2.0 * PI)
                .fold(0.0, f64::max);
            if off > CLOSURE_TOL {
                return Err(Error::DegenerateTrajectory(format!(
                    "closed trajectory does not return to its start (mismatch {off:e})"
                )));
            }
        }
        Ok(traj)
    }

    /// Samples `t_i = 2π i / n`, `i = 0..=n`, of a curve that closes on T³.
    pub fn closed_from_fn(n: usize, q: impl Fn(f64) -> [f64; 3]) -> Result<Self> {
        let samples = (0..=n)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / n as f64;
                (t, q(t))
            })
            .collect();
        Self::new(samples, true)
    }

    /// Samples `t_i = t0 + (t1 - t0) i / n`, `i = 0..=n`, of an open curve.
    pub fn open_from_fn(n: usize, t0: f64, t1: f64, q: impl Fn(f64) -> [f64; 3]) -> Result<Self> {
        let samples = (0..=n)
            .map(|i| {
                let t = t0 + (t1 - t0) * i as f64 / n as f64;
                (t, q(t))
            })
            .collect();
        Self::new(samples, false)
    }

    /// The straight loop `q(t) = origin + winding · t`, `t ∈ [0, 2π]`.
    pub fn winding_line(n: usize, origin: [f64; 3], winding: [i32; 3]) -> Result<Self> {
        Self::closed_from_fn(n, |t| {
            [
                origin[0] + f64::from(winding[0]) * t,
                origin[1] + f64::from(winding[1]) * t,
                origin[2] + f64::from(winding[2]) * t,
            ]
        })
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn samples(&self) -> impl Iterator<Item = (f64, [f64; 3])> + '_ {
        self.times.iter().copied().zip(self.points.iter().copied())
    }

    fn lattice_shift(&self) -> [f64; 3] {
        let first = self.points[0];
        let last = self.points[self.points.len() - 1];
        [last[0] - first[0], last[1] - first[1], last[2] - first[2]]
    }

    /// Quadrature nodes: `(weight, q_i, q̇_i)`.
    ///
    /// Velocities come from three-point centered differences (second order
    /// on nonuniform grids); closed curves wrap periodically, open curves
    /// use one-sided three-point stencils at the ends. Weights are the
    /// trapezoid rule, periodic when closed.
    pub fn quadrature_nodes(&self) -> Vec<(f64, [f64; 3], [f64; 3])> {
        let n = self.times.len();
        let mut out = Vec::with_capacity(n);
        if self.closed {
            let period = self.times[n - 1] - self.times[0];
            let shift = self.lattice_shift();
            let m = n - 1;
            for i in 0..m {
                let (tp, qp) = if i == 0 {
                    let q = self.points[m - 1];
                    (
                        self.times[m - 1] - period,
                        [q[0] - shift[0], q[1] - shift[1], q[2] - shift[2]],
                    )
                } else {
                    (self.times[i - 1], self.points[i - 1])
                };
                let (tn, qn) = (self.times[i + 1], self.points[i + 1]);
                let t = self.times[i];
                let v = three_point_derivative([tp, t, tn], [qp, self.points[i], qn], 1);
                let w = 0.5 * (tn - tp);
                out.push((w, self.points[i], v));
            }
        } else {
            for i in 0..n {
                let (idx, at) = if i == 0 {
                    ([0, 1, 2], 0)
                } else if i == n - 1 {
                    ([n - 3, n - 2, n - 1], 2)
                } else {
                    ([i - 1, i, i + 1], 1)
                };
                let ts = idx.map(|k| self.times[k]);
                let qs = idx.map(|k| self.points[k]);
                let v = three_point_derivative(ts, qs, at);
                let w = if i == 0 {
                    0.5 * (self.times[1] - self.times[0])
                } else if i == n - 1 {
                    0.5 * (self.times[n - 1] - self.times[n - 2])
                } else {
                    0.5 * (self.times[i + 1] - self.times[i - 1])
                };
                out.push((w, self.points[i], v));
            }
        }
        out
    }

    /// Reads rows `t,q1,q2,q3` (header optional).
    pub fn from_csv_reader<R: std::io::Read>(reader: R, closed: bool) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let mut samples = Vec::new();
        for (row, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if rec.len() != 4 {
                return Err(Error::Config(format!(
                    "trajectory row {} has {} fields, expected t,q1,q2,q3",
                    row + 1,
                    rec.len()
                )));
            }
            let parsed: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
            match parsed {
                Ok(v) => samples.push((v[0], [v[1], v[2], v[3]])),
                Err(_) if row == 0 => continue,
                Err(e) => {
                    return Err(Error::Config(format!("trajectory row {}: {e}", row + 1)));
                }
            }
        }
        Self::new(samples, closed)
    }

    pub fn from_csv_path(path: &Path, closed: bool) -> Result<Self> {
        Self::from_csv_reader(std::fs::File::open(path)?, closed)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,q1,q2,q3\n");
        for (t, q) in self.samples() {
            s.push_str(&format!("{t:e},{:e},{:e},{:e}\n", q[0], q[1], q[2]));
        }
        s
    }
}

/// Derivative at node `at` of the quadratic through three points.
fn three_point_derivative(t: [f64; 3], q: [[f64; 3]; 3], at: usize) -> [f64; 3] {
    let x = t[at];
    // d/dx of Lagrange basis polynomials evaluated at x
    let l0 = ((x - t[1]) + (x - t[2])) / ((t[0] - t[1]) * (t[0] - t[2]));
    let l1 = ((x - t[0]) + (x - t[2])) / ((t[1] - t[0]) * (t[1] - t[2]));
    let l2 = ((x - t[0]) + (x - t[1])) / ((t[2] - t[0]) * (t[2] - t[1]));
    let mut v = [0.0; 3];
    for (j, vj) in v.iter_mut().enumerate() {
        *vj = l0 * q[0][j] + l1 * q[1][j] + l2 * q[2][j];
    }
    v
}
