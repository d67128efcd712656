use log::warn;
use serde::Serialize;

use crate::curve::Curve;
use crate::error::{Error, Result};
use crate::flow::{Frame, Trajectory};
use crate::scalar::Real;

/// `x_max(t)`, `x_min(t)` of the projected curve with their time derivatives.
#[derive(Debug, Clone, Serialize)]
pub struct ExtremaTrack<S> {
    pub t: Vec<S>,
    pub x_max: Vec<S>,
    pub x_min: Vec<S>,
    pub dx_max: Vec<S>,
    pub dx_min: Vec<S>,
    /// `x_max` non-increasing and `x_min` non-decreasing up to `1e-8 × scale`.
    pub monotone: bool,
    /// Frames whose discrete extremum was not unique.
    pub ambiguous_frames: usize,
}

fn derivative<S: Real>(t: &[S], v: &[S]) -> Vec<S> {
    let m = t.len();
    if m < 2 {
        return vec![S::zero(); m];
    }
    (0..m)
        .map(|j| {
            let (a, b) = if j == 0 {
                (0, 1)
            } else if j + 1 == m {
                (m - 2, m - 1)
            } else {
                (j - 1, j + 1)
            };
            (v[b] - v[a]) / (t[b] - t[a])
        })
        .collect()
}

/// Extremum of `x` over the vertices refined by a parabola through the
/// extremal vertex and its neighbours. `sign = 1` for the max, `-1` for the min.
fn refined_extremum<S: Real>(curve: &Curve<S>, sign: S) -> (S, bool) {
    let n = curve.len();
    let x = |i: usize| sign * curve.point(i)[0];
    let mut arg = 0;
    for i in 1..n {
        if x(i) > x(arg) {
            arg = i;
        }
    }
    let b = x(arg);
    let a = x(curve.prev(arg));
    let c = x(curve.next(arg));
    let scale = curve.max_radius_about(&curve.centroid());
    let tol = scale * S::lit(1e-12);
    let ambiguous = (0..n).any(|i| {
        i != arg && i != curve.prev(arg) && i != curve.next(arg) && x(i) >= b - tol
    });
    let curv = a - S::two() * b + c;
    let peak = if curv < S::zero() {
        b - (c - a) * (c - a) / (S::lit(8.0) * curv)
    } else {
        b
    };
    (sign * peak, ambiguous)
}

impl<S: Real> ExtremaTrack<S> {
    pub fn from_samples(t: Vec<S>, x_max: Vec<S>, x_min: Vec<S>) -> Result<Self> {
        let m = t.len();
        if m < 2 || x_max.len() != m || x_min.len() != m {
            return Err(Error::InvalidParameter("track needs >= 2 samples of equal length".into()));
        }
        if t.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter("track times must increase".into()));
        }
        if let Some(j) = (0..m).find(|&j| !(x_min[j] < S::zero() && x_max[j] > S::zero())) {
            return Err(Error::Domain(format!(
                "origin not inside [x_min, x_max] = [{}, {}] at t = {}",
                x_min[j], x_max[j], t[j]
            )));
        }
        let scale = x_max[0] - x_min[0];
        let tol = scale * S::lit(1e-8);
        let monotone = (1..m).all(|j| x_max[j] <= x_max[j - 1] + tol && x_min[j] >= x_min[j - 1] - tol);
        Ok(Self {
            dx_max: derivative(&t, &x_max),
            dx_min: derivative(&t, &x_min),
            t,
            x_max,
            x_min,
            monotone,
            ambiguous_frames: 0,
        })
    }

    pub fn from_frames(frames: &[Frame<S>]) -> Result<Self> {
        let mut t = Vec::with_capacity(frames.len());
        let mut hi = Vec::with_capacity(frames.len());
        let mut lo = Vec::with_capacity(frames.len());
        let mut ambiguous = 0;
        for f in frames {
            let (a, amb_a) = refined_extremum(&f.curve, S::one());
            let (b, amb_b) = refined_extremum(&f.curve, -S::one());
            if amb_a || amb_b {
                ambiguous += 1;
            }
            t.push(f.t);
            hi.push(a);
            lo.push(b);
        }
        if ambiguous > 0 {
            warn!("{ambiguous} frames have a non-unique discrete x extremum");
        }
        let mut track = Self::from_samples(t, hi, lo)?;
        track.ambiguous_frames = ambiguous;
        Ok(track)
    }

    pub fn t_first(&self) -> S {
        self.t[0]
    }

    pub fn t_last(&self) -> S {
        *self.t.last().unwrap()
    }

    /// Segment index `j` with `t[j] <= t <= t[j+1]` and the weight of `t[j+1]`.
    pub(crate) fn locate(&self, t: S) -> Result<(usize, S)> {
        if t < self.t_first() || t > self.t_last() {
            return Err(Error::Domain(format!(
                "t = {t} outside the track range [{}, {}]",
                self.t_first(),
                self.t_last()
            )));
        }
        let m = self.t.len();
        let j = self.t.partition_point(|&a| a <= t).clamp(1, m - 1) - 1;
        Ok((j, (t - self.t[j]) / (self.t[j + 1] - self.t[j])))
    }

    /// Linearly interpolated `(x_min(t), x_max(t))`.
    pub fn bounds_at(&self, t: S) -> Result<(S, S)> {
        let (j, w) = self.locate(t)?;
        let lerp = |v: &[S]| v[j] + w * (v[j + 1] - v[j]);
        Ok((lerp(&self.x_min), lerp(&self.x_max)))
    }
}

/// Extrema track over every frame of the trajectory before the extinction time.
pub fn build_extrema_track<S: Real>(traj: &Trajectory<S>) -> Result<ExtremaTrack<S>> {
    let t_ext = traj.t_estimate()?;
    let n = traj.frames.iter().take_while(|f| f.t < t_ext).count();
    ExtremaTrack::from_frames(&traj.frames[..n])
}
