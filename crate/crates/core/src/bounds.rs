//! Offline lower bounds for single-resource `F_max` and the lower-bound
//! ratio curves behind the adversaries in [`crate::online::adversary`].

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Cost, Instance, Time};
use crate::online::AdversaryKind;

/// Floating-point slack used when comparing curve values.
pub const CURVE_TOLERANCE: f64 = 1e-9;

fn single_resource_parts(instance: &Instance) -> Result<(Cost, Time)> {
    if instance.s() != 1 {
        return Err(Error::Precondition(format!(
            "lower bounds need a single resource, got s = {}",
            instance.s()
        )));
    }
    Ok((instance.single_order_cost(), instance.total_processing()))
}

/// `min_F (K * ceil(p_sum / F) + F)` over `F in 1..=p_sum`, or 0 when
/// there is no work.
pub fn ceiling_bound(p_sum: Time, k: Cost) -> Cost {
    (1..=p_sum)
        .map(|f| k * ((p_sum + f - 1) / f) + f)
        .min()
        .unwrap_or(0)
}

/// Every solution with maximum flow time `F` needs at least
/// `ceil(p_sum / F)` orders, hence this bound.
pub fn lb_ceiling(instance: &Instance) -> Result<Cost> {
    let (k, p_sum) = single_resource_parts(instance)?;
    Ok(ceiling_bound(p_sum, k))
}

/// `2 sqrt(K p_sum)`, the continuous relaxation of [`lb_ceiling`].
pub fn lb_sqrt(instance: &Instance) -> Result<f64> {
    let (k, p_sum) = single_resource_parts(instance)?;
    Ok(2.0 * ((k as f64) * (p_sum as f64)).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RatioCurvePoint {
    pub k: Cost,
    /// Decision epoch attaining the minimax.
    pub t: Time,
    pub c1: f64,
    pub c2: f64,
    /// `min_t max(c1(t), c2(t))`.
    pub bound: f64,
    /// Large-`K` limit of the bound, where a closed form exists.
    pub limit: Option<f64>,
}

pub fn golden_ratio() -> f64 {
    (5f64.sqrt() + 1.0) / 2.0
}

/// Limit of the weighted bound as `K` grows, for second-job weight `w2`.
pub fn weighted_limit(w2: f64) -> f64 {
    ((4.0 * w2 + 5.0).sqrt() + 2.0 * w2 + 1.0) / (2.0 * (w2 + 1.0))
}

/// Evaluates the adversary's two competing ratios over integer `t >= 0`
/// and returns the minimax point.
///
/// `c1(t)` is the ratio when no further job arrives after the policy
/// serves the first one at `t`; `c2(t)` is the ratio when the adversary
/// follows up at `t + 1`. `c1` grows with `t`, so the sweep stops as soon
/// as `c1` alone reaches the best value seen.
pub fn ratio_curve(kind: AdversaryKind, k: Cost, w2: Option<f64>) -> Result<RatioCurvePoint> {
    if k < 1 {
        return Err(Error::Precondition(format!(
            "K must be at least 1, got {k}"
        )));
    }
    let kf = k as f64;
    let c1 = |t: f64| (kf + t + 1.0) / (kf + 1.0);
    let (c2, limit): (Box<dyn Fn(f64) -> f64>, Option<f64>) = match kind {
        AdversaryKind::SumCj32 => (
            Box::new(move |t| (2.0 * kf + 2.0 * t + 3.0) / (kf + 2.0 * t + 5.0)),
            Some(1.5),
        ),
        AdversaryKind::WeightedGolden => {
            let w = w2.ok_or_else(|| Error::Precondition("the weighted curve needs w2".into()))?;
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::Precondition(format!("w2 must be positive, got {w}")));
            }
            (
                Box::new(move |t| {
                    (2.0 * kf + t + 1.0 + (t + 2.0) * w) / (kf + t + 2.0 + (t + 3.0) * w)
                }),
                Some(weighted_limit(w)),
            )
        }
        AdversaryKind::SumFj32 => (
            Box::new(move |t| (2.0 * kf + t + 2.0) / (2.0 * kf + 2.0).min(kf + t + 2.0)),
            Some(1.5),
        ),
        AdversaryKind::FmaxGeneralGolden => (
            Box::new(move |t| (2.0 * kf + t + 1.0) / (kf + t + 2.0)),
            Some(golden_ratio()),
        ),
        AdversaryKind::FmaxRegular43 => {
            return Err(Error::Precondition(
                "fmax_regular_4_3 has no closed-form curve; run the adversary instead".into(),
            ))
        }
    };

    let mut best = RatioCurvePoint {
        k,
        t: 0,
        c1: c1(0.0),
        c2: c2(0.0),
        bound: c1(0.0).max(c2(0.0)),
        limit,
    };
    let mut t: Time = 1;
    loop {
        let (a, b) = (c1(t as f64), c2(t as f64));
        if a >= best.bound {
            break;
        }
        let v = a.max(b);
        if v < best.bound {
            best = RatioCurvePoint {
                t,
                c1: a,
                c2: b,
                bound: v,
                ..best
            };
        }
        t += 1;
    }
    Ok(best)
}
