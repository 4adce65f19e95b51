//! Strategy fitness: area under the efficiency curve.
//!
//! A strategy's curve maps mean effective reviewers (x) to mean review time
//! (y), one point per batch size. Fitness is the area under the piecewise
//! linear interpolant of those points over a fixed x window, so it rewards
//! being fast across the whole resource range rather than at one batch size.
//! Lower is better. Strategies that make invalid decisions are charged a
//! penalty per failing batch size instead.

use serde::Serialize;
use thiserror::Error;

use crate::sim::{efficiency_curve, EfficiencyCurve, EfficiencyPoint, SimulationConfig, ThreadModel};
use crate::strategy::Strategy;

/// Parameters of the fitness functional.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitnessConfig {
    pub min_batch: u32,
    pub max_batch: u32,
    /// Lower edge of the integration window (effective reviewers).
    pub min_effective: f64,
    /// Upper edge of the integration window.
    pub max_effective: f64,
    /// Simulation runs per batch size; takes precedence over the value in
    /// [`SimulationConfig`] during evaluation.
    pub runs_per_batch: u32,
    /// Penalty charged per invalid batch size. Must dominate any legitimate
    /// AUC so that penalized strategies always rank below valid ones.
    pub critical_fitness: f64,
}

impl Default for FitnessConfig {
    fn default() -> Self {
        Self {
            min_batch: 2,
            max_batch: 20,
            min_effective: 7.0,
            max_effective: 15.0,
            runs_per_batch: 10_000,
            critical_fitness: 1.0e6,
        }
    }
}

/// Scalar fitness of one strategy. Lower is better.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitnessValue {
    pub value: f64,
    pub penalized: bool,
    pub invalid_batch_count: u32,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FitnessError {
    #[error("efficiency curve has no points")]
    EmptyCurve,
}

/// Area under the piecewise-linear interpolant of `points` over `[lo, hi]`.
///
/// Points are sorted by x; exact duplicate x values are merged by averaging
/// their y values. Outside the data range the interpolant extends flat at the
/// nearest point's y. Trapezoids are exact for a piecewise-linear function,
/// so there is no quadrature error beyond floating point.
pub fn auc(points: &[EfficiencyPoint], lo: f64, hi: f64) -> Result<f64, FitnessError> {
    assert!(lo < hi, "integration window must be non-empty");
    let merged = sorted_merged(points)?;
    let first = merged[0];
    let last = *merged.last().expect("merged set is non-empty");
    let mut area = 0.0;
    // Flat extensions outside the data range.
    if lo < first.0 {
        area += (hi.min(first.0) - lo) * first.1;
    }
    if hi > last.0 {
        area += (hi - lo.max(last.0)) * last.1;
    }
    // Interior segments, clipped to the window.
    for pair in merged.windows(2) {
        let (x0, y0) = pair[0];
        let (x1, y1) = pair[1];
        let seg_lo = lo.max(x0);
        let seg_hi = hi.min(x1);
        if seg_lo < seg_hi {
            let y_at = |x: f64| y0 + (y1 - y0) * (x - x0) / (x1 - x0);
            area += (seg_hi - seg_lo) * (y_at(seg_lo) + y_at(seg_hi)) / 2.0;
        }
    }
    Ok(area)
}

/// Interpolated review time of a curve at `x` effective reviewers, using the
/// same sort/merge/clamp rules as [`auc`].
pub fn interpolate_at(points: &[EfficiencyPoint], x: f64) -> Result<f64, FitnessError> {
    let merged = sorted_merged(points)?;
    let last = *merged.last().expect("merged set is non-empty");
    if x <= merged[0].0 {
        return Ok(merged[0].1);
    }
    if x >= last.0 {
        return Ok(last.1);
    }
    for pair in merged.windows(2) {
        let (x0, y0) = pair[0];
        let (x1, y1) = pair[1];
        if x0 <= x && x <= x1 {
            return Ok(y0 + (y1 - y0) * (x - x0) / (x1 - x0));
        }
    }
    unreachable!("x is inside the data range")
}

/// Curve points as (x, y), sorted by x with exact-duplicate x merged by
/// averaging y.
fn sorted_merged(points: &[EfficiencyPoint]) -> Result<Vec<(f64, f64)>, FitnessError> {
    if points.is_empty() {
        return Err(FitnessError::EmptyCurve);
    }
    let mut xy: Vec<(f64, f64)> = points
        .iter()
        .map(|p| (p.mean_effective_reviewers, p.mean_review_time))
        .collect();
    xy.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(xy.len());
    let mut i = 0;
    while i < xy.len() {
        let x = xy[i].0;
        let mut sum = 0.0;
        let mut n = 0u32;
        while i < xy.len() && xy[i].0 == x {
            sum += xy[i].1;
            n += 1;
            i += 1;
        }
        merged.push((x, sum / f64::from(n)));
    }
    Ok(merged)
}

/// Evaluate a strategy, returning both the fitness and the curve it was
/// computed from.
///
/// Any batch size flagged invalid switches the result to the penalty branch:
/// `invalid_batch_count * critical_fitness`, with no AUC contribution.
pub fn evaluate_with_curve<M, S>(
    strategy: &S,
    model: &M,
    cfg: &FitnessConfig,
    sim_cfg: &SimulationConfig,
) -> (FitnessValue, EfficiencyCurve)
where
    M: ThreadModel + ?Sized,
    S: Strategy + ?Sized,
{
    let run_cfg = SimulationConfig {
        runs_per_batch: cfg.runs_per_batch,
        ..*sim_cfg
    };
    let curve = efficiency_curve(strategy, model, &run_cfg, cfg.min_batch, cfg.max_batch);
    let invalid = curve.invalid_batches.len() as u32;
    let fitness = if invalid > 0 {
        FitnessValue {
            value: f64::from(invalid) * cfg.critical_fitness,
            penalized: true,
            invalid_batch_count: invalid,
        }
    } else {
        let value = auc(&curve.points, cfg.min_effective, cfg.max_effective)
            .expect("a completed curve has a point per batch size");
        FitnessValue {
            value,
            penalized: false,
            invalid_batch_count: 0,
        }
    };
    (fitness, curve)
}

/// Evaluate a strategy. See [`evaluate_with_curve`].
pub fn evaluate<M, S>(
    strategy: &S,
    model: &M,
    cfg: &FitnessConfig,
    sim_cfg: &SimulationConfig,
) -> FitnessValue
where
    M: ThreadModel + ?Sized,
    S: Strategy + ?Sized,
{
    evaluate_with_curve(strategy, model, cfg, sim_cfg).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::empirical::OutcomeModel;
    use crate::strategy::{Decision, EditorA, EditorB, StrategyState};

    fn pt(batch: u32, x: f64, y: f64) -> EfficiencyPoint {
        EfficiencyPoint {
            batch_size: batch,
            mean_effective_reviewers: x,
            mean_review_time: y,
        }
    }

    #[test]
    fn auc_single_point_flat() {
        let c = 13.5;
        let points = [pt(2, 10.0, c)];
        assert_eq!(auc(&points, 7.0, 15.0).unwrap(), 8.0 * c);
    }

    #[test]
    fn auc_exact_trapezoid() {
        let points = [pt(2, 7.0, 10.0), pt(3, 15.0, 20.0)];
        assert_eq!(auc(&points, 7.0, 15.0).unwrap(), 120.0);
    }

    #[test]
    fn auc_clamp_plus_trapezoid() {
        let points = [pt(2, 9.0, 10.0), pt(3, 12.0, 16.0)];
        assert_eq!(auc(&points, 7.0, 15.0).unwrap(), 107.0);
    }

    #[test]
    fn auc_point_order_is_irrelevant() {
        let a = [pt(2, 9.0, 10.0), pt(3, 12.0, 16.0), pt(4, 11.0, 3.0)];
        let b = [pt(4, 11.0, 3.0), pt(3, 12.0, 16.0), pt(2, 9.0, 10.0)];
        assert_eq!(auc(&a, 7.0, 15.0).unwrap(), auc(&b, 7.0, 15.0).unwrap());
    }

    #[test]
    fn auc_merges_duplicate_x() {
        let points = [pt(2, 5.0, 10.0), pt(3, 5.0, 20.0), pt(4, 9.0, 30.0)];
        // Merged: (5, 15), (9, 30); trapezoid over [5, 9].
        assert_eq!(auc(&points, 5.0, 9.0).unwrap(), 90.0);
    }

    #[test]
    fn auc_window_left_of_data() {
        let points = [pt(2, 20.0, 4.0), pt(3, 30.0, 6.0)];
        assert_eq!(auc(&points, 7.0, 15.0).unwrap(), 32.0);
    }

    #[test]
    fn auc_empty_is_an_error() {
        assert_eq!(auc(&[], 7.0, 15.0).unwrap_err(), FitnessError::EmptyCurve);
    }

    #[test]
    fn auc_shift_property() {
        let base = [pt(2, 6.0, 11.0), pt(3, 9.5, 14.0), pt(4, 16.0, 19.0)];
        let delta = 2.25;
        let shifted: Vec<EfficiencyPoint> = base
            .iter()
            .map(|p| pt(p.batch_size, p.mean_effective_reviewers, p.mean_review_time + delta))
            .collect();
        let lifted = auc(&shifted, 7.0, 15.0).unwrap();
        let expected = auc(&base, 7.0, 15.0).unwrap() + 8.0 * delta;
        assert!((lifted - expected).abs() < 1e-9);
    }

    #[test]
    fn interpolate_matches_hand_values() {
        let points = [pt(2, 9.0, 10.0), pt(3, 12.0, 16.0)];
        assert_eq!(interpolate_at(&points, 8.0).unwrap(), 10.0);
        assert_eq!(interpolate_at(&points, 9.0).unwrap(), 10.0);
        assert_eq!(interpolate_at(&points, 10.5).unwrap(), 13.0);
        assert_eq!(interpolate_at(&points, 14.0).unwrap(), 16.0);
    }

    #[test]
    fn evaluate_is_deterministic() {
        let model = OutcomeModel::jscs();
        let cfg = FitnessConfig {
            runs_per_batch: 300,
            ..FitnessConfig::default()
        };
        let sim_cfg = SimulationConfig {
            master_seed: 7,
            ..SimulationConfig::default()
        };
        let a = evaluate(&EditorA, &model, &cfg, &sim_cfg);
        let b = evaluate(&EditorA, &model, &cfg, &sim_cfg);
        assert_eq!(a, b);
        assert!(!a.penalized);
    }

    #[test]
    fn always_zero_is_penalized_per_batch() {
        struct Zero;
        impl Strategy for Zero {
            fn decide(&self, _state: StrategyState) -> Decision {
                Decision { new_threads: 0 }
            }
        }
        let model = OutcomeModel::jscs();
        // Small batches fail with overwhelming probability per run, so 2000
        // runs flag both batch sizes for any seed in practice; the assertion
        // is frozen to this seed either way.
        let cfg = FitnessConfig {
            min_batch: 2,
            max_batch: 3,
            runs_per_batch: 2000,
            ..FitnessConfig::default()
        };
        let sim_cfg = SimulationConfig {
            master_seed: 0,
            ..SimulationConfig::default()
        };
        let v = evaluate(&Zero, &model, &cfg, &sim_cfg);
        assert_eq!(v.invalid_batch_count, 2);
        assert!(v.penalized);
        assert_eq!(v.value, 2.0e6);
    }

    #[test]
    fn editor_a_beats_editor_b_smoke() {
        // The full-scale ordering claim lives in the acceptance suite; this
        // frozen-seed smoke test guards the sign at reduced cost.
        let model = OutcomeModel::jscs();
        let cfg = FitnessConfig {
            runs_per_batch: 1000,
            ..FitnessConfig::default()
        };
        let sim_cfg = SimulationConfig {
            master_seed: 1,
            ..SimulationConfig::default()
        };
        let a = evaluate(&EditorA, &model, &cfg, &sim_cfg);
        let b = evaluate(&EditorB, &model, &cfg, &sim_cfg);
        assert!(a.value < b.value, "editor_a {} vs editor_b {}", a.value, b.value);
    }
}
