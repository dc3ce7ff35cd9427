//! Cross-method agreement reports.

use serde::{Deserialize, Serialize};

use crate::analytic::Method;
use crate::error::{Error, Result};
use crate::experiments::sweep::{run_sweep, Row, SweepResult, SweepSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareSpec {
    pub sweep: SweepSpec,
    /// Absolute gap accepted between any two methods.
    pub tolerance: f64,
    /// Gaps within this many Monte Carlo standard errors also pass.
    pub z_limit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub swept_value: f64,
    pub target: String,
    pub method_a: Method,
    pub method_b: Method,
    pub value_a: Option<f64>,
    pub value_b: Option<f64>,
    pub gap: Option<f64>,
    /// Gap in units of the combined Monte Carlo standard error.
    pub z: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub tolerance: f64,
    pub z_limit: f64,
    pub comparisons: Vec<Comparison>,
    pub all_pass: bool,
    pub sweep: SweepResult,
}

fn label(row: &Row) -> String {
    match row.j {
        Some(j) => format!("{}-pair k={} j={} {}", row.scheme, row.k, j, row.model),
        None => format!("{} k={} {}", row.scheme, row.k, row.model),
    }
}

fn judge(a: &Row, b: &Row, tolerance: f64, z_limit: f64) -> (Option<f64>, Option<f64>, bool) {
    let (Some(va), Some(vb)) = (a.outage, b.outage) else {
        return (None, None, false);
    };
    let gap = (va - vb).abs();
    let se = a.stderr.unwrap_or(0.0).hypot(b.stderr.unwrap_or(0.0));
    let z = (a.stderr.is_some() || b.stderr.is_some()).then(|| {
        if se > 0.0 {
            gap / se
        } else if gap == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    });
    let pass = gap <= tolerance.max(z_limit * se);
    (Some(gap), z, pass)
}

/// Runs the sweep and compares every pair of methods at every grid point
/// and target.
pub fn compare_methods(spec: &CompareSpec) -> Result<ComparisonReport> {
    let methods = &spec.sweep.methods;
    if methods.len() < 2 {
        return Err(Error::invalid("comparison needs at least two methods"));
    }
    let sweep = run_sweep(&spec.sweep)?;
    let per_point = spec.sweep.targets.len() * methods.len();
    let mut comparisons = Vec::new();
    for (gi, &v) in spec.sweep.grid.iter().enumerate() {
        for ti in 0..spec.sweep.targets.len() {
            let base = gi * per_point + ti * methods.len();
            let rows = &sweep.rows[base..base + methods.len()];
            for a in 0..rows.len() {
                for b in a + 1..rows.len() {
                    let (gap, z, pass) = judge(&rows[a], &rows[b], spec.tolerance, spec.z_limit);
                    comparisons.push(Comparison {
                        swept_value: v,
                        target: label(&rows[a]),
                        method_a: rows[a].method,
                        method_b: rows[b].method,
                        value_a: rows[a].outage,
                        value_b: rows[b].outage,
                        gap,
                        z,
                        pass,
                    });
                }
            }
        }
    }
    let all_pass = comparisons.iter().all(|c| c.pass);
    Ok(ComparisonReport {
        tolerance: spec.tolerance,
        z_limit: spec.z_limit,
        comparisons,
        all_pass,
        sweep,
    })
}

impl ComparisonReport {
    /// One line per comparison plus a verdict.
    pub fn summary(&self) -> String {
        let fmt = |v: Option<f64>| v.map_or("n/a".to_string(), |v| format!("{v:.6e}"));
        let mut s = String::new();
        for c in &self.comparisons {
            s.push_str(&format!(
                "{} {:>9} @ {:<8} {} vs {}: {} vs {}  gap {}{}\n",
                if c.pass { "PASS" } else { "FAIL" },
                self.sweep.metadata.parameter.as_str(),
                c.swept_value,
                c.method_a,
                c.method_b,
                fmt(c.value_a),
                fmt(c.value_b),
                fmt(c.gap),
                c.z.map_or(String::new(), |z| format!("  z {z:.2}")),
            ));
            s.push_str(&format!("     {}\n", c.target));
        }
        let failed = self.comparisons.iter().filter(|c| !c.pass).count();
        s.push_str(&format!("{} comparisons, {} failed\n", self.comparisons.len(), failed));
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::Scheme;
    use crate::experiments::config::{ExperimentConfig, SweptParameter, TargetSpec};
    use crate::model::EhModel;

    #[test]
    fn method_against_itself_has_zero_gap() {
        let spec = CompareSpec {
            sweep: SweepSpec {
                parameter: SweptParameter::PtDbm,
                grid: vec![-20.0, 0.0],
                base: ExperimentConfig::default(),
                targets: vec![TargetSpec::single(Scheme::Mms, 1, EhModel::Linear)],
                methods: vec![Method::Analytic, Method::Analytic],
                mc_trials: None,
            },
            tolerance: 0.0,
            z_limit: 3.0,
        };
        let r = compare_methods(&spec).unwrap();
        assert!(r.all_pass);
        assert!(r.comparisons.iter().all(|c| c.gap == Some(0.0)));
    }

    #[test]
    fn needs_two_methods() {
        let spec = CompareSpec {
            sweep: SweepSpec {
                parameter: SweptParameter::PtDbm,
                grid: vec![0.0],
                base: ExperimentConfig::default(),
                targets: vec![TargetSpec::single(Scheme::Rs, 1, EhModel::Linear)],
                methods: vec![Method::Analytic],
                mc_trials: None,
            },
            tolerance: 1e-3,
            z_limit: 3.0,
        };
        assert!(compare_methods(&spec).is_err());
    }
}
