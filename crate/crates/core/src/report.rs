//! Serializable verification reports.

use serde::Serialize;

/// Version string baked in at build time (`git describe`, or the package
/// version outside a checkout).
pub const VERSION: &str = env!("AIRY_VERSION");

/// Outcome of one identity over a set of points.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub tolerance: f64,
    pub max_residual: f64,
    /// Sorted indices of points whose residual exceeds the tolerance or
    /// could not be evaluated.
    pub failing_points: Vec<usize>,
    pub evaluated: usize,
    pub passed: bool,
}

impl Check {
    /// Builds a check from per-point residuals; `None` marks a point that
    /// could not be evaluated and counts as a failure.
    pub fn from_residuals(name: impl Into<String>, tolerance: f64, residuals: &[Option<f64>]) -> Self {
        let mut max_residual = 0.0f64;
        let mut failing_points = Vec::new();
        for (i, r) in residuals.iter().enumerate() {
            match r {
                Some(v) if v.is_finite() => {
                    max_residual = max_residual.max(*v);
                    if *v > tolerance {
                        failing_points.push(i);
                    }
                }
                _ => failing_points.push(i),
            }
        }
        Self {
            name: name.into(),
            tolerance,
            max_residual,
            passed: failing_points.is_empty(),
            failing_points,
            evaluated: residuals.len(),
        }
    }

    /// A single pass/fail condition without a residual series.
    pub fn condition(name: impl Into<String>, tolerance: f64, residual: f64) -> Self {
        Self::from_residuals(name, tolerance, &[Some(residual)])
    }

    pub fn line(&self) -> String {
        format!(
            "{} {}: max residual {:.3e} (tol {:.1e}, {} failing of {})",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.max_residual,
            self.tolerance,
            self.failing_points.len(),
            self.evaluated
        )
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub title: String,
    pub version: String,
    pub parameters: serde_json::Value,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl Report {
    pub fn new(title: impl Into<String>, parameters: serde_json::Value, checks: Vec<Check>) -> Self {
        let passed = checks.iter().all(|c| c.passed);
        Self {
            title: title.into(),
            version: VERSION.to_string(),
            parameters,
            checks,
            passed,
        }
    }

    pub fn merge(title: impl Into<String>, parameters: serde_json::Value, parts: Vec<Report>) -> Self {
        let checks = parts.into_iter().flat_map(|r| r.checks).collect();
        Self::new(title, parameters, checks)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} ({})\n", self.title, self.version);
        for c in &self.checks {
            out.push_str(&c.line());
            out.push('\n');
        }
        out.push_str(if self.passed {
            "overall: PASS\n"
        } else {
            "overall: FAIL\n"
        });
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failing_points_and_missing_values() {
        let c = Check::from_residuals("x", 1e-3, &[Some(1e-4), Some(2e-3), None, Some(f64::NAN)]);
        assert_eq!(c.failing_points, vec![1, 2, 3]);
        assert_eq!(c.max_residual, 2e-3);
        assert!(!c.passed);
        let r = Report::new("t", serde_json::json!({}), vec![Check::condition("y", 1.0, 0.5)]);
        assert!(r.passed);
        assert!(!VERSION.is_empty());
    }
}
