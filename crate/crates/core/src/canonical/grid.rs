use evalexpr::{
    build_operator_tree, ContextWithMutableVariables, DefaultNumericTypes, HashMapContext, Node,
    Value,
};

use crate::error::{Error, Result};
use crate::numeric::{fit_line, pairwise_sum};

/// Log-equispaced radii `r_i = r_min * ratio^i`, `i = 0..len`.
///
/// Each node owns the cell `[r_i ratio^{-1/2}, r_i ratio^{1/2}]`, so every
/// Haar weight equals `ln ratio` and an index shift is an exact isometry.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    log_min: f64,
    log_step: f64,
    nodes: Vec<f64>,
}

impl RadialGrid {
    pub fn new(r_min: f64, r_max: f64, len: usize) -> Result<Self> {
        if !(r_min > 0.0 && r_max > r_min && r_min.is_finite() && r_max.is_finite()) {
            return Err(Error::Config(format!(
                "grid needs 0 < r_min < r_max, got [{r_min}, {r_max}]"
            )));
        }
        if len < 2 {
            return Err(Error::Config(format!("grid needs at least 2 nodes, got {len}")));
        }
        let log_min = r_min.ln();
        let log_step = (r_max.ln() - log_min) / (len - 1) as f64;
        Ok(Self::from_log(log_min, log_step, len))
    }

    fn from_log(log_min: f64, log_step: f64, len: usize) -> Self {
        let nodes = (0..len)
            .map(|i| (log_min + i as f64 * log_step).exp())
            .collect();
        Self {
            log_min,
            log_step,
            nodes,
        }
    }

    /// `r` from `e^-6` to `e^3` in steps of `e^(3/32)` (97 nodes).
    pub fn standard() -> Self {
        Self::from_log(-6.0, 3.0 / 32.0, 97)
    }

    /// Same span with the step halved.
    pub fn refined(&self) -> Self {
        Self::from_log(self.log_min, self.log_step / 2.0, 2 * self.len() - 1)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn ratio(&self) -> f64 {
        self.log_step.exp()
    }

    pub fn log_step(&self) -> f64 {
        self.log_step
    }

    /// Haar weight of every node.
    pub fn weight(&self) -> f64 {
        self.log_step
    }

    pub fn r_min(&self) -> f64 {
        self.nodes[0]
    }

    pub fn r_max(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    /// Lower edge of the first cell.
    pub fn lower_edge(&self) -> f64 {
        (self.log_min - 0.5 * self.log_step).exp()
    }

    /// Upper edge of the last cell.
    pub fn upper_edge(&self) -> f64 {
        (self.log_min + (self.len() as f64 - 0.5) * self.log_step).exp()
    }

    /// `k` with `r0 = ratio^k`, if `r0` is an integer power of the ratio.
    pub fn shift_of(&self, r0: f64) -> Result<i64> {
        if !(r0 > 0.0) {
            return Err(Error::NonPositiveScale(r0));
        }
        let k = r0.ln() / self.log_step;
        let kr = k.round();
        if (k - kr).abs() > 1e-9 {
            return Err(Error::OffGridScale(r0));
        }
        Ok(kr as i64)
    }

    pub fn power(&self, k: i64) -> f64 {
        (k as f64 * self.log_step).exp()
    }

    /// `sum_i w * values_i`, pairwise.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        self.weight() * pairwise_sum(values)
    }

    /// Node indices with `r_lo <= r <= r_hi`.
    pub fn window(&self, r_lo: f64, r_hi: f64) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.nodes[i] >= r_lo && self.nodes[i] <= r_hi)
            .collect()
    }
}

/// Power-law extrapolation of an integrand below the first grid cell.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct TailEstimate {
    /// Fitted exponent of the integrand near `r = 0`.
    pub alpha: f64,
    /// The grid sum continued below the first node with the fitted power
    /// law, `sum_{i<0} w C r_i^alpha`; infinite when `alpha` is not
    /// positive.
    pub value: f64,
    pub converges: bool,
}

/// Nodes used for the small-r fit.
pub const TAIL_NODES: usize = 8;
/// Exponents at or below this are treated as a divergent tail.
pub const TAIL_ALPHA_MIN: f64 = 0.05;

impl TailEstimate {
    /// Fits `log I = alpha log r + log C` on the first nodes with positive
    /// integrand.
    pub fn fit(grid: &RadialGrid, integrand: &[f64]) -> Self {
        let pts: Vec<(f64, f64)> = grid
            .nodes()
            .iter()
            .zip(integrand)
            .filter(|(_, v)| **v > 0.0 && v.is_finite())
            .take(TAIL_NODES)
            .map(|(r, v)| (r.ln(), v.ln()))
            .collect();
        if pts.len() < 3 {
            return Self {
                alpha: f64::INFINITY,
                value: 0.0,
                converges: true,
            };
        }
        let (x, y): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
        let line = fit_line(&x, &y);
        let alpha = line.slope;
        let converges = alpha > TAIL_ALPHA_MIN;
        let value = if converges {
            let head = (line.intercept + alpha * grid.r_min().ln()).exp();
            grid.weight() * head / (grid.ratio().powf(alpha) - 1.0)
        } else {
            f64::INFINITY
        };
        Self {
            alpha,
            value,
            converges,
        }
    }
}

/// The exponent `u` of the radial densities `e^{-u/2}` and `e^{-u}`.
#[derive(Debug, Clone)]
pub enum RadialProfile {
    /// `u(r) = 2 r^2`.
    Quadratic,
    /// `u(r) = r`.
    Linear,
    /// `u(r) = c r^p`.
    Power { coef: f64, exponent: f64 },
    /// `u(r) = c`.
    Constant(f64),
    /// An expression in the variable `r`, e.g. `2 * r^2 + math::ln(1 + r)`.
    Custom { source: String, tree: Box<Node<DefaultNumericTypes>> },
}

impl RadialProfile {
    /// Parses `quadratic`, `linear`, `const:<c>`, `power:<c>:<p>` or
    /// `custom:<expr>`.
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let num = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| Error::Config(format!("bad number {s:?} in u profile: {e}")))
        };
        match spec {
            "quadratic" => Ok(Self::Quadratic),
            "linear" => Ok(Self::Linear),
            _ => {
                if let Some(expr) = spec.strip_prefix("custom:") {
                    Self::custom(expr)
                } else if let Some(c) = spec.strip_prefix("const:") {
                    Ok(Self::Constant(num(c)?))
                } else if let Some(rest) = spec.strip_prefix("power:") {
                    let (c, p) = rest
                        .split_once(':')
                        .ok_or_else(|| Error::Config(format!("power profile needs c:p, got {rest:?}")))?;
                    Ok(Self::Power {
                        coef: num(c)?,
                        exponent: num(p)?,
                    })
                } else {
                    Err(Error::Config(format!("unknown u profile {spec:?}")))
                }
            }
        }
    }

    pub fn custom(expr: &str) -> Result<Self> {
        let tree = build_operator_tree::<DefaultNumericTypes>(expr)
            .map_err(|e| Error::Config(format!("cannot parse u expression {expr:?}: {e}")))?;
        let profile = Self::Custom {
            source: expr.to_string(),
            tree: Box::new(tree),
        };
        profile.try_eval(1.0)?;
        Ok(profile)
    }

    pub fn label(&self) -> String {
        match self {
            Self::Quadratic => "quadratic".into(),
            Self::Linear => "linear".into(),
            Self::Power { coef, exponent } => format!("power:{coef}:{exponent}"),
            Self::Constant(c) => format!("const:{c}"),
            Self::Custom { source, .. } => format!("custom:{source}"),
        }
    }

    pub fn try_eval(&self, r: f64) -> Result<f64> {
        Ok(match self {
            Self::Quadratic => 2.0 * r * r,
            Self::Linear => r,
            Self::Power { coef, exponent } => coef * r.powf(*exponent),
            Self::Constant(c) => *c,
            Self::Custom { source, tree } => {
                let mut ctx = HashMapContext::<DefaultNumericTypes>::new();
                ctx.set_value("r".into(), Value::Float(r))
                    .map_err(|e| Error::Config(e.to_string()))?;
                tree.eval_number_with_context(&ctx).map_err(|e| {
                    Error::Config(format!("u expression {source:?} failed at r = {r}: {e}"))
                })?
            }
        })
    }

    /// `u(r)`; custom expressions that fail to evaluate yield NaN.
    pub fn eval(&self, r: f64) -> f64 {
        self.try_eval(r).unwrap_or(f64::NAN)
    }
}

/// A grid together with the profile `u`.
#[derive(Debug, Clone)]
pub struct RadialMeasure {
    pub grid: RadialGrid,
    pub u: RadialProfile,
}

impl RadialMeasure {
    /// Checks `u >= 0` on the grid.
    pub fn new(grid: RadialGrid, u: RadialProfile) -> Result<Self> {
        for &r in grid.nodes() {
            let v = u.try_eval(r)?;
            if !(v >= 0.0) {
                return Err(Error::Config(format!(
                    "u({}) = {v} is not a nonnegative number",
                    r
                )));
            }
        }
        Ok(Self { grid, u })
    }

    pub fn standard() -> Self {
        Self {
            grid: RadialGrid::standard(),
            u: RadialProfile::Quadratic,
        }
    }

    /// Cocycle density `e^{-u(r)/2}`.
    pub fn half_density(&self, r: f64) -> f64 {
        (-0.5 * self.u.eval(r)).exp()
    }

    /// Poisson intensity density `e^{-u(r)}`.
    pub fn intensity(&self, r: f64) -> f64 {
        (-self.u.eval(r)).exp()
    }

    pub fn half_densities(&self) -> Vec<f64> {
        self.grid.nodes().iter().map(|&r| self.half_density(r)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_grid_shape() {
        let g = RadialGrid::standard();
        assert_eq!(g.len(), 97);
        assert!((g.r_min() - (-6.0f64).exp()).abs() < 1e-15);
        assert!((g.r_max().ln() - 3.0).abs() < 1e-13);
        for w in g.nodes().windows(2) {
            assert!(((w[1] / w[0]).ln() - 3.0 / 32.0).abs() < 1e-14);
        }
        assert_eq!(g.shift_of(g.ratio().powi(3)).unwrap(), 3);
        assert_eq!(g.shift_of(1.0 / g.ratio()).unwrap(), -1);
        assert!(matches!(g.shift_of(1.05), Err(Error::OffGridScale(_))));
        assert!(matches!(g.shift_of(-1.0), Err(Error::NonPositiveScale(_))));
        assert_eq!(g.refined().len(), 193);
    }

    #[test]
    fn profiles() {
        let q = RadialProfile::parse("quadratic").unwrap();
        assert_eq!(q.eval(3.0), 18.0);
        let c = RadialProfile::parse("custom:2 * r^2 + math::ln(1 + r)").unwrap();
        assert!((c.eval(0.5) - (0.5 + 1.5f64.ln())).abs() < 1e-15);
        let p = RadialProfile::parse("power:3:1.5").unwrap();
        assert!((p.eval(4.0) - 24.0).abs() < 1e-12);
        assert!(RadialProfile::parse("custom:r +").is_err());
        assert!(RadialProfile::parse("cubic").is_err());
        assert!(RadialMeasure::new(RadialGrid::standard(), RadialProfile::Constant(-1.0)).is_err());
    }

    #[test]
    fn tail_fit_recovers_power_law() {
        let g = RadialGrid::standard();
        let vals: Vec<f64> = g.nodes().iter().map(|r| 3.0 * r * r).collect();
        let t = TailEstimate::fit(&g, &vals);
        assert!((t.alpha - 2.0).abs() < 1e-10);
        let exact = g.weight() * 3.0 * g.r_min().powi(2) / (g.ratio().powi(2) - 1.0);
        assert!((t.value - exact).abs() < 1e-10 * exact);
        let flat = vec![1.0; g.len()];
        assert!(!TailEstimate::fit(&g, &flat).converges);
    }
}
