//! Weight sequences `p: N0 -> (0, inf)` with `p(n)^(1/n) -> inf`.
//!
//! The growth condition cannot be verified from finitely many values. It is
//! trusted for the built-in presets and *declared* by whoever constructs a
//! custom weight. Nothing in this crate assumes `p` is monotone.
//!
//! Values are kept in log-space (`ln p(n)`); raw values are only produced on
//! request through [`Weight::p_eval`], which reports overflow instead of
//! returning infinity.

use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::error::WeightError;

/// Log of a positive weight at an index.
pub type LogRule = dyn Fn(usize) -> f64 + Send + Sync;
/// `(N, r) -> Some(T)` with `sum_{n>N} r^n / p(n) <= T`, or `None` if `N` is too small.
pub type TailRule = dyn Fn(usize, f64) -> Option<f64> + Send + Sync;

#[derive(Clone)]
pub enum WeightKind {
    /// `p(n) = n!`
    Factorial,
    /// `p(n) = base^(n^power)` with `base > 1`, `power >= 2`.
    SuperExp { base: f64, power: f64 },
    /// User-supplied rule. Without a tail rule, series evaluation refuses to certify.
    Custom {
        log_p: Arc<LogRule>,
        tail: Option<Arc<TailRule>>,
    },
}

impl fmt::Debug for WeightKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightKind::Factorial => write!(f, "Factorial"),
            WeightKind::SuperExp { base, power } => {
                write!(f, "SuperExp {{ base: {base}, power: {power} }}")
            }
            WeightKind::Custom { tail, .. } => {
                write!(f, "Custom {{ tail: {} }}", tail.is_some())
            }
        }
    }
}

/// A weight sequence, identified by name. Two weights are equal iff their
/// names are equal.
#[derive(Clone, Debug)]
pub struct Weight {
    name: String,
    kind: WeightKind,
}

impl PartialEq for Weight {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
    }
}

impl Eq for Weight {}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

const LOG_FACT_TABLE: usize = 1024;

fn log_factorial(n: usize) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(LOG_FACT_TABLE);
        let mut acc = 0.0f64;
        t.push(0.0);
        for k in 1..LOG_FACT_TABLE {
            acc += (k as f64).ln();
            t.push(acc);
        }
        t
    });
    if n < LOG_FACT_TABLE {
        return table[n];
    }
    // Stirling series for ln Gamma(n + 1)
    let x = n as f64 + 1.0;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln()
        + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)))
}

impl Weight {
    pub fn factorial() -> Self {
        Weight {
            name: "factorial".into(),
            kind: WeightKind::Factorial,
        }
    }

    pub fn super_exp(base: f64, power: f64) -> Result<Self, WeightError> {
        if !(base > 1.0 && base.is_finite()) || !(power >= 2.0 && power.is_finite()) {
            return Err(WeightError::InvalidParameters(format!(
                "superexp requires b > 1 and q >= 2, got b={base}, q={power}"
            )));
        }
        Ok(Weight {
            name: format!("superexp:b={},q={}", fmt_param(base), fmt_param(power)),
            kind: WeightKind::SuperExp { base, power },
        })
    }

    /// Custom weight given by `ln p(n)`. The caller declares that
    /// `p(n)^(1/n) -> inf`; this is not checked.
    pub fn custom(
        id: &str,
        log_p: impl Fn(usize) -> f64 + Send + Sync + 'static,
        tail: Option<Arc<TailRule>>,
    ) -> Self {
        Weight {
            name: format!("custom:{id}"),
            kind: WeightKind::Custom {
                log_p: Arc::new(log_p),
                tail,
            },
        }
    }

    /// Parses a preset name: `factorial` or `superexp:b=<b>,q=<q>`.
    /// Custom weights are resolved through a [`WeightRegistry`].
    pub fn parse(name: &str) -> Result<Self, WeightError> {
        let name = name.trim();
        if name == "factorial" {
            return Ok(Weight::factorial());
        }
        if let Some(params) = name.strip_prefix("superexp:") {
            let mut base = None;
            let mut power = None;
            for part in params.split(',') {
                let (key, value) = part
                    .split_once('=')
                    .ok_or_else(|| WeightError::UnknownWeight(name.to_string()))?;
                let value: f64 = value
                    .trim()
                    .parse()
                    .map_err(|_| WeightError::UnknownWeight(name.to_string()))?;
                match key.trim() {
                    "b" => base = Some(value),
                    "q" => power = Some(value),
                    _ => return Err(WeightError::UnknownWeight(name.to_string())),
                }
            }
            return match (base, power) {
                (Some(b), Some(q)) => Weight::super_exp(b, q),
                _ => Err(WeightError::UnknownWeight(name.to_string())),
            };
        }
        Err(WeightError::UnknownWeight(name.to_string()))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &WeightKind {
        &self.kind
    }

    /// `ln p(n)`.
    pub fn log_p(&self, n: usize) -> f64 {
        match &self.kind {
            WeightKind::Factorial => log_factorial(n),
            WeightKind::SuperExp { base, power } => (n as f64).powf(*power) * base.ln(),
            WeightKind::Custom { log_p, .. } => log_p(n),
        }
    }

    /// `p(n)` as a double. Factorial values are accumulated by repeated
    /// multiplication (exact through 22!, correctly rounded products after);
    /// super-exponential values use `powf`.
    pub fn p_eval(&self, n: usize) -> Result<f64, WeightError> {
        let value = match &self.kind {
            WeightKind::Factorial => (1..=n).fold(1.0f64, |acc, k| acc * k as f64),
            WeightKind::SuperExp { base, power } => base.powf((n as f64).powf(*power)),
            WeightKind::Custom { log_p, .. } => log_p(n).exp(),
        };
        if value.is_finite() && value > 0.0 {
            Ok(value)
        } else {
            Err(WeightError::OverflowAtIndex(n))
        }
    }

    /// Bound `T >= sum_{n>N} r^n / p(n)`.
    ///
    /// Factorial: needs `r / (N + 2) <= 1/2`, then `T = 2 r^(N+1) / (N+1)!`.
    /// SuperExp: the term ratio `r p(n) / p(n+1)` is non-increasing; needs the
    /// ratio from `N+1` to `N+2` to be `<= 1/2`, then `T = t_{N+1} / (1 - ratio)`.
    pub fn tail_bound(&self, big_n: usize, r: f64) -> Result<f64, WeightError> {
        if !(r >= 0.0 && r.is_finite()) {
            return Err(WeightError::BoundUnavailable { n: big_n, r });
        }
        if r == 0.0 {
            return Ok(0.0);
        }
        match &self.kind {
            WeightKind::Factorial => {
                if r / (big_n as f64 + 2.0) > 0.5 {
                    return Err(WeightError::BoundUnavailable { n: big_n, r });
                }
                let log_t = std::f64::consts::LN_2 + (big_n as f64 + 1.0) * r.ln()
                    - log_factorial(big_n + 1);
                Ok(log_t.exp())
            }
            WeightKind::SuperExp { .. } => {
                let log_ratio = r.ln() + self.log_p(big_n + 1) - self.log_p(big_n + 2);
                let ratio = log_ratio.exp();
                if ratio > 0.5 {
                    return Err(WeightError::BoundUnavailable { n: big_n, r });
                }
                let log_first = (big_n as f64 + 1.0) * r.ln() - self.log_p(big_n + 1);
                Ok(log_first.exp() / (1.0 - ratio))
            }
            WeightKind::Custom { tail, .. } => tail
                .as_ref()
                .and_then(|rule| rule(big_n, r))
                .ok_or(WeightError::BoundUnavailable { n: big_n, r }),
        }
    }
}

fn fmt_param(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x}")
    }
}

/// Resolves weight names, including registered custom weights.
#[derive(Clone, Default)]
pub struct WeightRegistry {
    custom: Vec<Weight>,
}

impl WeightRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, weight: Weight) {
        self.custom.retain(|w| w.name != weight.name);
        self.custom.push(weight);
    }

    pub fn resolve(&self, name: &str) -> Result<Weight, WeightError> {
        let name = name.trim();
        if name.starts_with("custom:") {
            return self
                .custom
                .iter()
                .find(|w| w.name == name)
                .cloned()
                .ok_or_else(|| WeightError::UnknownWeight(name.to_string()));
        }
        Weight::parse(name)
    }

    /// Names of every weight this registry can resolve (presets shown by example).
    pub fn names(&self) -> Vec<String> {
        let mut names = vec!["factorial".to_string(), "superexp:b=<b>,q=<q>".to_string()];
        names.extend(self.custom.iter().map(|w| w.name.clone()));
        names
    }
}
