//! Problem data for the reaction-diffusion model
//! `-eps^2 (u_xx + u_yy) + b(x, y) u = f(x, y)` on the unit square with
//! Dirichlet boundary values `g`.

use crate::error::{Error, Result};
use crate::mesh::MeshKind;
use crate::scalar::Scalar;
use serde::Deserialize;
use std::path::Path;
use std::sync::Arc;

/// A scalar coefficient function on the unit square.
pub type Coefficient<T> = Arc<dyn Fn(T, T) -> T + Send + Sync>;

/// Perturbation parameter, reaction lower bound, and the coefficient /
/// right-hand-side / boundary functions of the model problem.
///
/// The model requires `b(x, y) >= beta^2 > 0`; that bound is verified at every
/// grid point during assembly.
#[derive(Clone)]
pub struct ProblemSpec<T> {
    epsilon: T,
    beta: T,
    name: String,
    b: Coefficient<T>,
    f: Coefficient<T>,
    g: Coefficient<T>,
}

impl<T: Scalar> ProblemSpec<T> {
    pub fn new(
        name: impl Into<String>,
        epsilon: T,
        beta: T,
        b: Coefficient<T>,
        f: Coefficient<T>,
        g: Coefficient<T>,
    ) -> Result<Self> {
        if !(epsilon > T::zero()) {
            return Err(Error::InvalidArgument(format!(
                "epsilon must be > 0, got {epsilon}"
            )));
        }
        if !(beta > T::zero()) {
            return Err(Error::InvalidArgument(format!(
                "beta must be > 0, got {beta}"
            )));
        }
        Ok(Self {
            epsilon,
            beta,
            name: name.into(),
            b,
            f,
            g,
        })
    }

    /// Look up one of the built-in problems by name; see [`builtin_names`].
    pub fn builtin(name: &str, epsilon: T, beta: T) -> Result<Self> {
        let one = |_: T, _: T| T::one();
        let zero = |_: T, _: T| T::zero();
        let (b, f, g): (Coefficient<T>, Coefficient<T>, Coefficient<T>) = match name {
            // b = 1, f = 1, homogeneous boundary
            "ones" => (Arc::new(one), Arc::new(one), Arc::new(zero)),
            // b = 1, f = 1, g = 1: the exact discrete solution is all ones
            "unit-solution" => (Arc::new(one), Arc::new(one), Arc::new(one)),
            // variable reaction coefficient with b >= 1
            "varcoef" => (
                Arc::new(|x: T, y: T| T::one() + x * x * y * y),
                Arc::new(one),
                Arc::new(zero),
            ),
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown problem {other:?} (available: {})",
                    builtin_names().join(", ")
                )))
            }
        };
        Self::new(name, epsilon, beta, b, f, g)
    }

    pub fn epsilon(&self) -> T {
        self.epsilon
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn b(&self, x: T, y: T) -> T {
        (self.b)(x, y)
    }

    pub fn f(&self, x: T, y: T) -> T {
        (self.f)(x, y)
    }

    pub fn g(&self, x: T, y: T) -> T {
        (self.g)(x, y)
    }
}

impl<T: Scalar> std::fmt::Debug for ProblemSpec<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("name", &self.name)
            .field("epsilon", &self.epsilon)
            .field("beta", &self.beta)
            .finish()
    }
}

/// Names accepted by [`ProblemSpec::builtin`].
pub fn builtin_names() -> Vec<&'static str> {
    vec!["ones", "unit-solution", "varcoef"]
}

/// Key-value run configuration, loadable from a TOML file.
///
/// All keys are optional; unset keys fall back to command-line flags or the
/// defaults (`beta = 1`, `sigma = 2`, `mesh = "uniform"`, `problem = "ones"`).
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub n: Option<usize>,
    pub epsilon: Option<f64>,
    pub beta: Option<f64>,
    pub sigma: Option<f64>,
    pub mesh: Option<MeshKind>,
    pub problem: Option<String>,
}

impl ProblemConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
    }
}
