use serde::Serialize;
use serde_json::Value;

/// Base tolerances; every one is multiplied by the run's tolerance scale.
pub mod tol {
    pub const MCYBE: f64 = 1e-12;
    pub const R_JACOBI: f64 = 1e-10;
    pub const HOMOMORPHISM: f64 = 1e-10;
    pub const INVOLUTION: f64 = 1e-9;
    pub const SYM_INVARIANCE: f64 = 1e-12;
    pub const COCYCLE: f64 = 1e-10;
    pub const TENSOR_IDENTITY: f64 = 1e-11;
    pub const TENSOR_VANISHING: f64 = 1e-12;
    pub const DOUBLE_INVARIANCE: f64 = 1e-12;
    pub const DOUBLE_JACOBI: f64 = 1e-10;
    pub const CONSERVATION: f64 = 1e-8;
    pub const SOLVER_AGREEMENT: f64 = 1e-6;
    pub const CONJUGATION_PATHS: f64 = 1e-9;
    pub const PROJECTION: f64 = 1e-10;
    pub const REASSEMBLY: f64 = 1e-10;
    pub const RHS_AGREEMENT: f64 = 1e-12;
    pub const PIPELINE_AGREEMENT: f64 = 1e-9;
    pub const ORBIT_AGREEMENT: f64 = 1e-10;
    pub const CLOSURE: f64 = 1e-10;
    pub const ANTISYMMETRY: f64 = 1e-12;
    pub const STRUCTURE_JACOBI: f64 = 1e-10;
}

/// One measured quantity with the bound it is held to.
///
/// Only `required` checks decide the exit status; the others record whether
/// a diagnostic quantity vanishes (for example `[[a,a]]` for a factorisable
/// r-matrix, which legitimately does not).
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub required: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub location: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub seed: u64,
    pub tolerance_scale: f64,
    pub pass: bool,
    pub checks: Vec<Check>,
    pub data: Value,
}

impl Report {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.required && !c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

pub(crate) struct Checks {
    scale: f64,
    items: Vec<Check>,
}

impl Checks {
    pub fn new(scale: f64) -> Self {
        Self { scale, items: Vec::new() }
    }

    pub fn add(&mut self, name: impl Into<String>, value: f64, base: f64) -> &mut Check {
        self.push(name.into(), value, base, true)
    }

    pub fn diagnostic(&mut self, name: impl Into<String>, value: f64, base: f64) -> &mut Check {
        self.push(name.into(), value, base, false)
    }

    fn push(&mut self, name: String, value: f64, base: f64, required: bool) -> &mut Check {
        let tolerance = base * self.scale;
        self.items.push(Check {
            name,
            value,
            tolerance,
            pass: value <= tolerance,
            required,
            location: None,
        });
        self.items.last_mut().expect("just pushed")
    }

    pub fn finish(self, command: &str, seed: u64, data: Value) -> Report {
        let pass = self.items.iter().filter(|c| c.required).all(|c| c.pass);
        Report {
            command: command.to_string(),
            seed,
            tolerance_scale: self.scale,
            pass,
            checks: self.items,
            data,
        }
    }
}

impl Check {
    pub fn at(&mut self, location: impl Into<String>) -> &mut Self {
        self.location = Some(location.into());
        self
    }
}
