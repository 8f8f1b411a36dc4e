//! Scenario documents (JSON, schema version 1).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::ambient::{catalog, AmbientSpace, Vec3};
use crate::error::{Error, Result};
use crate::flow::{FlowConfig, Integrator};
use crate::formats::polyline::read_loops;
use crate::loops::{self, Axis, DiscreteLoop};
use crate::prequant::Filling;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema: u32,
    pub name: String,
    /// Required by tasks that draw random sections.
    #[serde(default)]
    pub seed: Option<u64>,
    pub ambient: AmbientSpace,
    #[serde(default, rename = "loop")]
    pub loop_spec: Option<LoopSpec>,
    /// Names from the field catalog.
    #[serde(default)]
    pub fields: Vec<String>,
    pub task: Task,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "snake_case", deny_unknown_fields)]
pub enum LoopSpec {
    Circle {
        #[serde(default)]
        center: [f64; 3],
        radius: f64,
        n: usize,
    },
    Ellipse {
        #[serde(default)]
        center: [f64; 3],
        a: f64,
        b: f64,
        n: usize,
    },
    TorusLoop {
        direction: Axis,
        offsets: [f64; 2],
        #[serde(default)]
        amplitude: [f64; 2],
        n: usize,
    },
    Trefoil {
        #[serde(default)]
        center: [f64; 3],
        scale: f64,
        n: usize,
    },
    /// First loop of a polyline file; relative paths resolve against the
    /// scenario's directory.
    Polyline { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Task {
    Flow {
        dt: f64,
        steps: usize,
        #[serde(default = "default_integrator")]
        integrator: Integrator,
        #[serde(default)]
        cadence: Option<usize>,
        #[serde(default = "one")]
        substeps: usize,
        tolerances: FlowTolerances,
    },
    Invariants {
        trials: usize,
        tolerances: InvariantTolerances,
    },
    CocycleTable {
        tolerances: CocycleTolerances,
    },
    Holonomy {
        theta0: f64,
        filling: Filling,
        resolution: usize,
        /// Bound on the Richardson error estimate.
        tolerance: f64,
        #[serde(default)]
        expected_mod_1: Option<f64>,
    },
    SphereExample {
        resolution: usize,
        tolerance: f64,
    },
}

fn default_integrator() -> Integrator {
    Integrator::Rk4
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowTolerances {
    pub length_drift: f64,
    pub dual_length_drift: f64,
    #[serde(default)]
    pub center_displacement: Option<ExpectedVector>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectedVector {
    pub expected: [f64; 3],
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InvariantTolerances {
    pub compatibility: f64,
    pub gradient: f64,
    pub hamiltonian: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CocycleTolerances {
    pub antisymmetry: f64,
    pub cocycle_identity: f64,
}

fn schema(msg: impl Into<String>) -> Error {
    Error::Schema(msg.into())
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(schema(format!("`{name}` must be positive and finite, got {v}")))
    }
}

impl Task {
    pub fn name(&self) -> &'static str {
        match self {
            Task::Flow { .. } => "flow",
            Task::Invariants { .. } => "invariants",
            Task::CocycleTable { .. } => "cocycle_table",
            Task::Holonomy { .. } => "holonomy",
            Task::SphereExample { .. } => "sphere_example",
        }
    }

    fn needs_loop(&self) -> bool {
        matches!(self, Task::Flow { .. } | Task::Invariants { .. } | Task::CocycleTable { .. })
    }

    fn tolerances(&self) -> Vec<(&'static str, f64)> {
        match self {
            Task::Flow { tolerances: t, .. } => {
                let mut v = vec![("length_drift", t.length_drift), ("dual_length_drift", t.dual_length_drift)];
                if let Some(c) = &t.center_displacement {
                    v.push(("center_displacement.tolerance", c.tolerance));
                }
                v
            }
            Task::Invariants { tolerances: t, .. } => {
                vec![("compatibility", t.compatibility), ("gradient", t.gradient), ("hamiltonian", t.hamiltonian)]
            }
            Task::CocycleTable { tolerances: t } => vec![("antisymmetry", t.antisymmetry), ("cocycle_identity", t.cocycle_identity)],
            Task::Holonomy { tolerance, .. } | Task::SphereExample { tolerance, .. } => vec![("tolerance", *tolerance)],
        }
    }
}

impl Scenario {
    /// Parses and validates a scenario document.
    pub fn from_json(text: &str) -> Result<Self> {
        let s: Scenario = serde_json::from_str(text).map_err(|e| schema(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA_VERSION {
            return Err(schema(format!("unsupported schema version {}, expected {SCHEMA_VERSION}", self.schema)));
        }
        if let AmbientSpace::FlatTorus3 { periods } = self.ambient {
            for p in periods {
                positive("periods", p)?;
            }
        }
        for (name, v) in self.task.tolerances() {
            positive(name, v)?;
        }
        for f in &self.fields {
            catalog::field(f, self.ambient).map_err(|e| schema(format!("field `{f}`: {e}")))?;
        }
        let sphere = self.ambient == AmbientSpace::Sphere2;
        match &self.task {
            Task::Flow { dt, steps, cadence, substeps, .. } => {
                positive("dt", *dt)?;
                if *steps == 0 || *substeps == 0 || *cadence == Some(0) {
                    return Err(schema("`steps`, `substeps` and `cadence` must be at least 1"));
                }
            }
            Task::Invariants { trials, .. } => {
                if self.seed.is_none() {
                    return Err(schema("task `invariants` draws random sections and requires `seed`"));
                }
                if *trials == 0 {
                    return Err(schema("`trials` must be at least 1"));
                }
                if self.fields.is_empty() {
                    return Err(schema("task `invariants` needs at least one field"));
                }
            }
            Task::CocycleTable { .. } => {
                if self.fields.len() < 2 {
                    return Err(schema("task `cocycle_table` needs at least two fields"));
                }
            }
            Task::Holonomy { theta0, resolution, .. } => {
                if !(0.0..=std::f64::consts::PI).contains(theta0) {
                    return Err(schema(format!("`theta0` must lie in [0, π], got {theta0}")));
                }
                if *resolution < 16 {
                    return Err(schema("`resolution` must be at least 16"));
                }
            }
            Task::SphereExample { resolution, .. } => {
                if *resolution < 16 {
                    return Err(schema("`resolution` must be at least 16"));
                }
            }
        }
        if !self.task.needs_loop() != sphere {
            return Err(schema(format!("task `{}` is not available on this ambient space", self.task.name())));
        }
        if self.task.needs_loop() && self.loop_spec.is_none() {
            return Err(schema(format!("task `{}` requires a `loop`", self.task.name())));
        }
        Ok(())
    }

    /// Builds the initial loop; `base_dir` resolves polyline paths.
    pub fn build_loop(&self, base_dir: &Path) -> Result<DiscreteLoop> {
        let spec = self.loop_spec.as_ref().ok_or_else(|| schema("scenario has no `loop`"))?;
        let space = self.ambient;
        match spec {
            LoopSpec::Circle { center, radius, n } => loops::circle(space, Vec3::from(*center), *radius, *n),
            LoopSpec::Ellipse { center, a, b, n } => loops::ellipse(space, Vec3::from(*center), *a, *b, *n),
            LoopSpec::TorusLoop { direction, offsets, amplitude, n } => loops::wavy_torus_loop(space, *direction, *offsets, *amplitude, *n),
            LoopSpec::Trefoil { center, scale, n } => loops::trefoil(space, Vec3::from(*center), *scale, *n),
            LoopSpec::Polyline { path } => {
                let full = if path.is_absolute() { path.clone() } else { base_dir.join(path) };
                let text = std::fs::read_to_string(&full).map_err(|e| Error::Io(format!("{}: {e}", full.display())))?;
                read_loops(&text, space)?.into_iter().next().ok_or_else(|| schema(format!("{} holds no loop", full.display())))
            }
        }
        .map_err(|e| match e {
            Error::Io(_) | Error::Parse { .. } | Error::Schema(_) => e,
            other => schema(format!("loop: {other}")),
        })
    }

    pub fn flow_config(&self) -> Option<FlowConfig> {
        match &self.task {
            Task::Flow { dt, steps, integrator, cadence, substeps, .. } => {
                Some(FlowConfig { dt: *dt, steps: *steps, integrator: *integrator, cadence: cadence.unwrap_or(*steps), substeps: *substeps })
            }
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FLOW: &str = r#"{
        "schema": 1, "name": "circle", "ambient": {"kind": "euclidean3"},
        "loop": {"generator": "circle", "radius": 1.0, "n": 64},
        "task": {"kind": "flow", "dt": 1e-3, "steps": 10,
                 "tolerances": {"length_drift": 1e-6, "dual_length_drift": 1e-6}}
    }"#;

    #[test]
    fn parses_flow_scenario() {
        let s = Scenario::from_json(FLOW).unwrap();
        assert_eq!(s.flow_config().unwrap().cadence, 10);
        assert_eq!(s.build_loop(Path::new(".")).unwrap().len(), 64);
    }

    #[test]
    fn rejects_schema_violations() {
        let bad = [
            FLOW.replace("\"schema\": 1", "\"schema\": 2"),
            FLOW.replace("\"name\"", "\"nome\""),
            FLOW.replace("1e-6, \"dual", "-1e-6, \"dual"),
            FLOW.replace("\"dt\": 1e-3", "\"dt\": 0"),
            FLOW.replace("\"euclidean3\"", "\"sphere2\""),
            FLOW.replace("\"kind\": \"flow\"", "\"kind\": \"fly\""),
        ];
        for b in &bad {
            assert!(matches!(Scenario::from_json(b), Err(Error::Schema(_))), "{b}");
        }
    }

    #[test]
    fn seeds_are_mandatory_for_random_sections() {
        let doc = r#"{"schema": 1, "name": "inv", "ambient": {"kind": "euclidean3"},
            "loop": {"generator": "circle", "radius": 1.0, "n": 32}, "fields": ["translation_e3"],
            "task": {"kind": "invariants", "trials": 2,
                     "tolerances": {"compatibility": 1e-12, "gradient": 1e-3, "hamiltonian": 1e-3}}}"#;
        assert!(matches!(Scenario::from_json(doc), Err(Error::Schema(m)) if m.contains("seed")));
        let seeded = doc.replace("\"name\": \"inv\"", "\"name\": \"inv\", \"seed\": 3");
        assert!(Scenario::from_json(&seeded).is_ok());
        let unknown = seeded.replace("translation_e3", "no_such_field");
        assert!(Scenario::from_json(&unknown).is_err());
    }
}
