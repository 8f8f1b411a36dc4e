//! Scenario execution: one task per scenario, a JSON report and plot-ready
//! artifacts in the output directory.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::acceptance::{self, CriterionOutcome};
use crate::ambient::catalog;
use crate::error::{Error, Result};
use crate::extension::{cocycle_c, cocycle_identity_residual, hamiltonian_residual, ExactDivFreeField};
use crate::flow::{self, gradient_residual};
use crate::formats::report::{write_cocycle_csv, write_diagnostics_csv, CocycleRow};
use crate::formats::scenario::{Scenario, Task};
use crate::formats::{write_polyline, Check, RunReport};
use crate::loops::DiscreteLoop;
use crate::prequant::{sphere_holonomy, sphere_rotation_hamiltonian, Filling, HolonomyReport, IntegralityGap};
use crate::tilde::compatibility_residual;

pub const REPORT_FILE: &str = "report.json";

impl Error {
    /// Process exit code: 2 for unusable input, 3 for numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Schema(_) | Error::Parse { .. } | Error::Io(_) => 2,
            _ => 3,
        }
    }
}

fn io(path: &Path, e: std::io::Error) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

/// Reads and validates a scenario; returns it with the raw document.
pub fn load_scenario(path: &Path) -> Result<(Scenario, serde_json::Value)> {
    let text = fs::read_to_string(path).map_err(|e| io(path, e))?;
    let raw: serde_json::Value = serde_json::from_str(&text).map_err(|e| Error::Schema(e.to_string()))?;
    Ok((Scenario::from_json(&text)?, raw))
}

/// Runs the scenario at `path`, writing `report.json` and artifacts into
/// `out_dir`. Nothing is written when the scenario is rejected.
pub fn run_scenario(path: &Path, out_dir: &Path) -> Result<RunReport> {
    let (scenario, raw) = load_scenario(path)?;
    let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."));
    let initial = if scenario.loop_spec.is_some() { Some(scenario.build_loop(&base_dir)?) } else { None };
    let start = Instant::now();
    let mut out = Artifacts { dir: out_dir.to_path_buf(), names: Vec::new() };
    let checks = execute(&scenario, initial, &mut out)?;
    let report = RunReport::new(raw, scenario.task.name(), checks, out.names.clone(), start.elapsed().as_secs_f64());
    let text = serde_json::to_string_pretty(&report).map_err(|e| Error::Io(e.to_string()))?;
    out.write(REPORT_FILE, text.as_bytes())?;
    Ok(report)
}

struct Artifacts {
    dir: PathBuf,
    names: Vec<String>,
}

impl Artifacts {
    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        fs::create_dir_all(&self.dir).map_err(|e| io(&self.dir, e))?;
        let path = self.dir.join(name);
        fs::write(&path, bytes).map_err(|e| io(&path, e))?;
        if name != REPORT_FILE {
            self.names.push(name.to_string());
        }
        Ok(())
    }
}

fn exact_fields(s: &Scenario) -> Result<Vec<ExactDivFreeField>> {
    s.fields.iter().map(|f| ExactDivFreeField::new(catalog::field(f, s.ambient)?)).collect()
}

fn execute(s: &Scenario, initial: Option<DiscreteLoop>, out: &mut Artifacts) -> Result<Vec<Check>> {
    let need_loop = || initial.clone().ok_or_else(|| Error::Schema(format!("task `{}` requires a `loop`", s.task.name())));
    match &s.task {
        Task::Flow { tolerances, .. } => {
            let config = s.flow_config().expect("flow task");
            let traj = flow::run(need_loop()?, &config)?;
            let mut csv = Vec::new();
            write_diagnostics_csv(&mut csv, &traj.diagnostics)?;
            out.write("diagnostics.csv", &csv)?;
            out.write("trajectory.polyline", write_polyline(traj.snapshots.iter().map(|st| &st.loop_)).as_bytes())?;
            let first = &traj.diagnostics[0];
            let last = traj.diagnostics.last().expect("final diagnostics");
            let dual = traj.diagnostics.iter().map(|d| d.max_dual_length_drift).fold(0.0, f64::max);
            let mut checks = vec![
                Check::at_most("relative_length_drift", last.relative_length_drift, tolerances.length_drift),
                Check::at_most("max_dual_length_drift", dual, tolerances.dual_length_drift),
            ];
            if let Some(c) = &tolerances.center_displacement {
                let err = (0..3).map(|k| (last.center_of_mass[k] - first.center_of_mass[k] - c.expected[k]).powi(2)).sum::<f64>().sqrt();
                checks.push(Check::at_most("center_displacement_error", err, c.tolerance));
            }
            Ok(checks)
        }
        Task::Invariants { trials, tolerances } => {
            let l = need_loop()?;
            let seed = s.seed.ok_or_else(|| Error::Schema("task `invariants` requires `seed`".into()))?;
            let mut checks = vec![
                Check::at_most("compatibility_residual", compatibility_residual(&l, *trials, seed)?, tolerances.compatibility),
                Check::at_most("gradient_residual", gradient_residual(&l, *trials, seed)?, tolerances.gradient),
            ];
            for (name, x) in s.fields.iter().zip(exact_fields(s)?) {
                let r = hamiltonian_residual(&l, &x, &l, *trials, seed)?;
                checks.push(Check::at_most(format!("hamiltonian_residual[{name}]"), r, tolerances.hamiltonian));
            }
            Ok(checks)
        }
        Task::CocycleTable { tolerances } => {
            let base = need_loop()?;
            let fields = exact_fields(s)?;
            let m = fields.len();
            let mut table = vec![vec![0.0; m]; m];
            let mut rows = Vec::with_capacity(m * m);
            for i in 0..m {
                for j in 0..m {
                    table[i][j] = cocycle_c(&base, &fields[i], &fields[j])?;
                    rows.push(CocycleRow { field_i: s.fields[i].clone(), field_j: s.fields[j].clone(), c_value: table[i][j] });
                }
            }
            let mut csv = Vec::new();
            write_cocycle_csv(&mut csv, &rows)?;
            out.write("cocycle.csv", &csv)?;
            let antisym = (0..m).flat_map(|i| (0..m).map(move |j| (i, j))).map(|(i, j)| (table[i][j] + table[j][i]).abs()).fold(0.0, f64::max);
            let mut jacobi = 0.0f64;
            for i in 0..m {
                for j in (i + 1)..m {
                    for k in (j + 1)..m {
                        jacobi = jacobi.max(cocycle_identity_residual(&base, &fields[i], &fields[j], &fields[k])?);
                    }
                }
            }
            Ok(vec![
                Check::at_most("antisymmetry", antisym, tolerances.antisymmetry),
                Check::at_most("cocycle_identity_residual", jacobi, tolerances.cocycle_identity),
            ])
        }
        Task::Holonomy { theta0, filling, resolution, tolerance, expected_mod_1 } => {
            let h = sphere_holonomy(*theta0, *filling, *resolution)?;
            write_holonomy(out, &h)?;
            let mut checks = vec![Check::at_most("estimated_error", h.estimated_error, *tolerance)];
            if let Some(e) = expected_mod_1 {
                // distance on the circle R/Z
                let d = (h.value_mod_1 - e).rem_euclid(1.0);
                checks.push(Check::at_most("value_mod_1_error", d.min(1.0 - d), *tolerance));
            }
            Ok(checks)
        }
        Task::SphereExample { resolution, tolerance } => {
            let eq = 0.5 * std::f64::consts::PI;
            let north = sphere_holonomy(eq, Filling::North, *resolution)?;
            let south = sphere_holonomy(eq, Filling::South, *resolution)?;
            write_holonomy(out, &north)?;
            let gap = IntegralityGap::of(north.raw_value - south.raw_value);
            Ok(vec![
                Check::close("value_mod_1_error", north.value_mod_1, 0.5, *tolerance),
                Check::at_most("north_south_integrality_gap", gap.gap, *tolerance),
                Check::close("rotation_hamiltonian_north_pole_error", sphere_rotation_hamiltonian(0.0)?, 0.5, *tolerance),
            ])
        }
    }
}

fn write_holonomy(out: &mut Artifacts, h: &HolonomyReport) -> Result<()> {
    let text = serde_json::to_string_pretty(h).map_err(|e| Error::Io(e.to_string()))?;
    out.write("holonomy.json", text.as_bytes())
}

/// Sorted catalog of loop generators, fields, diffeomorphisms, tasks and
/// check suites.
pub fn list_generators() -> String {
    const LOOPS: &[(&str, &str)] = &[
        ("circle", "{center=[0,0,0], radius, n}: regular n-gon in a plane z = const"),
        ("ellipse", "{center=[0,0,0], a, b, n}: polygon on the ellipse with semi-axes a, b"),
        ("polyline", "{path}: first loop of an `i,x,y,z` polyline file"),
        ("torus_loop", "{direction: x|y|z, offsets, amplitude=[0,0], n}: loop winding once along an axis of the torus"),
        ("trefoil", "{center=[0,0,0], scale, n}: trefoil knot"),
    ];
    const TASKS: &[(&str, &str)] = &[
        ("cocycle_table", "{tolerances: {antisymmetry, cocycle_identity}}: c(X, Y) over the declared fields"),
        ("flow", "{dt, steps, integrator=rk4|euler, cadence, substeps=1, tolerances}: binormal flow"),
        ("holonomy", "{theta0, filling: north|south, resolution, tolerance, expected_mod_1}: latitude holonomy on the sphere"),
        ("invariants", "{trials, tolerances: {compatibility, gradient, hamiltonian}}: requires seed"),
        ("sphere_example", "{resolution, tolerance}: equator holonomy and rotation Hamiltonian"),
    ];
    let mut out = String::new();
    let mut section = |title: &str, entries: &[(&str, &str)]| {
        let mut sorted = entries.to_vec();
        sorted.sort();
        let _ = writeln!(out, "{title}:");
        for (name, doc) in sorted {
            let _ = writeln!(out, "  {name:<18} {doc}");
        }
    };
    section("loop generators", LOOPS);
    section("fields", catalog::FIELDS);
    section("diffeomorphisms", catalog::DIFFEOS);
    section("tasks", TASKS);
    let described: Vec<(&str, String)> = acceptance::SUITES
        .iter()
        .map(|s| {
            let ids: Vec<String> = acceptance::suite(s).unwrap_or_default().iter().map(|c| c.id.to_string()).collect();
            (*s, format!("criteria {}", ids.join(", ")))
        })
        .collect();
    let suites: Vec<(&str, &str)> = described.iter().map(|(s, d)| (*s, d.as_str())).collect();
    section("suites", &suites);
    out
}

/// Runs a named check suite, one criterion after the other.
pub fn run_suite(name: &str) -> Result<Vec<CriterionOutcome>> {
    let criteria = acceptance::suite(name).ok_or_else(|| Error::Schema(format!("unknown suite `{name}`; known: {}", acceptance::SUITES.join(", "))))?;
    Ok(criteria.iter().map(|c| c.run()).collect())
}
