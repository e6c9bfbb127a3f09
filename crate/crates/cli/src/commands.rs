//! `run`, `verify` and `star`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::json;

use qgraph::channel::CptpReport;
use qgraph::composer::{round_trip_norm, star, star_via_series, star_via_transfer, Wiring};
use qgraph::numerics::max_abs;
use qgraph::physics::{
    barrier_smatrix, double_barrier_graph, double_barrier_m, energy_sweep, loss_smatrix, pipeline_residual,
    single_barrier_graph, single_barrier_m, translated_barrier, BarrierParams, SweepRow, CROSS_CHECK_STRIDE,
};
use qgraph::smatrix::{distance, Group};
use qgraph::{Error, ErasureChannel, QuantumGraph, ScatteringMatrix};

use crate::error::{CliError, Result};
use crate::format::{flag, sci, sci12};
use crate::scenario::{GraphScenario, Grid, Scenario, ScenarioKind, StarScenario, SweepScenario};
use crate::svg::{self, Heatmap, LinePlot, Series};

const PIPELINE_TOL: f64 = 1e-9;
const LOCAL_UNITARITY_TOL: f64 = 1e-9;
const GLOBAL_UNITARITY_TOL: f64 = 1e-9;
const ROUTE_TOL: f64 = 1e-9;
const COMPLETENESS_TOL: f64 = 1e-10;
const NEGATIVITY_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-12;
/// Input matrices handed to the CLI must be unitary to this level.
const INPUT_UNITARITY_TOL: f64 = 1e-8;
/// Round trips slower than this are too slow for the series check.
const SERIES_NORM_CAP: f64 = 0.99;
const SERIES_TERMS: usize = 100_000;
const SERIES_TOL: f64 = 1e-14;
/// Energy points of the (energy, ε) map when the scenario gives none.
const MAP_POINTS: usize = 400;

#[derive(Debug, Clone, Default)]
pub struct Options {
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
enum Bound {
    Below(f64),
    Above(f64),
}

#[derive(Debug, Clone, PartialEq)]
struct Check {
    name: String,
    value: f64,
    bound: Bound,
}

impl Check {
    fn passed(&self) -> bool {
        match self.bound {
            Bound::Below(tol) => self.value <= tol,
            Bound::Above(floor) => self.value >= floor,
        }
    }
}

/// Residuals of a verification pass, plus informational lines.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    checks: Vec<Check>,
    notes: Vec<String>,
}

impl Report {
    fn at_most(&mut self, name: &str, value: f64, tol: f64) {
        self.checks.push(Check { name: name.into(), value, bound: Bound::Below(tol) });
    }

    fn at_least(&mut self, name: &str, value: f64, floor: f64) {
        self.checks.push(Check { name: name.into(), value, bound: Bound::Above(floor) });
    }

    fn note(&mut self, line: impl Into<String>) {
        self.notes.push(line.into());
    }

    fn cptp(&mut self, prefix: &str, r: &CptpReport) {
        self.at_most(&format!("{prefix} Kraus completeness"), r.kraus_completeness, COMPLETENESS_TOL);
        self.at_least(&format!("{prefix} Choi min eigenvalue"), r.choi_min_eigenvalue, -NEGATIVITY_TOL);
        self.at_most(&format!("{prefix} Choi trace deviation"), r.trace_deviation, TRACE_TOL);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.passed()).map(|c| c.name.as_str()).collect()
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let (rel, limit) = match c.bound {
                Bound::Below(t) => ("<=", t),
                Bound::Above(t) => (">=", t),
            };
            let status = if c.passed() { "ok" } else { "FAIL" };
            let _ = writeln!(s, "{:<40} {:>10}  ({rel} {})  {status}", c.name, sci(c.value, 3), sci(limit, 0));
        }
        for n in &self.notes {
            let _ = writeln!(s, "{n}");
        }
        s
    }

    fn into_result(self) -> Result<Report> {
        if self.passed() {
            Ok(self)
        } else {
            Err(CliError::Numerical(format!(
                "verification failed: {}",
                self.failures().join(", ")
            )))
        }
    }
}

/// Runs the scenario's cross-checks. The report is printed in full and an
/// error returned if any residual is out of bounds.
pub fn verify(path: &Path) -> Result<Report> {
    let scenario = Scenario::load(path)?;
    let report = verify_scenario(&scenario)?;
    print!("{}", report.render());
    report.into_result()
}

fn verify_scenario(scenario: &Scenario) -> Result<Report> {
    match &scenario.kind {
        ScenarioKind::BarrierSweep(s) => verify_sweep(s),
        ScenarioKind::GraphContract(g) => verify_graph(g, &scenario.base_dir),
        ScenarioKind::StarDemo(s) => verify_star(s, &scenario.base_dir),
    }
}

/// Verifies, then writes the scenario's outputs. Returns the files written.
pub fn run(path: &Path, opts: &Options) -> Result<Vec<PathBuf>> {
    let scenario = Scenario::load(path)?;
    let report = verify_scenario(&scenario)?;
    print!("{}", report.render());
    report.into_result()?;

    let out = opts
        .out
        .clone()
        .or_else(|| scenario.output.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    fs::create_dir_all(&out).map_err(|e| CliError::Input(format!("cannot create {}: {e}", out.display())))?;

    let files = match &scenario.kind {
        ScenarioKind::BarrierSweep(s) => emit_sweep(s, &scenario.name)?,
        ScenarioKind::GraphContract(g) => emit_graph(g, &scenario.base_dir, &scenario.name)?,
        ScenarioKind::StarDemo(s) => emit_star(s, &scenario.base_dir, &scenario.name)?,
    };
    let mut written = Vec::with_capacity(files.len());
    for (file, contents) in files {
        let target = out.join(file);
        fs::write(&target, contents)?;
        println!("wrote {}", target.display());
        written.push(target);
    }
    Ok(written)
}

/// `star A B wiring`: `A` is the first scatterer, `B` the second; prints
/// the composed matrix as JSON.
pub fn star_files(a: &Path, b: &Path, wiring: &Path) -> Result<String> {
    let s1: ScatteringMatrix = crate::scenario::load_json(a)?;
    let s2: ScatteringMatrix = crate::scenario::load_json(b)?;
    let w: Wiring = crate::scenario::load_json(wiring)?;
    for (s, p) in [(&s1, a), (&s2, b)] {
        let defect = s.unitarity_defect();
        if defect > INPUT_UNITARITY_TOL {
            return Err(CliError::Numerical(format!(
                "{}: matrix is not unitary (defect {defect:.3e})",
                p.display()
            )));
        }
    }
    let s = star(&s2, &s1, &w)?;
    Ok(serde_json::to_string_pretty(&s).expect("matrix serializes"))
}

// ---- barrier sweeps ----

#[derive(Debug, Clone, Copy, Default)]
struct SweepSample {
    pipeline: f64,
    local: f64,
    global: f64,
    series: Option<f64>,
    completeness: f64,
    choi_min: f64,
    trace: f64,
}

impl SweepSample {
    fn merge(self, o: SweepSample) -> SweepSample {
        SweepSample {
            pipeline: self.pipeline.max(o.pipeline),
            local: self.local.max(o.local),
            global: self.global.max(o.global),
            series: match (self.series, o.series) {
                (Some(a), Some(b)) => Some(a.max(b)),
                (a, b) => a.or(b),
            },
            completeness: self.completeness.max(o.completeness),
            choi_min: self.choi_min.min(o.choi_min),
            trace: self.trace.max(o.trace),
        }
    }
}

/// Barrier followed by the loss element, with the loss line slot left
/// dangling; the translated barrier then closes the cavity through it.
fn cavity_pair(p: &BarrierParams) -> Result<(ScatteringMatrix, ScatteringMatrix, Wiring)> {
    let s1 = barrier_smatrix(p)?;
    let s2 = translated_barrier(&s1, p)?;
    let front = Wiring { s1_to_s2: vec![(1, 0)], s2_to_s1: vec![(0, 1)] };
    let x = star(&loss_smatrix(p.eta)?, &s1, &front)?;
    let back = Wiring { s1_to_s2: vec![(3, 0)], s2_to_s1: vec![(0, 3)] };
    Ok((s2, x, back))
}

fn sample_point(p: &BarrierParams) -> Result<SweepSample> {
    let s1 = barrier_smatrix(p)?;
    let s2 = translated_barrier(&s1, p)?;
    let local = [s1.unitarity_defect(), s2.unitarity_defect(), loss_smatrix(p.eta)?.unitarity_defect()]
        .into_iter()
        .fold(0.0, f64::max);
    let global = single_barrier_graph(p)?
        .contract()?
        .unitarity_defect()
        .max(double_barrier_graph(p)?.contract()?.unitarity_defect());

    let (b, x, w) = cavity_pair(p)?;
    let series = if round_trip_norm(&b, &x, &w)? <= SERIES_NORM_CAP {
        let via_series = star_via_series(&b, &x, &w, SERIES_TERMS, SERIES_TOL)?;
        Some(distance(&star(&b, &x, &w)?, &via_series))
    } else {
        None
    };

    let mut sample = SweepSample { pipeline: pipeline_residual(p)?, local, global, series, choi_min: f64::INFINITY, ..Default::default() };
    for pair in [single_barrier_m(p)?, double_barrier_m(p)?] {
        let r = ErasureChannel::new(pair.operator())?.cptp_report();
        sample.completeness = sample.completeness.max(r.kraus_completeness);
        sample.choi_min = sample.choi_min.min(r.choi_min_eigenvalue);
        sample.trace = sample.trace.max(r.trace_deviation);
    }
    Ok(sample)
}

fn verify_sweep(s: &SweepScenario) -> Result<Report> {
    let mut epsilons = vec![s.params.epsilon];
    if let Some(g) = &s.epsilon_grid {
        epsilons.extend([g.start, g.stop]);
    }
    let energies: Vec<f64> = s.grid.values()?.into_iter().step_by(CROSS_CHECK_STRIDE).collect();
    let points: Vec<BarrierParams> = epsilons
        .iter()
        .flat_map(|&eps| {
            let base = BarrierParams { epsilon: eps, ..s.params.at(0.0) };
            energies.iter().map(move |&e| base.with_energy(e))
        })
        .collect();
    let samples = points.par_iter().map(sample_point).collect::<Result<Vec<_>>>()?;
    let series_points = samples.iter().filter(|x| x.series.is_some()).count();
    let all = samples.into_iter().reduce(SweepSample::merge).expect("grid is non-empty");

    let mut r = Report::default();
    r.at_most("closed form vs graph contraction", all.pipeline, PIPELINE_TOL);
    r.at_most("local unitarity", all.local, LOCAL_UNITARITY_TOL);
    r.at_most("global unitarity", all.global, GLOBAL_UNITARITY_TOL);
    match all.series {
        Some(v) => r.at_most("star vs series", v, ROUTE_TOL),
        None => r.note("star vs series: round trip too close to 1 at every sample, skipped"),
    }
    r.at_most("channel Kraus completeness", all.completeness, COMPLETENESS_TOL);
    r.at_least("channel Choi min eigenvalue", all.choi_min, -NEGATIVITY_TOL);
    r.at_most("channel Choi trace deviation", all.trace, TRACE_TOL);
    r.note(format!(
        "{} sample points ({} with a convergent series)",
        points.len(),
        series_points
    ));
    Ok(r)
}

fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from(
        "E_over_V0,p_up_single,p_dn_single,p_up_double,p_dn_double,q_low_single,q_up_single,q_low_double,q_up_double,superactivated\n",
    );
    for row in rows {
        let (su, sd) = row.single.probabilities();
        let (du, dd) = row.double.probabilities();
        let fields = [
            row.energy_ratio,
            su,
            sd,
            du,
            dd,
            row.single_bounds.q_low,
            row.single_bounds.q_up,
            row.double_bounds.q_low,
            row.double_bounds.q_up,
        ];
        for x in fields {
            s.push_str(&sci12(x));
            s.push(',');
        }
        s.push_str(flag(row.superactivated));
        s.push('\n');
    }
    s
}

/// Maximal runs of superactivated rows as energy intervals.
fn superactivation_windows(rows: &[SweepRow]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut start: Option<f64> = None;
    let mut last = 0.0;
    for row in rows {
        match (row.superactivated, start) {
            (true, None) => start = Some(row.energy_ratio),
            (false, Some(s0)) => {
                out.push((s0, last));
                start = None;
            }
            _ => {}
        }
        last = row.energy_ratio;
    }
    if let Some(s0) = start {
        out.push((s0, last));
    }
    out
}

fn transmission_svg(rows: &[SweepRow], grid: &Grid, title: &str) -> String {
    let pick = |f: &dyn Fn(&SweepRow) -> f64| rows.iter().map(|r| (r.energy_ratio, f(r))).collect();
    svg::line_plot(&LinePlot {
        title,
        x_label: "E / V0",
        y_label: "transmission probability",
        x_range: (grid.start, grid.stop),
        y_range: (0.0, 1.0),
        series: vec![
            Series { name: "double, up", color: "#1f77b4", dashed: false, points: pick(&|r| r.double.probabilities().0) },
            Series { name: "double, down", color: "#d62728", dashed: false, points: pick(&|r| r.double.probabilities().1) },
            Series { name: "single, up", color: "#1f77b4", dashed: true, points: pick(&|r| r.single.probabilities().0) },
            Series { name: "single, down", color: "#d62728", dashed: true, points: pick(&|r| r.single.probabilities().1) },
        ],
        bands: Vec::new(),
        band_label: "",
    })
}

fn capacity_svg(rows: &[SweepRow], grid: &Grid, title: &str) -> String {
    let pick = |f: &dyn Fn(&SweepRow) -> f64| rows.iter().map(|r| (r.energy_ratio, f(r))).collect();
    svg::line_plot(&LinePlot {
        title,
        x_label: "E / V0",
        y_label: "quantum capacity bound (qubits)",
        x_range: (grid.start, grid.stop),
        y_range: (0.0, 1.0),
        series: vec![
            Series { name: "double, lower", color: "#2ca02c", dashed: false, points: pick(&|r| r.double_bounds.q_low) },
            Series { name: "double, upper", color: "#2ca02c", dashed: true, points: pick(&|r| r.double_bounds.q_up) },
            Series { name: "single, upper", color: "#9467bd", dashed: true, points: pick(&|r| r.single_bounds.q_up) },
        ],
        bands: superactivation_windows(rows),
        band_label: "superactivation",
    })
}

fn emit_sweep(s: &SweepScenario, name: &str) -> Result<Vec<(String, String)>> {
    let grid = s.grid.values()?;
    let rows = energy_sweep(&s.params.at(grid[0]), &grid)?;
    let windows = superactivation_windows(&rows);
    log::info!("{name}: {} energies, {} superactivation windows", rows.len(), windows.len());

    let label = format!("eta = {}, epsilon = {}", s.params.eta, s.params.epsilon);
    let mut files = vec![
        (format!("{name}.csv"), sweep_csv(&rows)),
        (
            format!("{name}_transmission.svg"),
            transmission_svg(&rows, &s.grid, &format!("Transmission ({label})")),
        ),
        (
            format!("{name}_capacity.svg"),
            capacity_svg(&rows, &s.grid, &format!("Capacity bounds ({label})")),
        ),
    ];
    if let Some(eps_grid) = &s.epsilon_grid {
        files.extend(emit_map(s, eps_grid, name)?);
    }
    Ok(files)
}

/// `max(0, q_low(double) − q_up(single))` over an (energy, ε) grid.
fn emit_map(s: &SweepScenario, eps_grid: &Grid, name: &str) -> Result<Vec<(String, String)>> {
    let map_grid = s.map_grid.unwrap_or(Grid { points: MAP_POINTS, ..s.grid });
    let energies = map_grid.values()?;
    let epsilons = eps_grid.values()?;
    let mut csv = String::from("epsilon,E_over_V0,q_low_double,q_up_single,advantage,superactivated\n");
    let mut values = Vec::with_capacity(energies.len() * epsilons.len());
    for &eps in &epsilons {
        let base = BarrierParams { epsilon: eps, ..s.params.at(energies[0]) };
        for row in energy_sweep(&base, &energies)? {
            let advantage = (row.double_bounds.q_low - row.single_bounds.q_up).max(0.0);
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{}",
                sci12(eps),
                sci12(row.energy_ratio),
                sci12(row.double_bounds.q_low),
                sci12(row.single_bounds.q_up),
                sci12(advantage),
                flag(row.superactivated)
            );
            values.push(advantage);
        }
    }
    let title = format!("Certified capacity advantage (eta = {})", s.params.eta);
    let svg = svg::heatmap(&Heatmap {
        title: &title,
        x_label: "E / V0",
        y_label: "epsilon",
        xs: &energies,
        ys: &epsilons,
        values: &values,
        value_range: (0.0, 1.0),
    });
    Ok(vec![(format!("{name}_map.csv"), csv), (format!("{name}_map.svg"), svg)])
}

// ---- graphs ----

fn load_graph(g: &GraphScenario, base: &Path) -> Result<QuantumGraph> {
    let graph = g.graph.load(base)?;
    graph.validate()?;
    let n = graph.port_count();
    if g.input_port > n || g.output_port > n {
        return Err(CliError::Input(format!("graph has {n} ports")));
    }
    Ok(graph)
}

/// Merge list folding all vertices into the largest id, descending.
fn descending_order(graph: &QuantumGraph) -> Vec<(usize, usize)> {
    let mut ids: Vec<usize> = graph.vertices.iter().map(|v| v.id).collect();
    ids.sort_unstable_by(|a, b| b.cmp(a));
    ids.iter().skip(1).map(|&b| (ids[0], b)).collect()
}

fn verify_graph(g: &GraphScenario, base: &Path) -> Result<Report> {
    let graph = load_graph(g, base)?;
    let mut r = Report::default();
    let local = graph.vertices.iter().map(|v| v.smatrix.unitarity_defect()).fold(0.0, f64::max);
    r.at_most("local unitarity", local, INPUT_UNITARITY_TOL);
    if !r.passed() {
        return Ok(r);
    }

    let s_g = graph.contract()?;
    r.at_most("global unitarity", s_g.unitarity_defect(), GLOBAL_UNITARITY_TOL);
    let reversed = graph.contract_with_order(&descending_order(&graph))?;
    r.at_most("order independence (reversed)", distance(&s_g, &reversed), GLOBAL_UNITARITY_TOL);
    if !g.order.is_empty() {
        let custom = graph.contract_with_order(&g.order)?;
        r.at_most("order independence (scenario order)", distance(&s_g, &custom), GLOBAL_UNITARITY_TOL);
    }

    let channel = ErasureChannel::from_scattering(&s_g, g.input_port, g.output_port)?;
    r.cptp("channel", &channel.cptp_report());
    let bounds = qgraph::capacity_bounds(channel.m_op(), channel.dim());
    match bounds {
        Ok(b) => r.note(format!(
            "port {} -> {}: p in [{}, {}], Q in [{}, {}]",
            g.input_port,
            g.output_port,
            sci12(b.p_min()),
            sci12(b.p_max()),
            sci12(b.q_low),
            sci12(b.q_up)
        )),
        Err(Error::InvalidInput(_)) => r.note("capacity bounds need d >= 2"),
        Err(e) => return Err(e.into()),
    }
    Ok(r)
}

fn emit_graph(g: &GraphScenario, base: &Path, name: &str) -> Result<Vec<(String, String)>> {
    let graph = load_graph(g, base)?;
    let s_g = if g.order.is_empty() { graph.contract()? } else { graph.contract_with_order(&g.order)? };
    let channel = ErasureChannel::from_scattering(&s_g, g.input_port, g.output_port)?;
    let mut summary = json!({
        "input_port": g.input_port,
        "output_port": g.output_port,
        "channel": &channel,
    });
    if channel.dim() >= 2 {
        let b = qgraph::capacity_bounds(channel.m_op(), channel.dim())?;
        summary["p"] = json!(b.p);
        summary["q_low"] = json!(b.q_low);
        summary["q_up"] = json!(b.q_up);
    }
    Ok(vec![
        (format!("{name}_sg.json"), serde_json::to_string_pretty(&s_g).expect("serializes") + "\n"),
        (format!("{name}_channel.json"), serde_json::to_string_pretty(&summary).expect("serializes") + "\n"),
    ])
}

// ---- star demo ----

fn load_star(s: &StarScenario, base: &Path) -> Result<(ScatteringMatrix, ScatteringMatrix, Wiring)> {
    let s1 = s.s1.load(base)?;
    let s2 = s.s2.load(base)?;
    let w = match &s.wiring {
        Some(w) => w.load(base)?,
        None => Wiring::cascade(s1.spec(), s2.spec())?,
    };
    w.validate(s1.spec(), s2.spec())?;
    Ok((s1, s2, w))
}

fn complex(z: qgraph::numerics::Complex64) -> String {
    format!("{}{}{}i", sci12(z.re), if z.im.is_sign_negative() { "" } else { "+" }, sci12(z.im))
}

fn verify_star(s: &StarScenario, base: &Path) -> Result<Report> {
    let (s1, s2, w) = load_star(s, base)?;
    let mut r = Report::default();
    r.at_most("local unitarity", s1.unitarity_defect().max(s2.unitarity_defect()), INPUT_UNITARITY_TOL);
    if !r.passed() {
        return Ok(r);
    }

    let composed = star(&s2, &s1, &w)?;
    r.at_most("star unitarity", composed.unitarity_defect(), GLOBAL_UNITARITY_TOL);
    let norm = round_trip_norm(&s2, &s1, &w)?;
    if norm < 1.0 {
        let series = star_via_series(&s2, &s1, &w, SERIES_TERMS, SERIES_TOL)?;
        r.at_most("star vs series", distance(&composed, &series), ROUTE_TOL);
    } else {
        r.note(format!("star vs series: round-trip norm {norm:.6} >= 1, skipped"));
    }
    let is_cascade = Wiring::cascade(s1.spec(), s2.spec()).is_ok_and(|c| c == w);
    if is_cascade && s1.spec() == s2.spec() && s1.spec().is_homogeneous() {
        match star_via_transfer(&s2, &s1) {
            Ok(t) => r.at_most("star vs transfer", distance(&composed, &t), ROUTE_TOL),
            Err(Error::ConversionUnavailable(why)) => r.note(format!("star vs transfer: skipped ({why})")),
            Err(e) => return Err(e.into()),
        }
    }

    let spec = composed.spec();
    if spec.left_in > 0 && spec.right_out > 0 {
        let t = composed.block(Group::Right, Group::Left);
        for i in 0..t.nrows() {
            for j in 0..t.ncols() {
                r.note(format!("transmission[{i},{j}] = {}", complex(t[(i, j)])));
            }
        }
        r.note(format!("max |transmission| = {}", sci12(max_abs(&t))));
    }
    Ok(r)
}

fn emit_star(s: &StarScenario, base: &Path, name: &str) -> Result<Vec<(String, String)>> {
    let (s1, s2, w) = load_star(s, base)?;
    let composed = star(&s2, &s1, &w)?;
    Ok(vec![(
        format!("{name}_star.json"),
        serde_json::to_string_pretty(&composed).expect("serializes") + "\n",
    )])
}

#[cfg(test)]
mod tests {
    use super::*;
    use qgraph::physics::BarrierParams;

    #[test]
    fn windows_are_maximal_runs() {
        let p = BarrierParams::reference(0.5, 0.0, 0.1);
        let base = SweepRow::evaluate(&p).unwrap();
        let rows: Vec<SweepRow> = [false, true, true, false, true]
            .iter()
            .enumerate()
            .map(|(i, &sa)| SweepRow { energy_ratio: i as f64, superactivated: sa, ..base.clone() })
            .collect();
        assert_eq!(superactivation_windows(&rows), vec![(1.0, 2.0), (4.0, 4.0)]);
        assert!(superactivation_windows(&rows[..1]).is_empty());
    }

    #[test]
    fn csv_has_fixed_columns() {
        let row = SweepRow::evaluate(&BarrierParams::reference(0.5, 0.1, 0.1)).unwrap();
        let csv = sweep_csv(&[row]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0].split(',').count(), 10);
        assert_eq!(lines[1].split(',').count(), 10);
        assert!(lines[1].starts_with("5.000000000000e-01,"));
        assert!(lines[1].ends_with(",0") || lines[1].ends_with(",1"));
    }

    #[test]
    fn sweep_samples_pass() {
        let p = BarrierParams::reference(0.37, 0.1, 0.1);
        let s = sample_point(&p).unwrap();
        assert!(s.pipeline < PIPELINE_TOL && s.global < GLOBAL_UNITARITY_TOL);
        assert!(s.series.unwrap() < ROUTE_TOL);
    }

    #[test]
    fn report_flags_failures() {
        let mut r = Report::default();
        r.at_most("a", 1e-12, 1e-9);
        r.at_least("b", -1.0, -1e-10);
        assert!(!r.passed());
        assert_eq!(r.failures(), vec!["b"]);
        assert!(r.render().contains("FAIL"));
    }
}
