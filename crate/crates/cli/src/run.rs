//! Subcommand dispatch: run the owning module, emit data files, then the manifest.

use serde_json::{json, Value};

use sonon::bell::{
    audit_experiment, brute_force_lhv_max, chsh, simulate_local_model, CORRELATION_CONVENTION, PAIR_LABELS,
};
use sonon::field::{chi_far_field, far_field_amplitude, far_field_deviation, sonon_field, FieldPoint};
use sonon::pilot::{run_ensemble_with, transmission_report, EnsembleOptions, ScenarioKind};
use sonon::sync::{lock_threshold, tetrahedron_run, triangle_sweep, GeometryStats, TrialOutcome};

use crate::config::{
    AuditParams, BellParams, FieldScanParams, KuramotoExperiment, KuramotoParams, Params, PilotWaveParams, RunConfig,
};
use crate::error::CliError;
use crate::output::{fmt_f64, unix_now, Column, OutputSet, RunManifest};

/// Relative width of the lock-threshold bisection bracket.
const THRESHOLD_REL_TOL: f64 = 1e-3;

pub fn run(config: &RunConfig) -> Result<RunManifest, CliError> {
    let started = unix_now();
    let mut out = OutputSet::create(&config.output_dir)?;
    let results = match &config.params {
        Params::FieldScan(p) => field_scan(p, &mut out)?,
        Params::PilotWave(p) => pilot_wave(p, config.seed, &mut out)?,
        Params::Kuramoto(p) => kuramoto(p, config.seed, &mut out)?,
        Params::Bell(p) => bell(p, config.seed, &mut out)?,
        Params::Audit(p) => audit(p, &mut out)?,
    };
    out.finish(config, started, conventions(), results)
}

fn conventions() -> Value {
    json!({
        "units": "SI for bell and audit; field-scan, pilot-wave and kuramoto use the dimensionless units of their inputs",
        "angles": "degrees in configs and CSV columns ending in _deg, radians internally",
        "correlation": CORRELATION_CONVENTION,
        "floats": "shortest decimal that round-trips to the same binary64 value",
    })
}

fn field_scan(p: &FieldScanParams, out: &mut OutputSet) -> Result<Value, CliError> {
    let mode = p.mode();
    mode.validate()?;
    let polar = p.polar_deg.to_radians();
    let azimuth = p.azimuth_deg.to_radians();
    // The far-field comparison is undefined along directions where its amplitude vanishes.
    let far_field_defined = far_field_amplitude(&mode, polar) > 1e-12 * mode.ring_radius * mode.amplitude.abs();
    let columns: [Column; 6] = [("r", "length"), ("re_xi", "1"), ("im_xi", "1"), ("abs_xi", "1"), ("chi_far", "1/length"), ("rel_dev", "1")];
    let mut rows = Vec::with_capacity(p.samples);
    for i in 0..p.samples {
        let r = p.r_min + (p.r_max - p.r_min) * i as f64 / (p.samples - 1) as f64;
        let xi = sonon_field(&mode, &FieldPoint::spherical(r, polar, azimuth, p.time), p.quad_nodes)?;
        let chi = chi_far_field(r, mode.k_r)?;
        let rel_dev = if far_field_defined {
            fmt_f64(far_field_deviation(&mode, r, polar, azimuth, p.quad_nodes)?.rel_dev)
        } else {
            String::new()
        };
        rows.push(vec![fmt_f64(r), fmt_f64(xi.re()), fmt_f64(xi.im()), fmt_f64(xi.norm()), fmt_f64(chi), rel_dev]);
    }
    out.write_csv("field_scan.csv", &columns, &rows)?;
    Ok(json!({
        "mode": mode,
        "far_field_amplitude": far_field_amplitude(&mode, polar),
        "rel_dev_defined": far_field_defined,
    }))
}

fn pilot_wave(p: &PilotWaveParams, seed: u64, out: &mut OutputSet) -> Result<Value, CliError> {
    let spec = p.scenario_spec()?;
    let options = EnsembleOptions { record_every: p.record_every, bins: p.bins, max_travel_cells: p.max_travel_cells };
    let result = run_ensemble_with(&spec, p.trials, seed, &options)?;

    let mut rows = Vec::new();
    for (id, traj) in result.trajectories.iter().enumerate() {
        for (t, x) in traj.times.iter().zip(&traj.positions) {
            rows.push(vec![id.to_string(), fmt_f64(*t), fmt_f64(x[0])]);
        }
    }
    out.write_csv("trajectories.csv", &[("traj_id", "index"), ("t", "time"), ("x", "length")], &rows)?;

    let rows: Vec<Vec<String>> =
        result.histogram.iter().map(|b| vec![fmt_f64(b.center), b.count.to_string(), fmt_f64(b.psi2)]).collect();
    out.write_csv("histogram.csv", &[("bin_center", "length"), ("count", "count"), ("psi2", "1/length")], &rows)?;

    let rows: Vec<Vec<String>> =
        result.ks_trace.iter().map(|c| vec![fmt_f64(c.time), fmt_f64(c.ks), c.live.to_string()]).collect();
    out.write_csv("ks_trace.csv", &[("t", "time"), ("ks", "1"), ("live", "count")], &rows)?;

    let transmission = match spec.kind {
        ScenarioKind::Barrier { .. } => Some(transmission_report(&result)?),
        _ => None,
    };
    Ok(json!({
        "scenario": spec.label(),
        "spec": spec,
        "seed": seed,
        "dt": spec.dt,
        "grid": spec.grid,
        "trajectories": result.trajectories.len(),
        "aborted": result.aborted,
        "exited": result.exited,
        "absorbed_probability": result.absorbed,
        "final_ks": result.final_ks(),
        "transmission": transmission,
    }))
}

fn outcome_rows(outcomes: &[TrialOutcome], label: impl Fn(f64) -> String) -> Vec<Vec<String>> {
    outcomes
        .iter()
        .map(|o| vec![label(o.geometry), o.trial.to_string(), fmt_f64(o.final_r), o.cluster_count.to_string()])
        .collect()
}

fn summary_csv(out: &mut OutputSet, rel: &str, key: Column, stats: &[GeometryStats], label: impl Fn(f64) -> String) -> Result<(), CliError> {
    const P_COLUMNS: [&str; 4] = ["p_1", "p_2", "p_3", "p_4"];
    let n = stats.first().map_or(0, |s| s.cluster_distribution.len());
    let mut columns: Vec<Column> = vec![key, ("mean_r", "1"), ("std_r", "1")];
    columns.extend(P_COLUMNS[..n].iter().map(|&c| (c, "1")));
    let rows: Vec<Vec<String>> = stats
        .iter()
        .map(|s| {
            let mut row = vec![label(s.geometry), fmt_f64(s.r.mean), fmt_f64(s.r.std)];
            row.extend(s.cluster_distribution.iter().map(|&p| fmt_f64(p)));
            row
        })
        .collect();
    out.write_csv(rel, &columns, &rows)
}

fn kuramoto(p: &KuramotoParams, seed: u64, out: &mut OutputSet) -> Result<Value, CliError> {
    let cfg = p.geometry_config()?;
    match p.experiment {
        KuramotoExperiment::TriangleSweep => {
            let sweep = triangle_sweep(&cfg, &p.angles, seed)?;
            let columns = [("angle_deg", "deg"), ("trial", "index"), ("final_r", "1"), ("cluster_count", "count")];
            out.write_csv("sweep.csv", &columns, &outcome_rows(&sweep.outcomes, fmt_f64))?;
            summary_csv(out, "summary.csv", ("angle_deg", "deg"), &sweep.stats, fmt_f64)?;
            Ok(json!({
                "experiment": "triangle_sweep",
                "normalization": sweep.normalization,
                "cluster_options": cfg.cluster_options(),
                "stats": sweep.stats,
                "effect_90_vs_180": sweep.effect_90_vs_180,
            }))
        }
        KuramotoExperiment::Tetrahedron => {
            let report = tetrahedron_run(&cfg, p.edge, seed)?;
            let name = |g: f64| if g == 0.0 { "tetrahedron".to_string() } else { "square".to_string() };
            let columns = [("geometry", "label"), ("trial", "index"), ("final_r", "1"), ("cluster_count", "count")];
            out.write_csv("tetrahedron.csv", &columns, &outcome_rows(&report.outcomes, name))?;
            summary_csv(out, "summary.csv", ("geometry", "label"), &[report.regular.clone(), report.square.clone()], name)?;
            Ok(json!({
                "experiment": "tetrahedron",
                "normalization": "equal mean pairwise distance",
                "edge": report.edge,
                "square_side": report.square_side,
                "cluster_options": cfg.cluster_options(),
                "regular": report.regular,
                "square": report.square,
                "effect": report.effect,
            }))
        }
        KuramotoExperiment::Threshold => {
            let est = lock_threshold(p.coupling, &cfg.kernel, p.distance, THRESHOLD_REL_TOL)?;
            let columns = [("distance", "length"), ("effective_coupling", "1/time"), ("delta_omega", "1/time"), ("ratio", "1")];
            let rows = vec![vec![fmt_f64(p.distance), fmt_f64(est.effective_coupling), fmt_f64(est.delta_omega), fmt_f64(est.ratio)]];
            out.write_csv("threshold.csv", &columns, &rows)?;
            Ok(json!({ "experiment": "threshold", "rel_tol": THRESHOLD_REL_TOL, "estimate": est }))
        }
    }
}

fn bell(p: &BellParams, seed: u64, out: &mut OutputSet) -> Result<Value, CliError> {
    let model = p.model()?;
    let settings = p.settings();
    let records = simulate_local_model(&model, &settings, p.trials, seed)?;
    let result = chsh(&records, &settings)?;
    let mut rows: Vec<Vec<String>> =
        result.correlations.iter().map(|c| vec![c.pair.to_string(), fmt_f64(c.e), fmt_f64(c.std_error)]).collect();
    rows.push(vec!["S".to_string(), fmt_f64(result.s), fmt_f64(result.s_err)]);
    out.write_csv("chsh.csv", &[("setting_pair", "label"), ("E", "1"), ("stderr", "1")], &rows)?;
    let lhv_bound = brute_force_lhv_max(&settings);
    Ok(json!({
        "model": model.label(),
        "model_spec": model,
        "convention": CORRELATION_CONVENTION,
        "seed": seed,
        "trials_per_pair": p.trials,
        "setting_pairs": PAIR_LABELS,
        "settings_deg": p.settings_deg,
        "s": result.s,
        "s_err": result.s_err,
        "lhv_bound": lhv_bound,
        "excess_over_lhv_in_sigma": (result.s.abs() - lhv_bound) / result.s_err,
    }))
}

/// Lower-case directory name for a preset.
pub fn slug(name: &str) -> String {
    let s: String = name.chars().map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_lowercase() } else { '_' }).collect();
    s.trim_matches('_').to_string()
}

fn audit(p: &AuditParams, out: &mut OutputSet) -> Result<Value, CliError> {
    let mut summary = Vec::new();
    let mut rows = Vec::new();
    for geom in p.geometries()? {
        let report = audit_experiment(&geom, p.speed_m_per_s)?;
        let dir = slug(&geom.name);
        out.write_json(&format!("{dir}/audit.json"), &report)?;
        rows.push(vec![
            geom.name.clone(),
            fmt_f64(report.d_m),
            fmt_f64(report.d_over_c_s),
            fmt_f64(report.d_total_m),
            serde_json::to_value(report.classification).map_or(String::new(), |v| v.as_str().unwrap_or_default().to_string()),
        ]);
        summary.push(json!({ "name": geom.name, "dir": dir, "classification": report.classification }));
    }
    let columns = [("name", "label"), ("d_m", "m"), ("d_over_c_s", "s"), ("d_total_m", "m"), ("classification", "label")];
    out.write_csv("audit_summary.csv", &columns, &rows)?;
    Ok(json!({ "speed_m_per_s": p.speed_m_per_s, "presets": summary }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slugs() {
        assert_eq!(slug("Aspect 1982"), "aspect_1982");
        assert_eq!(slug("weihs1998"), "weihs1998");
    }
}
