//! Light-cone audit of Bell-test geometries: fibre path `D` against straight
//! detector separation `d`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::BellError;

/// Geometry of one Bell test. Lengths in metres, times in seconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentGeometry {
    pub name: String,
    pub source_xyz_m: [f64; 3],
    pub detectors_xyz_m: [[f64; 3]; 2],
    pub path_lengths_m: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub switch_time_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window_s: Option<f64>,
    #[serde(default)]
    pub notes: String,
}

const BUILTIN: [(&str, &str); 4] = [
    ("aspect1982", include_str!("../../presets/aspect1982.json")),
    ("weihs1998", include_str!("../../presets/weihs1998.json")),
    ("tittel1998", include_str!("../../presets/tittel1998.json")),
    ("salart2008", include_str!("../../presets/salart2008.json")),
];

fn euclid(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

impl ExperimentGeometry {
    pub fn from_json(text: &str) -> Result<Self, BellError> {
        let geom: Self = serde_json::from_str(text).map_err(|e| BellError::InvalidGeometry(format!("preset JSON: {e}")))?;
        geom.validate()?;
        Ok(geom)
    }

    pub fn load(path: &Path) -> Result<Self, BellError> {
        let text = std::fs::read_to_string(path).map_err(|e| BellError::InvalidGeometry(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| BellError::InvalidGeometry(format!("{}: {e}", path.display())))
    }

    /// The four shipped presets, in chronological order.
    pub fn builtin() -> Vec<Self> {
        BUILTIN.iter().map(|(_, text)| Self::from_json(text).expect("shipped presets are valid")).collect()
    }

    pub fn builtin_named(name: &str) -> Option<Self> {
        BUILTIN.iter().find(|(n, _)| *n == name).map(|(_, text)| Self::from_json(text).expect("shipped presets are valid"))
    }

    pub fn builtin_names() -> Vec<&'static str> {
        BUILTIN.iter().map(|(n, _)| *n).collect()
    }

    /// Loads every `*.json` file in `dir`, sorted by file name.
    pub fn load_dir(dir: &Path) -> Result<Vec<Self>, BellError> {
        let mut paths: Vec<_> = std::fs::read_dir(dir)
            .map_err(|e| BellError::InvalidGeometry(format!("{}: {e}", dir.display())))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        paths.sort();
        paths.iter().map(|p| Self::load(p)).collect()
    }

    pub fn source_distances(&self) -> [f64; 2] {
        [euclid(self.source_xyz_m, self.detectors_xyz_m[0]), euclid(self.source_xyz_m, self.detectors_xyz_m[1])]
    }

    /// Straight-line detector separation `d`.
    pub fn detector_separation(&self) -> f64 {
        euclid(self.detectors_xyz_m[0], self.detectors_xyz_m[1])
    }

    pub fn validate(&self) -> Result<(), BellError> {
        let bad = |msg: String| Err(BellError::InvalidGeometry(format!("{}: {msg}", self.name)));
        if self.name.trim().is_empty() {
            return Err(BellError::InvalidGeometry("preset name must not be empty".into()));
        }
        let coords = self.source_xyz_m.iter().chain(self.detectors_xyz_m.iter().flatten());
        if coords.chain(&self.path_lengths_m).any(|v| !v.is_finite()) {
            return bad("coordinates and path lengths must be finite".into());
        }
        for (i, (&path, straight)) in self.path_lengths_m.iter().zip(self.source_distances()).enumerate() {
            if path < straight * (1.0 - 1e-9) {
                return bad(format!("path {} ({path} m) is shorter than the straight line ({straight} m)", i + 1));
            }
        }
        for (label, t) in [("switch_time_s", self.switch_time_s), ("window_s", self.window_s)] {
            if let Some(t) = t {
                if !(t >= 0.0 && t.is_finite()) {
                    return bad(format!("{label} must be non-negative, got {t}"));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LoopholeClass {
    ChiLoopholeOpen,
    ChiLoopholeClosed,
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowComparison {
    pub label: String,
    pub window_s: f64,
    pub d_over_c_s: f64,
    /// Light along the straight line `d` arrives within the window.
    pub light_connects: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub name: String,
    pub source_detector_distances_m: [f64; 2],
    pub path_lengths_m: [f64; 2],
    pub d_total_m: f64,
    pub d_total_over_c_s: f64,
    pub d_m: f64,
    pub d_over_c_s: f64,
    pub comparisons: Vec<WindowComparison>,
    pub classification: LoopholeClass,
    /// Carrier amplitude at `d` relative to its value at 1 m (`1/d` envelope).
    /// No cutoff is implied.
    pub relative_chi_amplitude_at_d: Option<f64>,
    pub facts: Vec<String>,
    pub notes: String,
}

/// Formats a length with up to four significant digits.
pub fn format_length(m: f64) -> String {
    if m == 0.0 {
        "0".to_string()
    } else if m.abs() >= 1000.0 {
        format!("{} km", sig4(m / 1000.0))
    } else {
        format!("{} m", sig4(m))
    }
}

/// Formats a duration with up to four significant digits.
pub fn format_duration(s: f64) -> String {
    let a = s.abs();
    if a == 0.0 {
        "0 s".to_string()
    } else if a < 1e-6 {
        format!("{} ns", sig4(s * 1e9))
    } else if a < 1e-3 {
        format!("{} µs", sig4(s * 1e6))
    } else if a < 1.0 {
        format!("{} ms", sig4(s * 1e3))
    } else {
        format!("{} s", sig4(s))
    }
}

fn sig4(v: f64) -> String {
    let digits = (3 - v.abs().log10().floor() as i32).max(0) as usize;
    let s = format!("{v:.digits$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Classifies the geometry: `d = 0` leaves the loophole open; otherwise it is
/// closed only if every provided timing window is shorter than `d/c`, and
/// indeterminate when no timing is given.
pub fn audit_experiment(geom: &ExperimentGeometry, c: f64) -> Result<AuditReport, BellError> {
    geom.validate()?;
    if !(c > 0.0 && c.is_finite()) {
        return Err(BellError::InvalidParameter(format!("speed must be positive, got {c}")));
    }
    let distances = geom.source_distances();
    let d = geom.detector_separation();
    let d_total = geom.path_lengths_m[0] + geom.path_lengths_m[1];
    let d_over_c = d / c;
    let d_total_over_c = d_total / c;

    let comparisons: Vec<WindowComparison> = [("setting switch time", geom.switch_time_s), ("measurement window", geom.window_s)]
        .into_iter()
        .filter_map(|(label, w)| {
            w.map(|w| WindowComparison { label: label.to_string(), window_s: w, d_over_c_s: d_over_c, light_connects: w >= d_over_c })
        })
        .collect();
    let classification = if d == 0.0 {
        LoopholeClass::ChiLoopholeOpen
    } else if comparisons.is_empty() {
        LoopholeClass::Indeterminate
    } else if comparisons.iter().all(|c| !c.light_connects) {
        LoopholeClass::ChiLoopholeClosed
    } else {
        LoopholeClass::ChiLoopholeOpen
    };

    let mut facts = vec![
        format!("detector separation d = {}", format_length(d)),
        format!("d/c = {}", format_duration(d_over_c)),
        format!(
            "source-detector distances {} and {}",
            format_length(distances[0]),
            format_length(distances[1])
        ),
        format!(
            "path lengths {} and {} (total D = {})",
            format_length(geom.path_lengths_m[0]),
            format_length(geom.path_lengths_m[1]),
            format_length(d_total)
        ),
    ];
    if let Some(sw) = geom.switch_time_s {
        facts.push(format!("setting switch time {} vs photon path L/c = {}", format_duration(sw), format_duration(d_total_over_c)));
    }
    for c in &comparisons {
        facts.push(format!(
            "{} {} {} d/c = {}",
            c.label,
            format_duration(c.window_s),
            if c.light_connects { "≥" } else { "<" },
            format_duration(c.d_over_c_s)
        ));
    }
    if d == 0.0 {
        facts.push("single receiver: d = 0, so no spacelike separation of the measurements".to_string());
    } else if comparisons.is_empty() {
        facts.push("no timing window available; classification indeterminate".to_string());
    }

    Ok(AuditReport {
        name: geom.name.clone(),
        source_detector_distances_m: distances,
        path_lengths_m: geom.path_lengths_m,
        d_total_m: d_total,
        d_total_over_c_s: d_total_over_c,
        d_m: d,
        d_over_c_s: d_over_c,
        comparisons,
        classification,
        relative_chi_amplitude_at_d: (d > 0.0).then(|| 1.0 / d),
        facts,
        notes: geom.notes.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell::SPEED_OF_LIGHT;

    #[test]
    fn formatting() {
        assert_eq!(format_length(4500.0), "4.5 km");
        assert_eq!(format_length(7300.000067), "7.3 km");
        assert_eq!(format_length(400.0), "400 m");
        assert_eq!(format_length(18000.0), "18 km");
        assert_eq!(format_length(0.0), "0");
        assert_eq!(format_duration(1e-8), "10 ns");
        assert_eq!(format_duration(4.0e-8), "40 ns");
        assert_eq!(format_duration(1.3342563807926082e-6), "1.334 µs");
    }

    #[test]
    fn builtin_presets_load() {
        let all = ExperimentGeometry::builtin();
        assert_eq!(all.len(), 4);
        for g in &all {
            assert_eq!(ExperimentGeometry::builtin_named(&g.name).as_ref(), Some(g));
        }
    }

    #[test]
    fn aspect_is_open() {
        let r = audit_experiment(&ExperimentGeometry::builtin_named("aspect1982").unwrap(), SPEED_OF_LIGHT).unwrap();
        assert_eq!(r.d_m, 0.0);
        assert_eq!(r.classification, LoopholeClass::ChiLoopholeOpen);
        assert!((r.d_total_over_c_s - 4e-8).abs() < 1e-17);
        assert_eq!(r.comparisons.len(), 2);
    }

    #[test]
    fn weihs_is_indeterminate() {
        let r = audit_experiment(&ExperimentGeometry::builtin_named("weihs1998").unwrap(), SPEED_OF_LIGHT).unwrap();
        assert_eq!(r.d_m, 400.0);
        // 400 / 299792458, evaluated in 30-digit arithmetic.
        assert!((r.d_over_c_s / 1.334_256_380_792_608_198_3e-6 - 1.0).abs() < 1e-15);
        assert_eq!(r.classification, LoopholeClass::Indeterminate);
    }

    #[test]
    fn timing_decides_when_present() {
        let mut g = ExperimentGeometry::builtin_named("weihs1998").unwrap();
        g.window_s = Some(1e-6);
        let closed = audit_experiment(&g, SPEED_OF_LIGHT).unwrap();
        assert_eq!(closed.classification, LoopholeClass::ChiLoopholeClosed);
        g.switch_time_s = Some(2e-6);
        assert_eq!(audit_experiment(&g, SPEED_OF_LIGHT).unwrap().classification, LoopholeClass::ChiLoopholeOpen);
    }

    #[test]
    fn audit_is_pure() {
        let g = ExperimentGeometry::builtin_named("tittel1998").unwrap();
        assert_eq!(audit_experiment(&g, SPEED_OF_LIGHT).unwrap(), audit_experiment(&g, SPEED_OF_LIGHT).unwrap());
    }

    #[test]
    fn rejects_short_paths_and_unknown_keys() {
        let mut g = ExperimentGeometry::builtin_named("salart2008").unwrap();
        g.path_lengths_m[0] = 100.0;
        assert!(g.validate().is_err());
        let text = r#"{"name":"x","source_xyz_m":[0,0,0],"detectors_xyz_m":[[1,0,0],[2,0,0]],"path_lengths_m":[1,2],"extra":1}"#;
        assert!(ExperimentGeometry::from_json(text).is_err());
    }
}
