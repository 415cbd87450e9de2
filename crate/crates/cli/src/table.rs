// Copyright 2026 HybridSim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Tabular results with provenance headers, rendered as CSV or
//! gnuplot-ready text.
//!
//! Every emitted artifact carries three comment lines — engine version,
//! SHA-256 of the effective config, and the unit convention — so a plot can
//! always be traced back to the exact inputs that produced it. Rendering is
//! deterministic: identical config and seed produce byte-identical bodies.

use sha2::{Digest, Sha256};

use crate::config::ScenarioConfig;

/// Provenance recorded at the top of every output artifact.
#[derive(Debug, Clone)]
pub struct Provenance {
    pub engine_version: String,
    pub config_sha256: String,
    pub units: String,
}

impl Provenance {
    pub fn for_config(config: &ScenarioConfig) -> Self {
        Self {
            engine_version: format!("hybridsim {}", env!("CARGO_PKG_VERSION")),
            config_sha256: config_digest(config),
            units: "hbar=1, energy=mu|B|".to_string(),
        }
    }

    fn comment_lines(&self) -> [String; 3] {
        [
            format!("# engine-version: {}", self.engine_version),
            format!("# config-sha256: {}", self.config_sha256),
            format!("# units: {}", self.units),
        ]
    }
}

/// SHA-256 of the canonical (execution-fields-masked) config JSON.
pub fn config_digest(config: &ScenarioConfig) -> String {
    let mut hasher = Sha256::new();
    hasher.update(config.canonical_json().as_bytes());
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// A rectangular table of finite floats with named columns.
#[derive(Debug, Clone)]
pub struct ResultTable {
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
    provenance: Provenance,
}

impl ResultTable {
    pub fn new(columns: &[&str], provenance: Provenance) -> Self {
        Self {
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            provenance,
        }
    }

    /// Append one row. Panics on width mismatch or non-finite entries:
    /// both indicate a scenario bug, not bad user input, and a NaN that
    /// reached the artifact would poison every downstream plot silently.
    pub fn push_row(&mut self, row: Vec<f64>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row width {} != column count {}",
            row.len(),
            self.columns.len()
        );
        assert!(
            row.iter().all(|x| x.is_finite()),
            "non-finite value in result row {row:?}"
        );
        self.rows.push(row);
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Full CSV artifact: provenance comments, header row, data rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for line in self.provenance.comment_lines() {
            out.push_str(&line);
            out.push('\n');
        }
        out.push_str(&self.csv_body());
        out
    }

    /// Full gnuplot artifact: provenance comments, a `# columns:` line,
    /// space-separated data rows (plottable directly with `using`).
    pub fn to_gnuplot(&self) -> String {
        let mut out = String::new();
        for line in self.provenance.comment_lines() {
            out.push_str(&line);
            out.push('\n');
        }
        out.push_str(&self.gnuplot_body());
        out
    }

    /// CSV minus the provenance comments; the determinism contract is on
    /// this part (provenance is deterministic too, but the body is what a
    /// reader diffs).
    pub fn csv_body(&self) -> String {
        let mut out = String::new();
        let header: Vec<String> = self.columns.iter().map(|c| csv_escape(c)).collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&x| format_float(x)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn gnuplot_body(&self) -> String {
        let mut out = String::new();
        out.push_str("# columns: ");
        out.push_str(&self.columns.join(" "));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&x| format_float(x)).collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
        out
    }
}

/// Quote a CSV field if it contains a delimiter, quote, or newline
/// (RFC 4180). Column names are the only string cells we emit.
fn csv_escape(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// Deterministic float rendering that round-trips exactly.
///
/// Rust's shortest-round-trip formatting guarantees `parse(format(x)) == x`;
/// the only choice left is decimal versus scientific. Plain decimal is used
/// where it stays compact (|x| in [1e-4, 1e15)) and scientific elsewhere,
/// so tiny tolerances print as `1.3e-9` rather than a wall of zeros. Zero —
/// including negative zero, which compares equal — prints as `0`.
pub fn format_float(x: f64) -> String {
    assert!(x.is_finite(), "format_float requires finite input, got {x}");
    if x == 0.0 {
        return "0".to_string();
    }
    let mag = x.abs();
    if (1e-4..1e15).contains(&mag) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{ScenarioConfig, ScenarioKind};

    fn provenance() -> Provenance {
        Provenance::for_config(&ScenarioConfig::for_scenario(ScenarioKind::EigenReport))
    }

    #[test]
    fn format_float_picks_compact_representation() {
        assert_eq!(format_float(0.0), "0");
        assert_eq!(format_float(-0.0), "0");
        assert_eq!(format_float(0.1), "0.1");
        assert_eq!(format_float(-2.5), "-2.5");
        assert_eq!(format_float(50.0), "50");
        assert_eq!(format_float(1e-9), "1e-9");
        assert_eq!(format_float(-3.25e-7), "-3.25e-7");
        assert_eq!(format_float(1e20), "1e20");
    }

    #[test]
    fn format_float_round_trips() {
        for &x in &[
            0.1,
            -0.0,
            1e-300,
            std::f64::consts::PI,
            0.158478753271366,
            -6.02e23,
            f64::MIN_POSITIVE,
        ] {
            let printed = format_float(x);
            let back: f64 = printed.parse().unwrap();
            assert_eq!(back, if x == 0.0 { 0.0 } else { x }, "via '{printed}'");
        }
    }

    #[test]
    fn csv_includes_provenance_and_header() {
        let mut table = ResultTable::new(&["t", "p_e"], provenance());
        table.push_row(vec![0.0, 0.0]);
        table.push_row(vec![0.1, 2.5e-5]);
        let csv = table.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert!(lines[0].starts_with("# engine-version: hybridsim "));
        assert!(lines[1].starts_with("# config-sha256: "));
        assert_eq!(lines[1].len(), "# config-sha256: ".len() + 64);
        assert_eq!(lines[2], "# units: hbar=1, energy=mu|B|");
        assert_eq!(lines[3], "t,p_e");
        assert_eq!(lines[4], "0,0");
        assert_eq!(lines[5], "0.1,2.5e-5");
    }

    #[test]
    fn gnuplot_body_is_space_separated() {
        let mut table = ResultTable::new(&["gamma", "kappa"], provenance());
        table.push_row(vec![0.03, 0.0025]);
        let body = table.gnuplot_body();
        assert_eq!(body, "# columns: gamma kappa\n0.03 0.0025\n");
    }

    #[test]
    fn digest_is_stable_and_seed_sensitive() {
        let config = ScenarioConfig::for_scenario(ScenarioKind::BzMap);
        assert_eq!(config_digest(&config), config_digest(&config.clone()));
        let mut reseeded = config.clone();
        reseeded.seed = 43;
        assert_ne!(config_digest(&config), config_digest(&reseeded));
    }

    #[test]
    #[should_panic(expected = "non-finite")]
    fn non_finite_rows_are_refused() {
        let mut table = ResultTable::new(&["x"], provenance());
        table.push_row(vec![f64::NAN]);
    }
}
