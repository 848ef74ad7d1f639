//! CSV and JSON rendering of result rows.

use std::io::Write;

use crate::runner::ResultRow;

pub const CSV_HEADER: &str = "scenario,method,n,N,estimate,ci_half_width,weight_variance,cov,exact_asymptotic,variance_reduction,per_sample_time_us,seed";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Nine significant digits; empty for a missing value.
fn float(x: Option<f64>) -> String {
    x.map_or_else(String::new, |v| format!("{v:.8e}"))
}

fn text(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn to_csv(rows: &[ResultRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let fields = [
            text(&r.scenario),
            text(&r.method),
            r.n.to_string(),
            r.draws.to_string(),
            float(r.estimate),
            float(r.ci_half_width),
            float(r.weight_variance),
            float(r.cov),
            float(r.exact_asymptotic),
            float(r.variance_reduction),
            float(r.per_sample_time_us),
            r.seed.to_string(),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub fn to_json(rows: &[ResultRow]) -> String {
    serde_json::to_string_pretty(rows).expect("rows serialize") + "\n"
}

pub fn render(rows: &[ResultRow], format: Format) -> String {
    match format {
        Format::Csv => to_csv(rows),
        Format::Json => to_json(rows),
    }
}

pub fn write_report(rows: &[ResultRow], format: Format, out: &mut dyn Write) -> std::io::Result<()> {
    out.write_all(render(rows, format).as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row() -> ResultRow {
        ResultRow {
            scenario: "s".into(),
            method: "SPIS".into(),
            n: 30,
            draws: 1000,
            estimate: Some(2.179_035_794_123),
            ci_half_width: Some(0.1),
            weight_variance: None,
            cov: Some(1.0 / 3.0),
            exact_asymptotic: Some(1e-13),
            variance_reduction: None,
            per_sample_time_us: Some(1.5),
            seed: 42,
            error: None,
        }
    }

    #[test]
    fn one_row_csv() {
        let csv = to_csv(&[row()]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(
            lines[1],
            "s,SPIS,30,1000,2.17903579e0,1.00000000e-1,,3.33333333e-1,1.00000000e-13,,1.50000000e0,42"
        );
    }

    #[test]
    fn json_round_trip_is_exact() {
        let mut r = row();
        r.estimate = Some(0.1 + 0.2);
        r.error = Some("boom".into());
        let rows = vec![r, row()];
        let back: Vec<ResultRow> = serde_json::from_str(&to_json(&rows)).unwrap();
        assert_eq!(back, rows);
    }

    #[test]
    fn quoting() {
        assert_eq!(text("a,b"), "\"a,b\"");
        assert_eq!(text("x"), "x");
    }
}
