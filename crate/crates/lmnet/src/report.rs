//! Report serialization: pretty JSON and a one-line CSV summary.

use std::fmt::Write as _;

use lmnet_core::TestReport;

pub const CSV_HEADER: &str = "test_id,n,m,motif,lambda_hat,statistic,threshold,p_value,decision";

pub fn to_json(report: &TestReport) -> String {
    serde_json::to_string_pretty(report).expect("reports always serialize")
}

/// Shortest round-trip decimal, with `inf`/`-inf`/`nan` spelled out.
pub fn fmt_real(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x}")
    }
}

/// CSV row matching [`CSV_HEADER`]. Two-sample multipliers are joined by `;`
/// and an absent p-value is left empty.
pub fn csv_row(report: &TestReport) -> String {
    let lambda = report.lambda_hat.iter().map(|&l| fmt_real(l)).collect::<Vec<_>>().join(";");
    let mut row = String::new();
    write!(
        row,
        "{},{},{},{},{},{},{},{},{}",
        report.test_id,
        report.n,
        report.m,
        report.motif,
        lambda,
        fmt_real(report.statistic),
        fmt_real(report.threshold),
        report.p_value.map(fmt_real).unwrap_or_default(),
        report.decision,
    )
    .unwrap();
    row
}

pub fn to_csv(report: &TestReport) -> String {
    format!("{CSV_HEADER}\n{}\n", csv_row(report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use lmnet_core::nettest::gof_fixed_from_counts;

    #[test]
    fn csv_and_json_shapes() {
        let counts: Vec<f64> = (0..40).map(|i| 2.0 + (i % 3) as f64).collect();
        let r = gof_fixed_from_counts(&counts, 5, "triangle", 1.0, 0.05).unwrap();
        let csv = to_csv(&r);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        let row = lines.next().unwrap();
        assert!(row.starts_with("gof-fixed,40,5,triangle,inf,inf,"));
        assert!(row.ends_with(",0,reject"));

        let json: serde_json::Value = serde_json::from_str(&to_json(&r)).unwrap();
        assert_eq!(json["lambda_hat"][0], "inf");
        assert_eq!(json["decision"], "reject");
        assert_eq!(json["direction"], "upper");
        let back: TestReport = serde_json::from_str(&to_json(&r)).unwrap();
        assert_eq!(back.lambda_hat[0], f64::INFINITY);
        assert_eq!(back.decision, r.decision);
    }
}
