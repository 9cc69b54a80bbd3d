//! CSV rendering. Numbers use six significant digits in `%g` style with a
//! `.` decimal point regardless of locale.

use std::fmt::Write;

use semcom_core::engine::{Metrics, SlotTrace};
use semcom_core::protocol::Decision;

use crate::config::Scenario;

pub const SUMMARY_HEADER: &str =
    "policy,p,q,ps,period,threshold,slots,seed,recon_error,actuation_cost,tx_rate,uninformative_frac";

pub const TRACE_HEADER: &str =
    "slot,source_state,estimate,aoi,decision,sample_value,sample_gen_slot,delivered,uninformative";

pub const METRIC_NAMES: [&str; 4] = ["recon_error", "actuation_cost", "tx_rate", "uninformative_frac"];

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Formats like C's `%.6g`.
pub fn format_g6(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_fraction(mantissa), exp.abs())
    } else {
        let decimals = (5 - exp) as usize;
        trim_fraction(&format!("{x:.decimals$}")).to_string()
    }
}

/// Leading columns identifying a scenario; `slots`/`seed` may be blank.
pub fn scenario_fields(s: &Scenario, slots: Option<u64>, seed: Option<u64>) -> String {
    let opt = |v: Option<u64>| v.map(|v| v.to_string()).unwrap_or_default();
    format!(
        "{},{},{},{},{},{},{},{}",
        s.policy().name(),
        format_g6(s.p),
        format_g6(s.q),
        format_g6(s.ps()),
        s.period,
        s.threshold,
        opt(slots),
        opt(seed)
    )
}

pub fn metric_fields(m: &Metrics) -> String {
    m.as_array().iter().map(|&v| format_g6(v)).collect::<Vec<_>>().join(",")
}

pub fn summary_row(s: &Scenario, slots: Option<u64>, seed: Option<u64>, m: Option<&Metrics>) -> String {
    let metrics = m.map_or_else(|| ",,,".to_string(), metric_fields);
    format!("{},{metrics}", scenario_fields(s, slots, seed))
}

pub fn compare_header() -> String {
    let mut h = SUMMARY_HEADER.split(',').take(8).collect::<Vec<_>>().join(",");
    for name in METRIC_NAMES {
        write!(h, ",sim_{name},exact_{name},absdev_{name}").unwrap();
    }
    h.push_str(",status");
    h
}

pub fn trace_csv(trace: &[SlotTrace]) -> String {
    let mut out = String::with_capacity(trace.len() * 24 + TRACE_HEADER.len() + 1);
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for s in trace {
        let (decision, value, gen) = match s.decision {
            Decision::Idle => ("idle", String::new(), String::new()),
            Decision::Transmit(sample) => ("transmit", sample.value.to_string(), sample.gen_slot.to_string()),
        };
        writeln!(
            out,
            "{},{},{},{},{decision},{value},{gen},{},{}",
            s.slot,
            s.source_state,
            s.estimate,
            s.aoi,
            u8::from(s.delivered),
            u8::from(s.uninformative)
        )
        .unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g6_formatting() {
        assert_eq!(format_g6(0.0), "0");
        assert_eq!(format_g6(-0.0), "0");
        assert_eq!(format_g6(1.0), "1");
        assert_eq!(format_g6(0.4), "0.4");
        assert_eq!(format_g6(0.95), "0.95");
        assert_eq!(format_g6(4.0 / 49.0), "0.0816327");
        assert_eq!(format_g6(0.123456789), "0.123457");
        assert_eq!(format_g6(123456.7), "123457");
        assert_eq!(format_g6(1234567.0), "1.23457e+06");
        assert_eq!(format_g6(0.0001), "0.0001");
        assert_eq!(format_g6(0.00001234), "1.234e-05");
        assert_eq!(format_g6(9.9999996), "10");
        assert_eq!(format_g6(-2.5), "-2.5");
        assert_eq!(format_g6(1e6), "1e+06");
    }

    #[test]
    fn compare_header_layout() {
        let h = compare_header();
        assert!(h.starts_with(
            "policy,p,q,ps,period,threshold,slots,seed,sim_recon_error,exact_recon_error,absdev_recon_error"
        ));
        assert!(h.ends_with(",status"));
        assert_eq!(h.split(',').count(), 8 + 12 + 1);
    }
}
