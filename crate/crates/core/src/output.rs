//! CSV encodings of protocol and ensemble results.
//!
//! Numbers are written in plain decimal notation with twelve significant
//! digits, `'.'` as separator and `'\n'` line endings.

use std::fmt::Write;

use crate::disorder::{ScenarioReport, SpectrumStats};
use crate::protocols::{AsyncPoint, LocalizedModeReport, ProtocolTrace};

const SIGNIFICANT_DIGITS: usize = 12;

/// Plain decimal with [`SIGNIFICANT_DIGITS`] significant digits.
pub fn format_number(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    // Round once in scientific form, then shift the decimal point.
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    let point = exp + 1;
    let body = if point <= 0 {
        format!("0.{}{}", "0".repeat((-point) as usize), digits)
    } else if point as usize >= digits.len() {
        format!("{}{}", digits, "0".repeat(point as usize - digits.len()))
    } else {
        let (int, frac) = digits.split_at(point as usize);
        format!("{int}.{frac}")
    };
    format!("{sign}{body}")
}

/// `t,fidelity_initial[,fidelity_reference],eof`; the reference column is
/// present only when the trace records one.
pub fn trace_csv(trace: &ProtocolTrace) -> String {
    let mut out = String::new();
    match &trace.fidelity_reference {
        Some(_) => out.push_str("t,fidelity_initial,fidelity_reference,eof\n"),
        None => out.push_str("t,fidelity_initial,eof\n"),
    }
    for i in 0..trace.times.len() {
        let _ = write!(
            out,
            "{},{},",
            format_number(trace.times[i]),
            format_number(trace.fidelity_initial[i])
        );
        if let Some(r) = &trace.fidelity_reference {
            let _ = write!(out, "{},", format_number(r[i]));
        }
        let _ = writeln!(out, "{}", format_number(trace.eof[i]));
    }
    out
}

pub const DISORDER_HEADER: &str = "kind,level_E,n,mean_eof,std,sem,scenario\n";

/// One row per level and scenario.
pub fn disorder_csv(reports: &[&ScenarioReport]) -> String {
    let mut out = String::from(DISORDER_HEADER);
    for report in reports {
        for lvl in &report.levels {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                report.kind,
                format_number(lvl.level),
                lvl.stats.count,
                format_number(lvl.stats.mean),
                format_number(lvl.stats.std),
                format_number(lvl.stats.sem),
                report.scenario.number()
            );
        }
    }
    out
}

pub fn spectrum_csv(stats: &SpectrumStats) -> String {
    let mut out = String::from("index,mean_energy,std_energy\n");
    for (i, (m, s)) in stats.mean.iter().zip(&stats.std).enumerate() {
        let _ = writeln!(out, "{},{},{}", i, format_number(*m), format_number(*s));
    }
    out
}

pub fn async_csv(points: &[AsyncPoint]) -> String {
    let mut out = String::from("delay_fraction,eof\n");
    for p in points {
        let _ = writeln!(out, "{},{}", format_number(p.delay), format_number(p.eof));
    }
    out
}

/// Long format: one row per (eigenstate, site).
pub fn modes_csv(report: &LocalizedModeReport) -> String {
    let mut out = String::from("state,energy,site,occupation,zero_mode\n");
    for (k, (e, occ)) in report.energies.iter().zip(&report.occupations).enumerate() {
        for (site, p) in occ.iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                k,
                format_number(*e),
                site,
                format_number(*p),
                u8::from(k == report.zero_mode)
            );
        }
    }
    out
}

/// `t,eof_analytic,eof_numeric`.
pub fn oracle_csv(times: &[f64], analytic: &[f64], numeric: &[f64]) -> String {
    let mut out = String::from("t,eof_analytic,eof_numeric\n");
    for ((t, a), n) in times.iter().zip(analytic).zip(numeric) {
        let _ = writeln!(
            out,
            "{},{},{}",
            format_number(*t),
            format_number(*a),
            format_number(*n)
        );
    }
    out
}
