//! CSV and metadata output. Numbers are written like C's `%.17g`.

use crate::config::SimulationConfig;
use crate::error::Result;
use crate::scenario::ScenarioResult;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

pub const RUN_HEADER: &str = "t_prime,re_eps1,im_eps1,re_eps3,im_eps3";
pub const SUMMARY_HEADER: &str =
    "theta,peak_amp_1,peak_amp_3,released_energy_1,released_energy_3,residual_coherence_norm";

/// Format like `printf("%.17g", v)`.
pub fn fmt_g17(v: f64) -> String {
    const P: i32 = 17;
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return if v.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.*e}", (P - 1) as usize, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let x: i32 = exp.parse().expect("integer exponent");
    if !(-4..P).contains(&x) {
        let m = strip_zeros(mantissa);
        let sign = if x < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", x.abs())
    } else {
        let fixed = format!("{:.*}", (P - 1 - x) as usize, v);
        strip_zeros(&fixed).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn write_run_csv(path: &Path, result: &ScenarioResult) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    writeln!(w, "{RUN_HEADER}")?;
    for ((t, e1), e3) in result.times.iter().zip(&result.out1).zip(&result.out3) {
        writeln!(
            w,
            "{},{},{},{},{}",
            fmt_g17(*t),
            fmt_g17(e1.re),
            fmt_g17(e1.im),
            fmt_g17(e3.re),
            fmt_g17(e3.im)
        )?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary_csv(path: &Path, results: &[ScenarioResult]) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    writeln!(w, "{SUMMARY_HEADER}")?;
    for r in results {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            fmt_g17(r.theta),
            fmt_g17(r.peak_amp_1),
            fmt_g17(r.peak_amp_3),
            fmt_g17(r.released_energy_1),
            fmt_g17(r.released_energy_3),
            fmt_g17(r.residual_coherence_norm)
        )?;
    }
    w.flush()?;
    Ok(())
}

/// Resolved configuration echo, in the configuration file format.
pub fn write_meta(path: &Path, cfg: &SimulationConfig, extra: &[(&str, String)]) -> Result<()> {
    let mut text = String::from("# resolved configuration, atomic units\n");
    text.push_str(&cfg.to_config_string());
    for (k, v) in extra {
        text.push_str(&format!("# {k} = {v}\n"));
    }
    fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf_g17() {
        let cases: &[(f64, &str)] = &[
            (0.0, "0"),
            (1.0, "1"),
            (-2.5, "-2.5"),
            (0.1, "0.10000000000000001"),
            (1e-10, "1e-10"),
            (2.4e-9, "2.4e-09"),
            (123456.0, "123456"),
            (1e17, "1e+17"),
            (1e16, "10000000000000000"),
            (0.0001, "0.0001"),
            (0.00001, "1.0000000000000001e-05"),
            (-0.274, "-0.27400000000000002"),
            (f64::MAX, "1.7976931348623157e+308"),
            (3e7, "30000000"),
        ];
        for &(v, want) in cases {
            assert_eq!(fmt_g17(v), want, "value {v:e}");
        }
    }

    #[test]
    fn round_trips_exactly() {
        for v in [0.1, 1.0 / 3.0, -2.152e-9, 6.02214076e23, 5e-324, 1.7976931348623157e308] {
            assert_eq!(fmt_g17(v).parse::<f64>().unwrap(), v);
        }
    }
}
