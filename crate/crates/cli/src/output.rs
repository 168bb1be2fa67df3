use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde_json::{json, Value};
use ttc_core::evaluation::{TrialRecord, TrialStats};
use ttc_core::{format_sig, TtcOutcome};

pub const DIGITS: usize = 9;

/// Standard output, or a file when a path is given.
pub fn sink(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => {
            let file = File::create(p).map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", p.display())))?;
            Box::new(BufWriter::new(file))
        }
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// A number rounded to nine significant digits; infinities and NaN become
/// strings since JSON has no literal for them.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        let rounded: f64 = format_sig(x, DIGITS).parse().unwrap_or(x);
        json!(rounded)
    } else {
        json!(format_sig(x, DIGITS))
    }
}

pub fn opt(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

pub fn ttc(o: TtcOutcome) -> Value {
    num(o.or_infinity())
}

pub fn ttc_text(o: TtcOutcome) -> String {
    format_sig(o.or_infinity(), DIGITS)
}

pub fn stats(s: &TrialStats) -> Value {
    json!({
        "n_trials": s.n_trials,
        "n_finite": s.n_finite,
        "n_disagree": s.n_disagree,
        "mean_abs_error": opt(s.mean_abs_error),
        "std_error": opt(s.std_error),
        "max_abs_error": opt(s.max_abs_error),
        "t_statistic": opt(s.t_statistic),
        "p_value": opt(s.p_value),
        "mean_time_star": opt(s.mean_time_star),
        "mean_time_oracle": opt(s.mean_time_oracle),
    })
}

pub fn record(r: &TrialRecord) -> Value {
    let mut v = json!({
        "index": r.index,
        "star": ttc(r.star),
        "oracle": ttc(r.oracle),
        "abs_error": opt(r.abs_error()),
    });
    if let (Some(s), Some(o)) = (r.time_star, r.time_oracle) {
        v["time_star"] = num(s);
        v["time_oracle"] = num(o);
    }
    v
}

pub fn write_json(out: &mut dyn Write, value: &Value) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)
}
