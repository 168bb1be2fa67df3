/// Formats `x` with `digits` significant digits in positional notation;
/// infinities print as `inf`/`-inf`.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return format!("{:.*}", digits.saturating_sub(1), 0.0);
    }
    let magnitude = x.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    // rounding can carry into a new leading digit (9.99.. -> 10.0..)
    let rounded: f64 = s.parse().unwrap_or(x);
    if decimals > 0 && rounded.abs().log10().floor() as i64 > magnitude {
        return format!("{x:.prec$}", prec = decimals - 1);
    }
    s
}
