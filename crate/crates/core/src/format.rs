//! Locale-independent number formatting shared by every tabular output.

/// Formats `v` with 15 significant digits and a `.` decimal separator.
///
/// Moderate magnitudes are written positionally, the rest in scientific
/// notation; either form parses back with `str::parse::<f64>`.
pub fn sig15(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let mag = v.abs();
    if (1e-5..1e15).contains(&mag) {
        let exponent = mag.log10().floor() as i32;
        let decimals = (14 - exponent).max(0) as usize;
        let s = format!("{v:.decimals$}");
        trim_fraction(s)
    } else {
        let s = format!("{v:.14e}");
        match s.split_once('e') {
            Some((mantissa, exp)) => format!("{}e{exp}", trim_fraction(mantissa.to_string())),
            None => s,
        }
    }
}

fn trim_fraction(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}
