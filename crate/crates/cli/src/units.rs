//! Display units accepted on the command line. Everything past the argument
//! parser is SI.
//!
//! Metric prefixes are applied to the decimal text itself, so `3.24` cm
//! becomes the double nearest 0.0324 rather than `3.24 / 100`.

/// Parses decimal `text` and multiplies it by `10^shift` without an
/// intermediate rounding step.
pub fn parse_scaled(text: &str, shift: i32) -> Result<f64, String> {
    let text = text.trim();
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(i) => {
            let exp: i32 = text[i + 1..]
                .parse()
                .map_err(|_| format!("invalid number `{text}`"))?;
            (&text[..i], exp)
        }
        None => (text, 0),
    };
    let exponent = exponent
        .checked_add(shift)
        .ok_or_else(|| format!("exponent out of range in `{text}`"))?;
    // Validate the mantissa on its own so `1e3e2`-style input is rejected.
    let _: f64 = mantissa
        .parse()
        .map_err(|_| format!("invalid number `{text}`"))?;
    let value: f64 = format!("{mantissa}e{exponent}")
        .parse()
        .map_err(|_| format!("invalid number `{text}`"))?;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("`{text}` is not a finite number"))
    }
}

/// kPa on the command line, Pa inside.
pub fn parse_kpa(text: &str) -> Result<f64, String> {
    parse_scaled(text, 3)
}

/// cm on the command line, m inside.
pub fn parse_cm(text: &str) -> Result<f64, String> {
    parse_scaled(text, -2)
}

/// mm on the command line, m inside.
pub fn parse_mm(text: &str) -> Result<f64, String> {
    parse_scaled(text, -3)
}

/// Degrees on the command line, radians inside.
pub fn parse_deg(text: &str) -> Result<f64, String> {
    parse_scaled(text, 0).map(deg_to_rad)
}

pub fn kpa_to_pa(kpa: f64) -> f64 {
    kpa * 1e3
}

pub fn pa_to_kpa(pa: f64) -> f64 {
    pa / 1e3
}

pub fn cm_to_m(cm: f64) -> f64 {
    cm / 1e2
}

pub fn m_to_cm(m: f64) -> f64 {
    m * 1e2
}

pub fn deg_to_rad(deg: f64) -> f64 {
    deg.to_radians()
}

pub fn rad_to_deg(rad: f64) -> f64 {
    rad.to_degrees()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prefixes_are_exact() {
        assert_eq!(parse_kpa("4.14").unwrap(), 4140.0);
        assert_eq!(parse_kpa("10.34").unwrap(), 10340.0);
        assert_eq!(parse_kpa("2.1e1").unwrap(), 21000.0);
        assert_eq!(parse_cm("3.24").unwrap(), 0.0324);
        assert_eq!(parse_cm("4.04").unwrap(), 0.0404);
        assert_eq!(parse_cm("-1").unwrap(), -0.01);
        assert_eq!(parse_cm("95").unwrap(), 0.95);
        assert_eq!(parse_mm("0.031").unwrap(), 3.1e-5);
        assert_eq!(parse_deg("180").unwrap(), std::f64::consts::PI);
        assert_eq!(parse_deg("90").unwrap(), std::f64::consts::FRAC_PI_2);
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "abc", "1e", "1e3e2", "inf", "NaN", "1e999"] {
            assert!(parse_kpa(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn round_trips() {
        for v in [0.0, 1.0, 2.1, 3.45, 27.8, 8.49, 0.95, 65.0, -20.0] {
            assert_eq!(pa_to_kpa(parse_kpa(&v.to_string()).unwrap()), v);
            // Output conversions multiply, so they are only good to an ulp.
            assert!((m_to_cm(parse_cm(&v.to_string()).unwrap()) - v).abs() <= f64::EPSILON * v.abs());
            assert!((rad_to_deg(deg_to_rad(v)) - v).abs() <= 1e-13 * v.abs());
        }
    }
}
