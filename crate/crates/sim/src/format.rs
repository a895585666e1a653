//! Number rendering shared by every emitted file.
//!
//! Values keep 9 significant digits. Magnitudes below `1e-4` use scientific
//! notation (`3.0828e-10`), everything else is positional (`155123457`,
//! `0.000123`). Trailing zeros are dropped, `-0` prints as `0` and
//! non-finite values print as `inf`, `-inf` or `nan`.

pub const SIGNIFICANT_DIGITS: usize = 9;

pub fn num(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    // Rounding happens once, in the float-to-decimal conversion; the rest is
    // string surgery so large values keep exactly 9 digits.
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    if exp < -4 {
        let mut m = format!("{}.{}", &digits[..1], &digits[1..]);
        trim_fraction(&mut m);
        return format!("{sign}{m}e{exp}");
    }
    let body = if exp < 0 {
        let mut s = format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits);
        trim_fraction(&mut s);
        s
    } else {
        let int_len = exp as usize + 1;
        if int_len >= digits.len() {
            format!("{}{}", digits, "0".repeat(int_len - digits.len()))
        } else {
            let mut s = format!("{}.{}", &digits[..int_len], &digits[int_len..]);
            trim_fraction(&mut s);
            s
        }
    };
    format!("{sign}{body}")
}

fn trim_fraction(s: &mut String) {
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
}

pub fn flag(b: bool) -> &'static str {
    if b {
        "true"
    } else {
        "false"
    }
}
