/// Render `x` rounded to 9 significant digits, in the shortest decimal form
/// that reads back to the rounded value. `-0` is written as `0`.
pub fn fmt_sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.8e}").parse().expect("valid float literal");
    format!("{rounded}")
}
