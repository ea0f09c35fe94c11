//! Tidy CSV output.
//!
//! Comma separated, `.` decimal point, header row, LF line endings. Numbers
//! are printed with a fixed count of significant digits in the style of C's
//! `%g`; missing values print as `NA`.

use std::io::{self, Write};

use crate::equal_weights::{TableRow, TABLE_COLUMNS};
use crate::penalized::CoefficientPath;
use crate::selection::CvCurve;
use crate::simulation::SimCellSummary;
use crate::weighting::SchemeResult;

pub const DEFAULT_PRECISION: usize = 6;

/// `%g`-style formatting with `digits` significant digits.
pub fn format_number(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "NA".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "Inf".into() } else { "-Inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        format!("{}e{}", trim_zeros(mantissa), exp)
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt(x: Option<f64>, digits: usize) -> String {
    x.map_or_else(|| "NA".into(), |v| format_number(v, digits))
}

fn flag(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

/// One row per λ: `lambda,intercept` followed by one column per term.
pub fn write_path_csv<W: Write>(
    w: &mut W,
    path: &CoefficientPath,
    terms: &[String],
    digits: usize,
) -> io::Result<()> {
    let q = path.coefficients().ncols();
    if terms.len() != q {
        return Err(io::Error::new(
            io::ErrorKind::InvalidInput,
            format!("{} term names for {q} coefficients", terms.len()),
        ));
    }
    writeln!(w, "lambda,intercept,{}", terms.join(","))?;
    for k in 0..path.len() {
        let mut row = vec![
            format_number(path.grid().values()[k], digits),
            format_number(path.intercepts()[k], digits),
        ];
        row.extend(
            path.coefficients()
                .row(k)
                .iter()
                .map(|&b| format_number(b, digits)),
        );
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

/// `grid_value,mean_error,std_error,is_min,is_1se`.
pub fn write_cv_curve_csv<W: Write>(w: &mut W, curve: &CvCurve, digits: usize) -> io::Result<()> {
    writeln!(w, "grid_value,mean_error,std_error,is_min,is_1se")?;
    for g in 0..curve.len() {
        writeln!(
            w,
            "{},{},{},{},{}",
            format_number(curve.grid[g], digits),
            format_number(curve.mean_error[g], digits),
            format_number(curve.std_error[g], digits),
            flag(g == curve.chosen_min),
            flag(g == curve.chosen_1se),
        )?;
    }
    Ok(())
}

/// `lambda,mean_mse,se,n_nonzero,is_min,is_1se`, for plotting CV curves of a
/// path.
pub fn write_cv_path_csv<W: Write>(
    w: &mut W,
    curve: &CvCurve,
    n_nonzero: &[usize],
    digits: usize,
) -> io::Result<()> {
    writeln!(w, "lambda,mean_mse,se,n_nonzero,is_min,is_1se")?;
    for g in 0..curve.len() {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            format_number(curve.grid[g], digits),
            format_number(curve.mean_error[g], digits),
            format_number(curve.std_error[g], digits),
            n_nonzero[g],
            flag(g == curve.chosen_min),
            flag(g == curve.chosen_1se),
        )?;
    }
    Ok(())
}

pub const SUMMARY_HEADER: &str = "n,r,rho,s_q25,s_median,s_q75,pe_q25,pe_median,pe_q75";

pub fn write_summary_row<W: Write>(w: &mut W, s: &SimCellSummary, digits: usize) -> io::Result<()> {
    let f = |x| format_number(x, digits);
    writeln!(
        w,
        "{},{},{},{},{},{},{},{},{}",
        s.n,
        f(s.r),
        f(s.rho),
        f(s.s_q25),
        f(s.s_median),
        f(s.s_q75),
        f(s.pe_q25),
        f(s.pe_median),
        f(s.pe_q75),
    )
}

pub fn write_summary_csv<W: Write>(w: &mut W, rows: &[SimCellSummary], digits: usize) -> io::Result<()> {
    writeln!(w, "{SUMMARY_HEADER}")?;
    rows.iter().try_for_each(|s| write_summary_row(w, s, digits))
}

/// Coefficient table: `term` followed by [`TABLE_COLUMNS`].
pub fn write_comparison_table<W: Write>(w: &mut W, rows: &[TableRow], digits: usize) -> io::Result<()> {
    writeln!(w, "term,{}", TABLE_COLUMNS.join(","))?;
    for row in rows {
        let values: Vec<String> = row.values.iter().map(|&v| opt(v, digits)).collect();
        writeln!(w, "{},{}", row.term, values.join(","))?;
    }
    Ok(())
}

/// `scheme,mse,pearson_r`.
pub fn write_schemes_csv<W: Write>(w: &mut W, results: &[SchemeResult], digits: usize) -> io::Result<()> {
    writeln!(w, "scheme,mse,pearson_r")?;
    for r in results {
        writeln!(
            w,
            "{},{},{}",
            r.scheme.name(),
            format_number(r.metrics.mse, digits),
            opt(r.metrics.pearson_r, digits),
        )?;
    }
    Ok(())
}
