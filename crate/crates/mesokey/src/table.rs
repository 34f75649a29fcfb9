//! Curve tables: CSV with 12 significant digits, or JSON.

use mesokey_core::helstrom::PePoint;
use serde::Serialize;

/// Fixed-point decimal with 12 significant digits.
pub fn format_sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { format!("{:.11}", 0.0) } else { x.to_string() };
    }
    let magnitude = x.abs().log10().floor() as i32 + 1;
    let decimals = (12 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    // rounding can carry into a new leading digit (9.99… → 10.0…)
    let digits = s.chars().filter(char::is_ascii_digit).skip_while(|c| *c == '0').count();
    if digits > 12 && decimals > 0 {
        let d = decimals - 1;
        format!("{x:.d$}")
    } else {
        s
    }
}

/// `M,n,pe` rows, or `M,n,pe,mi` with the mutual-information column.
pub fn curve_csv(points: &[PePoint], with_mi: bool) -> String {
    let mut out = String::from(if with_mi { "M,n,pe,mi\n" } else { "M,n,pe\n" });
    for p in points {
        out.push_str(&format!("{},{},{}", p.num_bases, format_sig12(p.mean_photon_number), format_sig12(p.pe)));
        if with_mi {
            out.push(',');
            out.push_str(&format_sig12(p.mutual_information));
        }
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct JsonRow {
    #[serde(rename = "M")]
    num_bases: u32,
    n: f64,
    pe: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    mi: Option<f64>,
}

pub fn curve_json(points: &[PePoint], with_mi: bool) -> String {
    let rows: Vec<JsonRow> = points
        .iter()
        .map(|p| JsonRow {
            num_bases: p.num_bases,
            n: p.mean_photon_number,
            pe: p.pe,
            mi: with_mi.then_some(p.mutual_information),
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&rows).expect("rows serialize");
    s.push('\n');
    s
}
