//! Machine-readable report, closed-form dimension oracles and text rendering.

use std::fmt::Write;

use derham_core::verify::FamilyReport;
use derham_core::ElementKind;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dims {
    #[serde(rename = "H")]
    pub h: usize,
    #[serde(rename = "E")]
    pub e: Option<usize>,
    #[serde(rename = "V")]
    pub v: Option<usize>,
    #[serde(rename = "W")]
    pub w: usize,
}

impl Dims {
    pub fn from_slots(d: &[usize]) -> Dims {
        match d.len() {
            2 => Dims { h: d[0], e: None, v: None, w: d[1] },
            3 => Dims { h: d[0], e: Some(d[1]), v: None, w: d[2] },
            _ => Dims { h: d[0], e: Some(d[1]), v: Some(d[2]), w: d[3] },
        }
    }

    pub fn alternating_sum(&self) -> i64 {
        let (h, w) = (self.h as i64, self.w as i64);
        match (self.e, self.v) {
            (Some(e), Some(v)) => h - e as i64 + v as i64 - w,
            (Some(e), None) => h - e as i64 + w,
            _ => h - w,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Delta {
    #[serde(rename = "dimH")]
    pub dim_h: usize,
    #[serde(rename = "dimE")]
    pub dim_e: usize,
    /// Properties (i)-(iv) of δH, then (i)-(iv) of δE.
    pub props: [bool; 8],
}

/// One verified (element, family, k). Absent slots, the enrichment of the
/// interval and its M-index serialize as `null`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub element: String,
    pub family: u8,
    pub k: u32,
    pub dims: Dims,
    pub exact: bool,
    pub compatible: bool,
    pub delta: Option<Delta>,
    #[serde(rename = "mIndex")]
    pub m_index: Option<i64>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn from_family(r: &FamilyReport) -> Report {
        let mut notes = r.notes.clone();
        let delta = r.delta.as_ref().map(|d| Delta { dim_h: d.dim_h, dim_e: d.dim_e, props: d.props });
        let m_index = r.m_index.map(|m| m.definition);
        for (what, closed, computed) in closed_forms(r.element, r.family, r.k)
            .into_iter()
            .filter_map(|(what, v)| {
                let computed = match what {
                    "dim δH" => delta.as_ref().map(|d| d.dim_h as i64),
                    "dim δE" => delta.as_ref().map(|d| d.dim_e as i64),
                    _ => m_index,
                }?;
                Some((what, v, computed))
            })
        {
            let tag = if closed == computed { "" } else { " MISMATCH" };
            notes.push(format!("closed form {} = {}, computed {}{}", what, closed, computed, tag));
        }
        Report {
            element: r.element.name().into(),
            family: r.family,
            k: r.k,
            dims: Dims::from_slots(&r.dims),
            exact: r.exact(),
            compatible: r.compatible(),
            delta,
            m_index,
            notes,
        }
    }
}

/// Closed-form enrichment dimensions and M-indices known for a family, as
/// `(quantity, value)`. Only the cases with a published formula appear;
/// formulas stated for `k >= 1` are omitted at `k = 0`.
pub fn closed_forms(kind: ElementKind, family: u8, k: u32) -> Vec<(&'static str, i64)> {
    use ElementKind::*;
    let k = k as i64;
    let triple = |h: i64, e: i64, m: i64| vec![("dim δH", h), ("dim δE", e), ("M-index", m)];
    match (kind, family) {
        (Square, 1) => vec![("dim δH", 2)],
        (Square, 2 | 3) if k >= 1 => vec![("dim δH", 2)],
        (Tet, _) => triple(0, 0, 0),
        (Cube, 1) => triple(3 * (k + 4), 3 * (k + 2), 3 * (k + 2)),
        (Cube, 3) if k >= 1 => triple(9, 6, 6),
        (Cube, 4) | (Prism, 4) => triple(0, 0, 0),
        (Prism, 1) => triple(k + 6, k + 3, k + 3),
        (Prism, 3) if k >= 1 => triple(k + 4, k + 2, k + 2),
        (Pyramid, 1) => triple(2 * k + 5, 3, 3),
        _ => Vec::new(),
    }
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "NO"
    }
}

/// Human-readable block for one report; `pass` is the overall verdict.
pub fn render_text(r: &Report, pass: bool, out: &mut String) {
    let _ = writeln!(out, "{} family {} k={}: {}", r.element, r.family, r.k, if pass { "PASS" } else { "FAIL" });
    let d = &r.dims;
    let mut dims = format!("H={}", d.h);
    if let Some(e) = d.e {
        let _ = write!(dims, " E={}", e);
    }
    if let Some(v) = d.v {
        let _ = write!(dims, " V={}", v);
    }
    let _ = write!(dims, " W={}", d.w);
    let _ = writeln!(out, "  dims {}", dims);
    let _ = writeln!(out, "  exact: {}  compatible: {}", yes(r.exact), yes(r.compatible));
    if let Some(delta) = &r.delta {
        let props: String = delta.props.iter().map(|&p| if p { 'T' } else { 'F' }).collect();
        let _ = writeln!(out, "  dim δH={} dim δE={} properties {}", delta.dim_h, delta.dim_e, props);
    }
    if let Some(m) = r.m_index {
        let _ = writeln!(out, "  M-index: {}", m);
    }
    for n in &r.notes {
        let _ = writeln!(out, "  note: {}", n);
    }
}

/// Header and one row per report for the dimension table.
pub fn render_table(rows: &[Report]) -> String {
    let mut out = String::new();
    let dash = |v: Option<usize>| v.map_or("-".to_string(), |x| x.to_string());
    let _ = writeln!(out, "{:<9} {:>3} {:>2} {:>5} {:>5} {:>5} {:>5} {:>4} {:>4} {:>4} {:>4}", "element", "fam", "k", "H", "E", "V", "W", "alt", "δH", "δE", "M");
    for r in rows {
        let d = &r.dims;
        let _ = writeln!(
            out,
            "{:<9} {:>3} {:>2} {:>5} {:>5} {:>5} {:>5} {:>4} {:>4} {:>4} {:>4}",
            r.element,
            r.family,
            r.k,
            d.h,
            dash(d.e),
            dash(d.v),
            d.w,
            d.alternating_sum(),
            r.delta.as_ref().map_or("-".into(), |x| x.dim_h.to_string()),
            r.delta.as_ref().map_or("-".into(), |x| x.dim_e.to_string()),
            r.m_index.map_or("-".into(), |m| m.to_string()),
        );
    }
    out
}
