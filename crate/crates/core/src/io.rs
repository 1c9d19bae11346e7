//! Text formats: field CSV (`t,x,value`), the grid descriptor JSON and
//! potential CSV (`x,value`).
//!
//! Every float is written with 12 significant digits in exponent form, which
//! is locale independent and round-trips through `str::parse::<f64>` to
//! 12 digits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Field, Potential, SpaceGrid, TimeGrid};

/// Formats a float with 12 significant digits.
pub fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        // Avoid "-0.00000000000e0".
        return "0.00000000000e0".to_string();
    }
    format!("{v:.11e}")
}

/// Grid descriptor written next to every field CSV.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridDescriptor {
    pub half_width: f64,
    pub n_points: usize,
    pub t_start: f64,
    pub t_end: f64,
    pub n_steps: usize,
}

impl GridDescriptor {
    pub fn of(tgrid: &TimeGrid, sgrid: &SpaceGrid) -> Self {
        Self {
            half_width: sgrid.half_width(),
            n_points: sgrid.n_points(),
            t_start: tgrid.t_start(),
            t_end: tgrid.t_end(),
            n_steps: tgrid.n_steps(),
        }
    }

    pub fn grids(&self) -> Result<(TimeGrid, SpaceGrid)> {
        // Cap the size so hostile descriptors cannot request huge allocations.
        let total = (self.n_steps as u128 + 1) * self.n_points as u128;
        if total > 200_000_000 {
            return Err(Error::Parse(format!("descriptor describes {total} nodes")));
        }
        Ok((
            TimeGrid::new(self.t_start, self.t_end, self.n_steps)?,
            SpaceGrid::new(self.half_width, self.n_points)?,
        ))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("grid descriptor: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("descriptor serializes")
    }
}

/// Writes a field as CSV with header `t,x,value`, time-major.
pub fn field_to_csv(field: &Field) -> String {
    let tg = field.tgrid();
    let sg = field.sgrid();
    let mut out = String::with_capacity((tg.n_steps() + 1) * sg.n_points() * 56 + 16);
    out.push_str("t,x,value\n");
    for k in 0..=tg.n_steps() {
        let t = fmt_num(tg.t(k));
        for (i, v) in field.slice(k).iter().enumerate() {
            out.push_str(&t);
            out.push(',');
            out.push_str(&fmt_num(sg.x(i)));
            out.push(',');
            out.push_str(&fmt_num(*v));
            out.push('\n');
        }
    }
    out
}

fn parse_f64(tok: &str, line: usize) -> Result<f64> {
    let v: f64 = tok
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("line {line}: '{tok}' is not a number")))?;
    if !v.is_finite() {
        return Err(Error::Parse(format!("line {line}: non-finite value")));
    }
    Ok(v)
}

/// Reads a field CSV against its descriptor. Node coordinates must agree
/// with the descriptor grids to within 1e-9 relative.
pub fn field_from_csv(desc: &GridDescriptor, text: &str) -> Result<Field> {
    let (tg, sg) = desc.grids()?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == "t,x,value" => {}
        _ => return Err(Error::Parse("missing header 't,x,value'".into())),
    }
    let n = sg.n_points();
    let expected = (tg.n_steps() + 1) * n;
    let mut values = Vec::with_capacity(expected.min(1 << 20));
    for (lineno, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let idx = values.len();
        if idx >= expected {
            return Err(Error::Parse(format!("line {}: more rows than the grid holds", lineno + 1)));
        }
        let mut cols = line.split(',');
        let (Some(t), Some(x), Some(v), None) = (cols.next(), cols.next(), cols.next(), cols.next()) else {
            return Err(Error::Parse(format!("line {}: expected 3 columns", lineno + 1)));
        };
        let t = parse_f64(t, lineno + 1)?;
        let x = parse_f64(x, lineno + 1)?;
        let v = parse_f64(v, lineno + 1)?;
        let (k, i) = (idx / n, idx % n);
        let tol = |a: f64| 1e-9 * (1.0 + a.abs());
        if (t - tg.t(k)).abs() > tol(tg.t(k)) || (x - sg.x(i)).abs() > tol(sg.x(i)) {
            return Err(Error::Parse(format!(
                "line {}: node ({t}, {x}) does not match the descriptor grid",
                lineno + 1
            )));
        }
        values.push(v);
    }
    if values.len() != expected {
        return Err(Error::Parse(format!("expected {expected} rows, found {}", values.len())));
    }
    Field::new(tg, sg, values)
}

/// Reads a potential from CSV with header `x,value` on a uniform symmetric grid.
pub fn potential_from_csv(text: &str) -> Result<Potential> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == "x,value" => {}
        _ => return Err(Error::Parse("missing header 'x,value'".into())),
    }
    let mut xs = Vec::new();
    let mut vs = Vec::new();
    for (lineno, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let mut cols = line.split(',');
        let (Some(x), Some(v), None) = (cols.next(), cols.next(), cols.next()) else {
            return Err(Error::Parse(format!("line {}: expected 2 columns", lineno + 1)));
        };
        xs.push(parse_f64(x, lineno + 1)?);
        vs.push(parse_f64(v, lineno + 1)?);
    }
    if xs.len() < 3 {
        return Err(Error::Parse("a potential needs at least 3 nodes".into()));
    }
    let half_width = -xs[0];
    let grid = SpaceGrid::new(half_width, xs.len()).map_err(|e| Error::Parse(e.to_string()))?;
    for (i, &x) in xs.iter().enumerate() {
        if (x - grid.x(i)).abs() > 1e-9 * (1.0 + half_width) {
            return Err(Error::Parse(format!(
                "node {i} at x = {x} is not on the uniform grid over [-{half_width}, {half_width}]"
            )));
        }
    }
    Potential::new(grid, vs)
}

pub fn potential_to_csv(p: &Potential) -> String {
    let mut out = String::from("x,value\n");
    for (i, v) in p.values().iter().enumerate() {
        out.push_str(&fmt_num(p.grid().x(i)));
        out.push(',');
        out.push_str(&fmt_num(*v));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn small_field() -> Field {
        let tg = TimeGrid::new(0.0, 1.0, 2).unwrap();
        let sg = SpaceGrid::new(1.0, 3).unwrap();
        Field::new(tg, sg, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 0.125]).unwrap()
    }

    #[test]
    fn field_csv_header_and_rows() {
        let csv = field_to_csv(&small_field());
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("t,x,value"));
        assert_eq!(lines.clone().count(), 9);
        assert_eq!(lines.next(), Some("0.00000000000e0,-1.00000000000e0,1.00000000000e0"));
    }

    #[test]
    fn field_csv_reads_back() {
        let f = small_field();
        let desc = GridDescriptor::of(f.tgrid(), f.sgrid());
        let back = field_from_csv(&GridDescriptor::from_json(&desc.to_json()).unwrap(), &field_to_csv(&f)).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn field_csv_rejects_garbage() {
        let f = small_field();
        let desc = GridDescriptor::of(f.tgrid(), f.sgrid());
        assert!(field_from_csv(&desc, "").is_err());
        assert!(field_from_csv(&desc, "t,x,value\n0,0,1\n").is_err());
        assert!(field_from_csv(&desc, "t,x,value\n0,-1,nan\n").is_err());
        let truncated: String = field_to_csv(&f).lines().take(5).map(|l| format!("{l}\n")).collect();
        assert!(field_from_csv(&desc, &truncated).is_err());
    }

    #[test]
    fn descriptor_rejects_unknown_and_huge() {
        assert!(GridDescriptor::from_json(r#"{"half_width":1,"n_points":3,"t_start":0,"t_end":1,"n_steps":1,"x":2}"#).is_err());
        let d = GridDescriptor::from_json(r#"{"half_width":1,"n_points":300001,"t_start":0,"t_end":1,"n_steps":100000}"#).unwrap();
        assert!(d.grids().is_err());
    }

    #[test]
    fn potential_csv_round_trip() {
        let g = SpaceGrid::new(2.0, 9).unwrap();
        let p = Potential::from_fn(g, |x| (-x * x).exp());
        let back = potential_from_csv(&potential_to_csv(&p)).unwrap();
        assert_eq!(back.grid(), p.grid());
        for (a, b) in back.values().iter().zip(p.values()) {
            assert!((a - b).abs() <= 1e-11 * b.abs().max(1e-300));
        }
        assert!(potential_from_csv("x,value\n-1,0\n0.5,1\n1,0\n").is_err());
    }

    proptest! {
        #[test]
        fn parsers_never_panic(s in "\\PC{0,200}") {
            let _ = potential_from_csv(&s);
            let _ = GridDescriptor::from_json(&s);
            let desc = GridDescriptor { half_width: 1.0, n_points: 3, t_start: 0.0, t_end: 1.0, n_steps: 1 };
            let _ = field_from_csv(&desc, &format!("t,x,value\n{s}"));
        }

        #[test]
        fn fmt_num_keeps_twelve_digits(v in -1e12f64..1e12) {
            let back: f64 = fmt_num(v).parse().unwrap();
            prop_assert!((back - v).abs() <= 1e-11 * v.abs().max(1e-300));
        }
    }
}
