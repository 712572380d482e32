//! CSV readers and writers for coefficients, samples, density matrices and
//! phase-space grids, and the weight specification parser.
//!
//! Every reader reports malformed input as [`Error::Parse`] with a 1-based
//! line number. Writers print floats in shortest round-trip form, so output
//! bytes depend only on the values.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hermite::CoefficientSequence;
use crate::phase_space::{Convention, PhaseSpaceGrid};
use crate::states::DensityMatrix;
use crate::weights::WeightFunction;

/// Relative tolerance for the Hermitian-pair and grid-position checks.
const MATCH_TOL: f64 = 1e-12;

fn parse_err(line: u64, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

/// Byte offsets of the newlines in a text, for mapping csv positions to lines.
struct Lines<'a> {
    text: &'a [u8],
    newlines: Vec<usize>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let text = text.as_bytes();
        Self { text, newlines: text.iter().enumerate().filter(|(_, &b)| b == b'\n').map(|(k, _)| k).collect() }
    }

    /// 1-based line of a byte offset; csv's own line counter skips blank lines.
    fn at(&self, pos: Option<&csv::Position>) -> u64 {
        pos.map_or(1, |p| {
            let mut end = (p.byte() as usize).min(self.text.len());
            while end < self.text.len() && matches!(self.text[end], b'\n' | b'\r') {
                end += 1;
            }
            self.newlines.partition_point(|&k| k < end) as u64 + 1
        })
    }
}

fn csv_err(lines: &Lines, e: csv::Error) -> Error {
    let line = lines.at(e.position());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        csv::ErrorKind::UnequalLengths { expected_len, len, .. } => {
            parse_err(line, format!("expected {expected_len} fields, found {len}"))
        }
        kind => parse_err(line, format!("{kind:?}")),
    }
}

/// Parsed data rows with their line numbers, after checking the header.
fn read_rows(text: &str, header: &[&str]) -> Result<Vec<(u64, Vec<f64>)>> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .has_headers(true)
        .from_reader(text.as_bytes());
    let lines = Lines::new(text);
    let found = rdr.headers().map_err(|e| csv_err(&lines, e))?.clone();
    let line = lines.at(found.position());
    if found.iter().ne(header.iter().copied()) {
        return Err(parse_err(
            line,
            format!("expected header '{}', found '{}'", header.join(","), found.iter().collect::<Vec<_>>().join(",")),
        ));
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_err(&lines, e))?;
        let line = lines.at(rec.position());
        if rec.len() != header.len() {
            return Err(parse_err(line, format!("expected {} fields, found {}", header.len(), rec.len())));
        }
        let mut vals = Vec::with_capacity(rec.len());
        for (field, name) in rec.iter().zip(header) {
            let v: f64 = field.parse().map_err(|_| parse_err(line, format!("field '{name}': cannot parse '{field}'")))?;
            if !v.is_finite() {
                return Err(parse_err(line, format!("field '{name}' is not finite")));
            }
            vals.push(v);
        }
        rows.push((line, vals));
    }
    Ok(rows)
}

fn index(v: f64, line: u64, name: &str) -> Result<usize> {
    if v < 0.0 || v.fract() != 0.0 || v > u32::MAX as f64 {
        return Err(parse_err(line, format!("field '{name}' must be a nonnegative integer, got {v}")));
    }
    Ok(v as usize)
}

fn read_text(mut r: impl Read) -> Result<String> {
    let mut s = String::new();
    r.read_to_string(&mut s)?;
    Ok(s)
}

/// Coefficient CSV `n,re,im`; unlisted indices are zero.
pub fn read_coefficients(r: impl Read) -> Result<CoefficientSequence> {
    let rows = read_rows(&read_text(r)?, &["n", "re", "im"])?;
    let mut entries = BTreeMap::new();
    for (line, v) in rows {
        let n = index(v[0], line, "n")?;
        if entries.insert(n, Complex64::new(v[1], v[2])).is_some() {
            return Err(parse_err(line, format!("index {n} listed twice")));
        }
    }
    let Some((&n_max, _)) = entries.last_key_value() else {
        return Err(parse_err(1, "no coefficients"));
    };
    let mut values = vec![Complex64::new(0.0, 0.0); n_max + 1];
    for (n, v) in entries {
        values[n] = v;
    }
    CoefficientSequence::new(values)
}

pub fn write_coefficients(mut w: impl Write, alpha: &CoefficientSequence) -> Result<()> {
    writeln!(w, "n,re,im")?;
    for (n, v) in alpha.values().iter().enumerate() {
        writeln!(w, "{n},{},{}", v.re, v.im)?;
    }
    Ok(())
}

/// Function sample CSV `x,re,im`, in file order.
pub fn read_samples(r: impl Read) -> Result<(Vec<f64>, Vec<Complex64>)> {
    let rows = read_rows(&read_text(r)?, &["x", "re", "im"])?;
    if rows.is_empty() {
        return Err(parse_err(1, "no samples"));
    }
    Ok(rows.into_iter().map(|(_, v)| (v[0], Complex64::new(v[1], v[2]))).unzip())
}

pub fn write_samples(mut w: impl Write, xs: &[f64], values: &[Complex64]) -> Result<()> {
    if xs.len() != values.len() {
        return Err(Error::Data(format!("{} abscissae but {} values", xs.len(), values.len())));
    }
    writeln!(w, "x,re,im")?;
    for (x, v) in xs.iter().zip(values) {
        writeln!(w, "{x},{},{}", v.re, v.im)?;
    }
    Ok(())
}

/// Density CSV `m,n,re,im`. Unlisted entries are zero; an entry listed on
/// one side of the diagonal only is mirrored as its conjugate, and a pair
/// listed on both sides must be conjugate.
pub fn read_density(r: impl Read) -> Result<DensityMatrix> {
    let rows = read_rows(&read_text(r)?, &["m", "n", "re", "im"])?;
    let mut entries: BTreeMap<(usize, usize), (u64, Complex64)> = BTreeMap::new();
    let mut dim = 0;
    for (line, v) in rows {
        let (m, n) = (index(v[0], line, "m")?, index(v[1], line, "n")?);
        dim = dim.max(m + 1).max(n + 1);
        if entries.insert((m, n), (line, Complex64::new(v[2], v[3]))).is_some() {
            return Err(parse_err(line, format!("entry ({m},{n}) listed twice")));
        }
    }
    if dim == 0 {
        return Err(parse_err(1, "no density entries"));
    }
    let mut mat = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
    for (&(m, n), &(line, v)) in &entries {
        let mirror = entries.get(&(n, m)).map(|&(_, u)| u.conj());
        if let Some(u) = mirror {
            if (u - v).norm() > MATCH_TOL * v.norm().max(1.0) {
                return Err(parse_err(
                    line,
                    format!("entry ({m},{n}) = {v} conflicts with conj of ({n},{m}) = {u}"),
                ));
            }
        }
        mat[(m, n)] = v;
        if mirror.is_none() {
            mat[(n, m)] = v.conj();
        }
    }
    DensityMatrix::explicit(mat)
}

/// Writes every entry of the matrix.
pub fn write_density(mut w: impl Write, rho: &DensityMatrix) -> Result<()> {
    writeln!(w, "m,n,re,im")?;
    let e = rho.entries();
    for m in 0..e.nrows() {
        for n in 0..e.ncols() {
            let v = e[(m, n)];
            writeln!(w, "{m},{n},{},{}", v.re, v.im)?;
        }
    }
    Ok(())
}

fn convention_tag(text: &str) -> Result<Convention> {
    let mut found = None;
    for (k, line) in text.lines().enumerate() {
        let Some(comment) = line.trim().strip_prefix('#') else { continue };
        if let Some(tag) = comment.trim().strip_prefix("convention=") {
            let c: Convention = tag.parse()?;
            if found.is_some_and(|f| f != c) {
                return Err(parse_err(k as u64 + 1, "conflicting convention tags"));
            }
            found = Some(c);
        }
    }
    found.ok_or_else(|| Error::Convention("missing '# convention=plain|tilde' comment line".into()))
}

fn same(a: f64, b: f64) -> bool {
    (a - b).abs() <= MATCH_TOL * a.abs().max(b.abs()).max(1.0)
}

/// Phase-space CSV `q,p,re,im`, row-major (one block of p values per q),
/// with a `# convention=plain|tilde` comment line.
pub fn read_phase_space(r: impl Read) -> Result<PhaseSpaceGrid> {
    let text = read_text(r)?;
    let convention = convention_tag(&text)?;
    let rows = read_rows(&text, &["q", "p", "re", "im"])?;
    let Some((_, first)) = rows.first() else {
        return Err(parse_err(1, "no phase-space values"));
    };
    let np = rows.iter().take_while(|(_, v)| same(v[0], first[0])).count();
    if rows.len() % np != 0 {
        return Err(parse_err(rows[rows.len() - 1].0, format!("{} rows do not fill blocks of {np}", rows.len())));
    }
    let p_axis: Vec<f64> = rows[..np].iter().map(|(_, v)| v[1]).collect();
    let q_axis: Vec<f64> = rows.iter().step_by(np).map(|(_, v)| v[0]).collect();
    let mut values = Vec::with_capacity(rows.len());
    for (k, (line, v)) in rows.iter().enumerate() {
        let (i, j) = (k / np, k % np);
        if !same(v[0], q_axis[i]) || !same(v[1], p_axis[j]) {
            return Err(parse_err(
                *line,
                format!("expected (q, p) = ({}, {}), found ({}, {})", q_axis[i], p_axis[j], v[0], v[1]),
            ));
        }
        values.push(Complex64::new(v[2], v[3]));
    }
    PhaseSpaceGrid::new(q_axis, p_axis, values, convention)
}

pub fn write_phase_space(mut w: impl Write, grid: &PhaseSpaceGrid) -> Result<()> {
    writeln!(w, "# convention={}", grid.convention())?;
    writeln!(w, "q,p,re,im")?;
    for (i, q) in grid.q_axis().iter().enumerate() {
        for (j, p) in grid.p_axis().iter().enumerate() {
            let v = grid.value(i, j);
            writeln!(w, "{q},{p},{},{}", v.re, v.im)?;
        }
    }
    Ok(())
}

fn json_err(e: serde_json::Error) -> Error {
    // Weight validation failures surface as custom serde errors.
    parse_err(e.line() as u64, e.to_string())
}

/// A weight given as inline JSON (starting with `{`) or as a path to a JSON file.
pub fn parse_weight(spec: &str) -> Result<WeightFunction> {
    let trimmed = spec.trim_start();
    if trimmed.starts_with('{') {
        serde_json::from_str(trimmed).map_err(json_err)
    } else {
        let text = std::fs::read_to_string(Path::new(spec))?;
        serde_json::from_str(&text).map_err(json_err)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::AxisSpec;
    use crate::phase_space::wigner_of_density;

    #[test]
    fn coefficients_fill_gaps() {
        let a = read_coefficients("n,re,im\n0,1,0\n# note\n3, 0.5 ,-0.25\n".as_bytes()).unwrap();
        assert_eq!(a.n_max(), 3);
        assert_eq!(a.get(1), Complex64::new(0.0, 0.0));
        assert_eq!(a.get(3), Complex64::new(0.5, -0.25));
    }

    #[test]
    fn coefficient_round_trip_is_exact() {
        let a = CoefficientSequence::from_fn(20, |n| Complex64::new(1.0 / (n as f64 + 3.0), (n as f64).sin())).unwrap();
        let mut buf = Vec::new();
        write_coefficients(&mut buf, &a).unwrap();
        assert_eq!(read_coefficients(buf.as_slice()).unwrap(), a);
    }

    #[test]
    fn malformed_coefficients_report_lines() {
        let cases = [
            ("n,re\n0,1\n", 1),
            ("n,re,im\n0,1,0\n1,abc,0\n", 3),
            ("n,re,im\n0,1,0\n0,2,0\n", 3),
            ("n,re,im\n0,1,0\n1.5,1,0\n", 3),
            ("n,re,im\n0,1,0\n\n2,1\n", 4),
            ("n,re,im\n0,NaN,0\n", 2),
        ];
        for (text, want) in cases {
            match read_coefficients(text.as_bytes()) {
                Err(Error::Parse { line, .. }) => assert_eq!(line, want, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn samples_keep_order() {
        let (xs, vs) = read_samples("x,re,im\n-1,0.5,0\n1,0.25,1\n".as_bytes()).unwrap();
        assert_eq!(xs, vec![-1.0, 1.0]);
        assert_eq!(vs[1], Complex64::new(0.25, 1.0));
    }

    #[test]
    fn density_hermitian_completion() {
        let rho = read_density("m,n,re,im\n0,0,0.5,0\n1,1,0.5,0\n0,1,0.25,0.125\n".as_bytes()).unwrap();
        assert_eq!(rho.entry(1, 0), Complex64::new(0.25, -0.125));
        let both = read_density("m,n,re,im\n0,0,0.5,0\n1,1,0.5,0\n0,1,0.25,0.125\n1,0,0.25,-0.125\n".as_bytes());
        assert_eq!(both.unwrap(), rho);
    }

    #[test]
    fn density_conflicts_are_detected() {
        let r = read_density("m,n,re,im\n0,0,0.5,0\n1,1,0.5,0\n0,1,0.25,0\n1,0,0.3,0\n".as_bytes());
        assert!(matches!(r, Err(Error::Parse { line: 4, .. })));
        let r = read_density("m,n,re,im\n0,0,1,0.5\n".as_bytes());
        assert!(matches!(r, Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn density_round_trip() {
        let rho = DensityMatrix::explicit_from_fn(3, |m, n| {
            if m == n {
                Complex64::new(0.25, 0.0)
            } else {
                Complex64::new(0.01 * (m + n) as f64, 0.02 * (m as f64 - n as f64))
            }
        })
        .unwrap();
        let mut buf = Vec::new();
        write_density(&mut buf, &rho).unwrap();
        assert_eq!(read_density(buf.as_slice()).unwrap().entries(), rho.entries());
    }

    #[test]
    fn phase_space_round_trip() {
        let ax = AxisSpec::symmetric(2.0, 0.5).unwrap().points();
        let alpha = CoefficientSequence::from_real(&[0.6, 0.8]).unwrap();
        let g = wigner_of_density(&DensityMatrix::pure(&alpha).unwrap(), &ax, &ax).unwrap();
        let mut buf = Vec::new();
        write_phase_space(&mut buf, &g).unwrap();
        assert!(buf.starts_with(b"# convention=plain\nq,p,re,im\n"));
        assert_eq!(read_phase_space(buf.as_slice()).unwrap(), g);
    }

    #[test]
    fn phase_space_needs_a_convention() {
        let r = read_phase_space("q,p,re,im\n0,0,1,0\n".as_bytes());
        assert!(matches!(r, Err(Error::Convention(_))));
        let r = read_phase_space("# convention=weird\nq,p,re,im\n0,0,1,0\n".as_bytes());
        assert!(matches!(r, Err(Error::Convention(_))));
    }

    #[test]
    fn phase_space_rejects_ragged_grids() {
        let text = "# convention=tilde\nq,p,re,im\n0,0,1,0\n0,1,1,0\n1,0,1,0\n1,2,1,0\n";
        assert!(matches!(read_phase_space(text.as_bytes()), Err(Error::Parse { line: 6, .. })));
        let text = "# convention=tilde\nq,p,re,im\n0,0,1,0\n0,1,1,0\n1,0,1,0\n";
        assert!(matches!(read_phase_space(text.as_bytes()), Err(Error::Parse { .. })));
    }

    #[test]
    fn weights_from_inline_json() {
        let w = parse_weight(r#"{"family":"power","lambda":0.5,"beta":1.5}"#).unwrap();
        assert_eq!(w, WeightFunction::power(0.5, 1.5).unwrap());
        let t = parse_weight(r#"{"family":"tabulated","points":[[0,0],[1,1],[2,4]]}"#).unwrap();
        assert_eq!(t.eval(1.5).unwrap(), 2.5);
        assert!(matches!(parse_weight(r#"{"family":"power","lambda":-1,"beta":1}"#), Err(Error::Parse { .. })));
        assert!(matches!(parse_weight("{\n\"family\":\"cubic\"}"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_weight("/nonexistent/weight.json"), Err(Error::Io(_))));
    }
}
