//! Versioned CSV tables passed between pipeline stages.
//!
//! Every file starts with `# schema=gptc.<name>/<version>`, optionally followed by more
//! `# key=value` lines, then a CSV header and the rows. Floats are written with 17
//! significant digits so that a write/read cycle is exact.

use crate::bie::GptTable;
use crate::coeffs::{GammaTable, GeometricFactors, MappingCoefficients, Provenance};
use crate::error::{Error, Result};
use crate::C64;
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Schema {
    pub name: &'static str,
    pub version: u32,
    pub columns: &'static [&'static str],
}

impl Schema {
    pub fn tag(&self) -> String {
        format!("gptc.{}/{}", self.name, self.version)
    }
}

pub const GPT: Schema = Schema {
    name: "gpt",
    version: 1,
    columns: &["k", "n", "Mcc", "Mcs", "Msc", "Mss"],
};

pub const GAMMA: Schema = Schema {
    name: "gamma",
    version: 1,
    columns: &["k", "n", "re_gamma1", "im_gamma1", "re_gamma2", "im_gamma2"],
};

/// Row `k` holds `σ_k`, `b_k` and `μ_{k-2}`; cells past the available order are empty.
pub const FACTORS: Schema = Schema {
    name: "factors",
    version: 1,
    columns: &[
        "k", "re_sigma", "im_sigma", "re_b", "im_b", "re_mu", "im_mu",
    ],
};

pub const THETA: Schema = Schema {
    name: "theta",
    version: 1,
    columns: &["t", "theta"],
};

pub const BOUNDARY: Schema = Schema {
    name: "boundary",
    version: 1,
    columns: &["t", "re_phi", "im_phi"],
};

pub const SC_FACTORS: Schema = Schema {
    name: "sc-factors",
    version: 1,
    columns: &["k", "re_sigma", "im_sigma", "re_b", "im_b"],
};

pub const TRACE: Schema = Schema {
    name: "trace",
    version: 1,
    columns: &["t", "re_z", "im_z"],
};

pub const APPROX: Schema = Schema {
    name: "approx",
    version: 1,
    columns: &["n", "k", "re_sigma_tilde", "im_sigma_tilde", "abs_error"],
};

pub const SIGMA_TABLE: Schema = Schema {
    name: "sigma",
    version: 1,
    columns: &["k", "re_sigma", "im_sigma", "abs_sigma"],
};

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// A parsed table: metadata from the comment header plus raw cells.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub meta: BTreeMap<String, String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn f64_at(&self, row: usize, col: usize) -> Result<f64> {
        parse_f64(&self.rows[row][col], row, col)
    }

    pub fn opt_f64_at(&self, row: usize, col: usize) -> Result<Option<f64>> {
        let s = &self.rows[row][col];
        if s.is_empty() {
            Ok(None)
        } else {
            parse_f64(s, row, col).map(Some)
        }
    }

    pub fn usize_at(&self, row: usize, col: usize) -> Result<usize> {
        self.rows[row][col].parse().map_err(|_| {
            Error::Parse(format!(
                "row {}: column {} is not a non-negative integer: {:?}",
                row + 1,
                col + 1,
                self.rows[row][col]
            ))
        })
    }

    pub fn meta_f64(&self, key: &str) -> Result<Option<f64>> {
        self.meta
            .get(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| Error::Parse(format!("header field {key} is not a number: {v:?}")))
            })
            .transpose()
    }
}

fn parse_f64(s: &str, row: usize, col: usize) -> Result<f64> {
    s.trim().parse().map_err(|_| {
        Error::Parse(format!(
            "row {}: column {} is not a number: {s:?}",
            row + 1,
            col + 1
        ))
    })
}

pub fn write_table(
    schema: &Schema,
    meta: &[(&str, String)],
    rows: &[Vec<String>],
) -> Result<String> {
    let mut out = format!("# schema={}\n", schema.tag());
    for (k, v) in meta {
        out.push_str(&format!("# {k}={v}\n"));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Parse(e.to_string());
    w.write_record(schema.columns).map_err(csv_err)?;
    for r in rows {
        if r.len() != schema.columns.len() {
            return Err(Error::LengthMismatch {
                expected: schema.columns.len(),
                got: r.len(),
            });
        }
        w.write_record(r).map_err(csv_err)?;
    }
    let body = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    out.push_str(&String::from_utf8(body).expect("CSV output is ASCII"));
    Ok(out)
}

/// Parse a table and check its schema tag and header against `schema`.
pub fn read_table(text: &str, schema: &Schema) -> Result<Table> {
    let mut meta = BTreeMap::new();
    let mut body_start = 0;
    for line in text.split_inclusive('\n') {
        let Some(rest) = line.trim_end().strip_prefix('#') else {
            break;
        };
        body_start += line.len();
        if let Some((k, v)) = rest.trim().split_once('=') {
            meta.insert(k.trim().to_string(), v.trim().to_string());
        }
    }
    match meta.get("schema") {
        Some(tag) if *tag == schema.tag() => {}
        Some(tag) => {
            return Err(Error::Parse(format!(
                "expected schema {}, found {tag}",
                schema.tag()
            )))
        }
        None => {
            return Err(Error::Parse(format!(
                "missing schema line; expected {}",
                schema.tag()
            )))
        }
    }
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(&text.as_bytes()[body_start..]);
    let header = r
        .headers()
        .map_err(|e| Error::Parse(e.to_string()))?
        .clone();
    if header.iter().ne(schema.columns.iter().copied()) {
        return Err(Error::Parse(format!(
            "header {:?} does not match schema {} columns {:?}",
            header.iter().collect::<Vec<_>>(),
            schema.tag(),
            schema.columns
        )));
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
        rows.push(rec.iter().map(str::to_string).collect());
    }
    Ok(Table { meta, rows })
}

pub fn write_gpt(t: &GptTable) -> Result<String> {
    let mut rows = Vec::with_capacity(t.order * t.order);
    for k in 1..=t.order {
        for n in 1..=t.order {
            let mut r = vec![k.to_string(), n.to_string()];
            r.extend(t.get(k, n).iter().map(|&x| fmt_f64(x)));
            rows.push(r);
        }
    }
    write_table(&GPT, &[], &rows)
}

/// Read a square `(k, n)` table; rows may come in any order but every pair must appear once.
fn read_square(text: &str, schema: &Schema) -> Result<(usize, Vec<(usize, usize, [f64; 4])>)> {
    let t = read_table(text, schema)?;
    let order = (t.rows.len() as f64).sqrt().round() as usize;
    if order == 0 || order * order != t.rows.len() {
        return Err(Error::Parse(format!(
            "{} rows do not form a square table",
            t.rows.len()
        )));
    }
    let mut seen = vec![false; order * order];
    let mut out = Vec::with_capacity(t.rows.len());
    for i in 0..t.rows.len() {
        let (k, n) = (t.usize_at(i, 0)?, t.usize_at(i, 1)?);
        if !(1..=order).contains(&k) || !(1..=order).contains(&n) {
            return Err(Error::Parse(format!(
                "row {}: index ({k}, {n}) outside 1..={order}",
                i + 1
            )));
        }
        let slot = (k - 1) * order + n - 1;
        if seen[slot] {
            return Err(Error::Parse(format!(
                "row {}: duplicate index ({k}, {n})",
                i + 1
            )));
        }
        seen[slot] = true;
        let v = [
            t.f64_at(i, 2)?,
            t.f64_at(i, 3)?,
            t.f64_at(i, 4)?,
            t.f64_at(i, 5)?,
        ];
        out.push((k, n, v));
    }
    Ok((order, out))
}

pub fn read_gpt(text: &str) -> Result<GptTable> {
    let (order, rows) = read_square(text, &GPT)?;
    let mut t = GptTable::zeros(order);
    for (k, n, v) in rows {
        t.set(k, n, v);
    }
    Ok(t)
}

pub fn write_gamma(g: &GammaTable) -> Result<String> {
    let mut rows = Vec::with_capacity(g.order * g.order);
    for k in 1..=g.order {
        for n in 1..=g.order {
            let (a, b) = (g.g1(k, n), g.g2(k, n));
            rows.push(vec![
                k.to_string(),
                n.to_string(),
                fmt_f64(a.re),
                fmt_f64(a.im),
                fmt_f64(b.re),
                fmt_f64(b.im),
            ]);
        }
    }
    write_table(&GAMMA, &[], &rows)
}

pub fn read_gamma(text: &str) -> Result<GammaTable> {
    let (order, rows) = read_square(text, &GAMMA)?;
    let mut g = GammaTable::zeros(order);
    for (k, n, v) in rows {
        g.set(k, n, C64::new(v[0], v[1]), C64::new(v[2], v[3]));
    }
    Ok(g)
}

/// Contents of a factors table.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorsData {
    pub capacity: Option<f64>,
    pub sigma: GeometricFactors,
    pub b: Vec<C64>,
    /// `mu[0]` is `μ_{-1}`.
    pub mu: Vec<C64>,
}

impl FactorsData {
    pub fn mapping(&self) -> Option<MappingCoefficients> {
        self.capacity.map(|capacity| MappingCoefficients {
            capacity,
            b: self.b.clone(),
            mu: self.mu.clone(),
        })
    }
}

fn provenance_name(p: Provenance) -> &'static str {
    match p {
        Provenance::FromGpts => "from-gpts",
        Provenance::FromScOracle => "from-sc-oracle",
        Provenance::Analytic => "analytic",
    }
}

fn provenance_from_name(s: &str) -> Result<Provenance> {
    match s {
        "from-gpts" => Ok(Provenance::FromGpts),
        "from-sc-oracle" => Ok(Provenance::FromScOracle),
        "analytic" => Ok(Provenance::Analytic),
        _ => Err(Error::Parse(format!("unknown provenance {s:?}"))),
    }
}

fn opt_pair(z: Option<C64>) -> [String; 2] {
    match z {
        Some(z) => [fmt_f64(z.re), fmt_f64(z.im)],
        None => [String::new(), String::new()],
    }
}

pub fn write_factors(
    map: Option<&MappingCoefficients>,
    sigma: &GeometricFactors,
) -> Result<String> {
    let empty = Vec::new();
    let (b, mu) = map.map_or((&empty, &empty), |m| (&m.b, &m.mu));
    let rows_n = sigma.order().max(b.len()).max(mu.len());
    let rows: Vec<Vec<String>> = (1..=rows_n)
        .map(|k| {
            let mut r = vec![k.to_string()];
            r.extend(opt_pair(sigma.sigma.get(k - 1).copied()));
            r.extend(opt_pair(b.get(k - 1).copied()));
            r.extend(opt_pair(mu.get(k - 1).copied()));
            r
        })
        .collect();
    let mut meta = vec![("provenance", provenance_name(sigma.provenance).to_string())];
    if let Some(m) = map {
        meta.push(("capacity", fmt_f64(m.capacity)));
    }
    write_table(&FACTORS, &meta, &rows)
}

fn read_column_pair(t: &Table, col: usize, what: &str) -> Result<Vec<C64>> {
    let mut out = Vec::new();
    let mut ended = false;
    for i in 0..t.rows.len() {
        match (t.opt_f64_at(i, col)?, t.opt_f64_at(i, col + 1)?) {
            (Some(re), Some(im)) if !ended => out.push(C64::new(re, im)),
            (None, None) => ended = true,
            _ => {
                return Err(Error::Parse(format!(
                    "row {}: {what} column has a gap or a half-filled cell",
                    i + 1
                )))
            }
        }
    }
    Ok(out)
}

pub fn read_factors(text: &str) -> Result<FactorsData> {
    let t = read_table(text, &FACTORS)?;
    for i in 0..t.rows.len() {
        if t.usize_at(i, 0)? != i + 1 {
            return Err(Error::Parse(format!("row {}: k must be {}", i + 1, i + 1)));
        }
    }
    let provenance = match t.meta.get("provenance") {
        Some(p) => provenance_from_name(p)?,
        None => Provenance::FromGpts,
    };
    Ok(FactorsData {
        capacity: t.meta_f64("capacity")?,
        sigma: GeometricFactors::new(read_column_pair(&t, 1, "sigma")?, provenance),
        b: read_column_pair(&t, 3, "b")?,
        mu: read_column_pair(&t, 5, "mu")?,
    })
}

pub fn write_series(schema: &Schema, t: &[f64], columns: &[Vec<f64>]) -> Result<String> {
    let rows: Vec<Vec<String>> = t
        .iter()
        .enumerate()
        .map(|(i, &ti)| {
            let mut r = vec![fmt_f64(ti)];
            r.extend(columns.iter().map(|c| fmt_f64(c[i])));
            r
        })
        .collect();
    write_table(schema, &[], &rows)
}

pub fn write_sigma_table(sigma: &GeometricFactors) -> Result<String> {
    let rows: Vec<Vec<String>> = sigma
        .sigma
        .iter()
        .enumerate()
        .map(|(i, s)| {
            vec![
                (i + 1).to_string(),
                fmt_f64(s.re),
                fmt_f64(s.im),
                fmt_f64(s.norm()),
            ]
        })
        .collect();
    write_table(
        &SIGMA_TABLE,
        &[("provenance", provenance_name(sigma.provenance).to_string())],
        &rows,
    )
}

pub fn read_sigma_table(text: &str) -> Result<GeometricFactors> {
    let t = read_table(text, &SIGMA_TABLE)?;
    let mut sigma = Vec::with_capacity(t.rows.len());
    for i in 0..t.rows.len() {
        if t.usize_at(i, 0)? != i + 1 {
            return Err(Error::Parse(format!("row {}: k must be {}", i + 1, i + 1)));
        }
        sigma.push(C64::new(t.f64_at(i, 1)?, t.f64_at(i, 2)?));
    }
    let provenance = match t.meta.get("provenance") {
        Some(p) => provenance_from_name(p)?,
        None => Provenance::FromGpts,
    };
    Ok(GeometricFactors::new(sigma, provenance))
}

/// `σ` from either a factors table or a σ table, told apart by the schema line.
pub fn read_any_sigma(text: &str) -> Result<GeometricFactors> {
    if text.starts_with(&format!("# schema={}\n", SIGMA_TABLE.tag())) {
        read_sigma_table(text)
    } else {
        read_factors(text).map(|f| f.sigma)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_roundtrip_is_exact() {
        let mut g = GammaTable::zeros(3);
        for k in 1..=3 {
            for n in 1..=3 {
                let x = (k * 7 + n) as f64;
                g.set(
                    k,
                    n,
                    C64::new(1.0 / x, -x.sqrt()),
                    C64::new(x.ln(), 1e-300 * x),
                );
            }
        }
        let text = write_gamma(&g).unwrap();
        assert!(text.starts_with("# schema=gptc.gamma/1\nk,n,re_gamma1"));
        let back = read_gamma(&text).unwrap();
        for k in 1..=3 {
            for n in 1..=3 {
                assert_eq!(back.g1(k, n), g.g1(k, n));
                assert_eq!(back.g2(k, n), g.g2(k, n));
            }
        }
    }

    #[test]
    fn gpt_roundtrip_is_exact() {
        let mut t = GptTable::zeros(2);
        t.set(1, 2, [0.1, -0.2, std::f64::consts::PI, 1e10 / 3.0]);
        let back = read_gpt(&write_gpt(&t).unwrap()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn factors_roundtrip_with_ragged_columns() {
        let c = |a: f64, b: f64| C64::new(a, b);
        let map = MappingCoefficients {
            capacity: 1.5,
            b: vec![c(1.0, 0.0), c(0.0, 0.0), c(1.0 / 3.0, 0.1)],
            mu: vec![c(1.0, 0.0), c(0.0, 0.0)],
        };
        let s = GeometricFactors::new(vec![c(0.3, -0.7), c(-1.0 / 7.0, 2.0)], Provenance::FromGpts);
        let text = write_factors(Some(&map), &s).unwrap();
        let back = read_factors(&text).unwrap();
        assert_eq!(back.capacity, Some(1.5));
        assert_eq!(back.sigma, s);
        assert_eq!(back.b, map.b);
        assert_eq!(back.mu, map.mu);
    }

    #[test]
    fn wrong_schema_and_header_are_rejected() {
        let g = write_gamma(&GammaTable::zeros(1)).unwrap();
        assert!(matches!(read_gpt(&g), Err(Error::Parse(_))));
        let bad = g.replace("re_gamma1", "gamma1");
        assert!(matches!(read_gamma(&bad), Err(Error::Parse(_))));
        assert!(matches!(read_gamma("k,n\n1,1\n"), Err(Error::Parse(_))));
        let bad = g.replace("gptc.gamma/1", "gptc.gamma/2");
        assert!(matches!(read_gamma(&bad), Err(Error::Parse(_))));
    }

    #[test]
    fn non_square_and_non_numeric_tables_are_rejected() {
        let mut g = write_gamma(&GammaTable::zeros(2)).unwrap();
        g.push_str("1,1,0,0,0,0\n");
        assert!(read_gamma(&g).is_err());
        let g = write_gamma(&GammaTable::zeros(1))
            .unwrap()
            .replace("0.0000000000000000e0", "x");
        assert!(read_gamma(&g).is_err());
    }

    #[test]
    fn sigma_table_roundtrip() {
        let s = GeometricFactors::new(
            vec![C64::new(0.1, -2.0 / 3.0), C64::new(1e-300, 7.0)],
            Provenance::FromScOracle,
        );
        let text = write_sigma_table(&s).unwrap();
        assert_eq!(read_sigma_table(&text).unwrap(), s);
        assert_eq!(read_any_sigma(&text).unwrap(), s);
        let f = write_factors(None, &s).unwrap();
        assert_eq!(read_any_sigma(&f).unwrap(), s);
    }

    #[test]
    fn floats_keep_seventeen_digits() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        let x = 0.1f64 + 0.2;
        assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
    }
}
