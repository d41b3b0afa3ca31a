//! Column-oriented result table and its CSV form.
//!
//! CSV layout: optional `# key=value` metadata lines, a header row, then one
//! comma-separated row per sample. Numbers are written with 17 significant
//! digits so that parsing the text returns the identical `f64` values.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesTable {
    columns: Vec<(String, Vec<f64>)>,
    metadata: Vec<(String, String)>,
}

/// Renders a float with 17 significant digits.
pub fn format_number(v: f64) -> String {
    format!("{v:.16e}")
}

impl SeriesTable {
    /// Starts a table whose first column `t` must be strictly increasing.
    pub fn new(t: Vec<f64>) -> Result<Self> {
        Self::with_first_column("t", t)
    }

    pub fn with_first_column(name: &str, t: Vec<f64>) -> Result<Self> {
        if t.is_empty() {
            return Err(Error::GridMismatch("table needs at least one row".into()));
        }
        if let Some(i) = t.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::GridOrder(i + 1));
        }
        Ok(Self { columns: vec![(name.to_string(), t)], metadata: Vec::new() })
    }

    pub fn push_column(&mut self, name: &str, values: Vec<f64>) -> Result<()> {
        if values.len() != self.len() {
            return Err(Error::GridMismatch(format!(
                "column '{name}' has {} rows, table has {}",
                values.len(),
                self.len()
            )));
        }
        self.columns.push((name.to_string(), values));
        Ok(())
    }

    pub fn set_meta(&mut self, key: &str, value: String) {
        match self.metadata.iter_mut().find(|(k, _)| k == key) {
            Some(entry) => entry.1 = value,
            None => self.metadata.push((key.to_string(), value)),
        }
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn metadata(&self) -> &[(String, String)] {
        &self.metadata
    }

    pub fn len(&self) -> usize {
        self.columns[0].1.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn names(&self) -> Vec<&str> {
        self.columns.iter().map(|(n, _)| n.as_str()).collect()
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }

    pub fn t(&self) -> &[f64] {
        &self.columns[0].1
    }

    pub fn to_csv(&self, with_metadata: bool) -> String {
        let mut out = String::new();
        if with_metadata {
            for (k, v) in &self.metadata {
                out.push_str(&format!("# {k}={v}\n"));
            }
        }
        out.push_str(&self.names().join(","));
        out.push('\n');
        for row in 0..self.len() {
            let line: Vec<String> = self.columns.iter().map(|(_, v)| format_number(v[row])).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    /// Inverse of [`SeriesTable::to_csv`].
    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut metadata = Vec::new();
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = loop {
            let line = lines.next().ok_or_else(|| Error::Input("missing header row".into()))?;
            match line.strip_prefix("# ") {
                Some(meta) => {
                    let (k, v) =
                        meta.split_once('=').ok_or_else(|| Error::Input(format!("bad metadata line '{line}'")))?;
                    metadata.push((k.to_string(), v.to_string()));
                }
                None => break line,
            }
        };
        let names: Vec<&str> = header.split(',').collect();
        let mut values: Vec<Vec<f64>> = vec![Vec::new(); names.len()];
        for (lineno, line) in lines.enumerate() {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != names.len() {
                return Err(Error::Input(format!(
                    "row {} has {} fields, expected {}",
                    lineno + 1,
                    fields.len(),
                    names.len()
                )));
            }
            for (col, field) in values.iter_mut().zip(fields) {
                col.push(field.trim().parse().map_err(|_| Error::Input(format!("bad number '{field}'")))?);
            }
        }
        let mut cols = names.into_iter().zip(values);
        let (first, t) = cols.next().ok_or_else(|| Error::Input("empty header".into()))?;
        let mut table = Self::with_first_column(first, t)?;
        for (name, v) in cols {
            table.push_column(name, v)?;
        }
        table.metadata = metadata;
        Ok(table)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn csv_layout() {
        let mut t = SeriesTable::new(vec![1.0, 2.5]).unwrap();
        t.push_column("approx", vec![0.1, -3.0e-20]).unwrap();
        t.set_meta("kind", "integral".into());
        let csv = t.to_csv(false);
        assert_eq!(
            csv,
            "t,approx\n1.0000000000000000e0,1.0000000000000001e-1\n2.5000000000000000e0,-3.0000000000000003e-20\n"
        );
        assert!(t.to_csv(true).starts_with("# kind=integral\nt,approx\n"));
    }

    #[test]
    fn invariants_enforced() {
        assert!(SeriesTable::new(vec![]).is_err());
        assert!(matches!(SeriesTable::new(vec![1.0, 1.0]), Err(Error::GridOrder(1))));
        let mut t = SeriesTable::new(vec![1.0, 2.0]).unwrap();
        assert!(t.push_column("x", vec![1.0]).is_err());
        assert!(SeriesTable::parse_csv("t,x\n1,2,3\n").is_err());
        assert!(SeriesTable::parse_csv("").is_err());
    }

    proptest! {
        #[test]
        fn csv_round_trip_is_bit_exact(
            start in -1e6f64..1e6,
            steps in prop::collection::vec(1e-12f64..1e3, 1..20),
            seed in prop::collection::vec(prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO, 20),
        ) {
            let mut t = vec![start];
            for s in &steps {
                let next = t.last().unwrap() + s;
                prop_assume!(next > *t.last().unwrap());
                t.push(next);
            }
            let vals: Vec<f64> = seed.iter().cycle().take(t.len()).cloned().collect();
            let mut table = SeriesTable::new(t).unwrap();
            table.push_column("v", vals).unwrap();
            table.set_meta("function", "pow4".into());
            let back = SeriesTable::parse_csv(&table.to_csv(true)).unwrap();
            prop_assert_eq!(back.t().iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
                            table.t().iter().map(|v| v.to_bits()).collect::<Vec<_>>());
            prop_assert_eq!(back.column("v").unwrap().iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
                            table.column("v").unwrap().iter().map(|v| v.to_bits()).collect::<Vec<_>>());
            prop_assert_eq!(back.metadata(), table.metadata());
        }
    }
}
