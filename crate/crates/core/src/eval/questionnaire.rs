//! Satisfaction questionnaire file: `session_id,item_1,..,item_5` per line,
//! integer Likert values 1..=5. Blank lines, `#` comments and a header line
//! starting with `session_id` are skipped.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const ITEMS: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuestionnaireResponse {
    pub session_id: String,
    pub items: [u8; ITEMS],
}

impl QuestionnaireResponse {
    pub fn new(session_id: impl Into<String>, items: [u8; ITEMS]) -> Result<Self> {
        if let Some(v) = items.iter().find(|v| !(1..=5).contains(*v)) {
            return Err(Error::invalid(format!("item score {v} outside 1..=5")));
        }
        Ok(Self { session_id: session_id.into(), items })
    }

    pub fn score(&self) -> f64 {
        average_items(&self.items)
    }
}

pub fn average_items(items: &[u8; ITEMS]) -> f64 {
    items.iter().map(|&v| f64::from(v)).sum::<f64>() / ITEMS as f64
}

pub fn parse_questionnaire<R: BufRead>(reader: R) -> Result<Vec<QuestionnaireResponse>> {
    let mut out: Vec<QuestionnaireResponse> = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::Format { line: line_no, msg: e.to_string() })?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') || t.starts_with("session_id") {
            continue;
        }
        let f: Vec<&str> = t.split(',').map(str::trim).collect();
        if f.len() != ITEMS + 1 {
            return Err(Error::Format { line: line_no, msg: format!("expected session id and {ITEMS} items, found {} fields", f.len()) });
        }
        let mut items = [0u8; ITEMS];
        for (slot, s) in items.iter_mut().zip(&f[1..]) {
            *slot = s.parse().map_err(|_| Error::Format { line: line_no, msg: format!("item {s:?} is not an integer") })?;
        }
        let r = QuestionnaireResponse::new(f[0], items).map_err(|e| Error::Format { line: line_no, msg: e.to_string() })?;
        if out.iter().any(|o| o.session_id == r.session_id) {
            return Err(Error::Format { line: line_no, msg: format!("duplicate session {}", r.session_id) });
        }
        out.push(r);
    }
    Ok(out)
}

pub fn write_questionnaire<W: Write>(mut w: W, responses: &[QuestionnaireResponse]) -> std::io::Result<()> {
    writeln!(w, "session_id,item_1,item_2,item_3,item_4,item_5")?;
    for r in responses {
        write!(w, "{}", r.session_id)?;
        for v in r.items {
            write!(w, ",{v}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// `n·Σx² - (Σx)²`, which is n(n-1) times the sample variance. Exact for
/// integer item scores.
fn scaled_variance(x: impl Iterator<Item = f64>) -> f64 {
    let (mut n, mut s, mut ss) = (0.0, 0.0, 0.0);
    for v in x {
        n += 1.0;
        s += v;
        ss += v * v;
    }
    n * ss - s * s
}

/// `k/(k-1) · (1 - Σ item variances / variance of row sums)`, sample
/// variances. Rows are respondents, columns items.
pub fn cronbach_alpha(rows: &[Vec<f64>]) -> Result<f64> {
    if rows.len() < 2 {
        return Err(Error::InsufficientData { needed: 2, got: rows.len() });
    }
    let k = rows[0].len();
    if k < 2 || rows.iter().any(|r| r.len() != k) {
        return Err(Error::invalid("every respondent needs the same number (at least 2) of items"));
    }
    let item_var: f64 = (0..k).map(|j| scaled_variance(rows.iter().map(|r| r[j]))).sum();
    let total_var = scaled_variance(rows.iter().map(|r| r.iter().sum::<f64>()));
    if total_var <= 0.0 {
        return Err(Error::invalid("total scores have zero variance"));
    }
    let k = k as f64;
    // One division at the end keeps identical items at exactly 1.
    Ok(k * (total_var - item_var) / ((k - 1.0) * total_var))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn averages() {
        assert_eq!(average_items(&[5, 5, 5, 5, 5]), 5.0);
        assert_eq!(average_items(&[1, 2, 3, 4, 5]), 3.0);
        assert!((average_items(&[1, 1, 2, 2, 1]) - 1.4).abs() < 1e-15);
    }

    #[test]
    fn parse_round_trip_and_errors() {
        let rs = vec![QuestionnaireResponse::new("s01", [1, 2, 3, 4, 5]).unwrap(), QuestionnaireResponse::new("s02", [5, 5, 4, 4, 5]).unwrap()];
        let mut buf = Vec::new();
        write_questionnaire(&mut buf, &rs).unwrap();
        assert_eq!(parse_questionnaire(buf.as_slice()).unwrap(), rs);
        assert!(matches!(parse_questionnaire("a,1,2,3,4\n".as_bytes()), Err(Error::Format { line: 1, .. })));
        assert!(matches!(parse_questionnaire("# c\na,1,2,3,4,6\n".as_bytes()), Err(Error::Format { line: 2, .. })));
        assert!(parse_questionnaire("a,1,2,3,4,x\n".as_bytes()).is_err());
        assert!(parse_questionnaire("a,1,2,3,4,5\na,1,1,1,1,1\n".as_bytes()).is_err());
    }

    #[test]
    fn alpha_identical_items_is_one() {
        let rows: Vec<Vec<f64>> = [1.0, 3.0, 2.0, 5.0, 4.0].iter().map(|&v| vec![v; 5]).collect();
        assert_eq!(cronbach_alpha(&rows).unwrap(), 1.0);
    }

    #[test]
    fn alpha_hand_example() {
        // Items 1 and 2 have variance 11/12, item 3 is constant; row sums
        // 3, 5, 7, 7 have variance 11/3. alpha = 3/2 · (1 - (11/6)/(11/3)).
        let rows = vec![vec![1.0, 1.0, 1.0], vec![2.0, 2.0, 1.0], vec![3.0, 3.0, 1.0], vec![3.0, 3.0, 1.0]];
        let a = cronbach_alpha(&rows).unwrap();
        assert!((a - 0.75).abs() < 1e-12, "{a}");
    }

    #[test]
    fn alpha_errors() {
        assert!(cronbach_alpha(&[vec![1.0, 2.0]]).is_err());
        assert!(cronbach_alpha(&[vec![1.0, 2.0], vec![2.0, 1.0]]).is_err());
    }
}
