//! Brute-force reference for the evaluation metrics, written from the
//! definitions without touching the library's tally type.

#![allow(dead_code)]

#[derive(Debug, Clone)]
pub struct Row {
    /// 'F' or 'M'.
    pub truth: char,
    /// -1 female, 0 abstain, +1 male.
    pub decision: i8,
    pub country: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expected {
    pub cells: [u64; 6],
    pub precision_f: f64,
    pub recall_f: f64,
    pub f1_f: f64,
    pub precision_m: f64,
    pub recall_m: f64,
    pub f1_m: f64,
    pub accuracy: f64,
    pub coverage: f64,
    pub zero_support_f: bool,
    pub zero_support_m: bool,
}

fn count(rows: &[Row], pred: impl Fn(&Row) -> bool) -> u64 {
    rows.iter().filter(|r| pred(r)).count() as u64
}

fn frac(num: u64, den: u64) -> f64 {
    if den == 0 {
        1.0
    } else {
        num as f64 / den as f64
    }
}

fn harmonic(p: f64, r: f64) -> f64 {
    if p == 0.0 && r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

pub fn expected(rows: &[Row]) -> Expected {
    let said_f = count(rows, |r| r.decision < 0);
    let said_m = count(rows, |r| r.decision > 0);
    let tp_f = count(rows, |r| r.decision < 0 && r.truth == 'F');
    let tp_m = count(rows, |r| r.decision > 0 && r.truth == 'M');
    let cells = [
        tp_f,
        count(rows, |r| r.decision < 0 && r.truth == 'M'),
        tp_m,
        count(rows, |r| r.decision > 0 && r.truth == 'F'),
        count(rows, |r| r.decision == 0 && r.truth == 'F'),
        count(rows, |r| r.decision == 0 && r.truth == 'M'),
    ];
    let precision_f = frac(tp_f, said_f);
    let precision_m = frac(tp_m, said_m);
    let recall_f = frac(tp_f, count(rows, |r| r.truth == 'F'));
    let recall_m = frac(tp_m, count(rows, |r| r.truth == 'M'));
    let n = rows.len() as f64;
    Expected {
        cells,
        precision_f,
        recall_f,
        f1_f: harmonic(precision_f, recall_f),
        precision_m,
        recall_m,
        f1_m: harmonic(precision_m, recall_m),
        accuracy: (tp_f + tp_m) as f64 / n,
        coverage: (said_f + said_m) as f64 / n,
        zero_support_f: said_f == 0,
        zero_support_m: said_m == 0,
    }
}

/// (group name, instances, correct) rows, largest first, "other" last.
pub fn country_rows(rows: &[Row], min_instances: usize) -> Vec<(String, usize, usize)> {
    let mut names: Vec<String> = rows.iter().filter_map(|r| r.country.clone()).collect();
    names.sort();
    names.dedup();
    let mut out = Vec::new();
    let mut other = (0usize, 0usize);
    let correct = |r: &Row| (r.truth == 'F' && r.decision < 0) || (r.truth == 'M' && r.decision > 0);
    for name in names {
        let members: Vec<&Row> = rows.iter().filter(|r| r.country.as_deref() == Some(&name)).collect();
        let hits = members.iter().filter(|r| correct(r)).count();
        if members.len() >= min_instances {
            out.push((name, members.len(), hits));
        } else {
            other.0 += members.len();
            other.1 += hits;
        }
    }
    for r in rows.iter().filter(|r| r.country.is_none()) {
        other.0 += 1;
        other.1 += usize::from(correct(r));
    }
    // stable sort keeps the alphabetical order among equal sizes
    out.sort_by_key(|row| std::cmp::Reverse(row.1));
    if other.0 > 0 {
        out.push(("other".to_string(), other.0, other.1));
    }
    out
}
