//! Comparisons against the golden files checked in under `golden/`.

use std::collections::BTreeMap;

use qel::branch::branching_point;
use qel::entropy::staircase;
use qel::superstable::enumerate_cycles;
use qel::{QuadParam, Signature};

use crate::output::Table;
use crate::Fail;

pub const TABLE1: &str = include_str!("../golden/table1.csv");
pub const TABLE2: &str = include_str!("../golden/table2.csv");
pub const TABLE3: &str = include_str!("../golden/table3.csv");
pub const FIG6: &str = include_str!("../golden/fig6.csv");

const T_SIGMA_TOL: f64 = 5e-4;
const JUMP_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Target {
    Table1,
    Table2,
    Table3,
    Fig6,
}

/// Golden rows with `#` comment lines removed; the header is skipped.
fn golden_rows(src: &str) -> Result<Vec<csv::StringRecord>, Fail> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(src.as_bytes())
        .records()
        .collect::<Result<_, _>>()
        .map_err(|e| Fail::numeric(format!("corrupt golden file: {e}")))
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize) -> Result<T, Fail> {
    rec.get(i)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Fail::numeric(format!("corrupt golden row {rec:?}")))
}

/// Comparison table and the number of mismatching rows.
pub fn run(target: Target) -> Result<(Table, usize), Fail> {
    match target {
        Target::Table1 => table1(),
        Target::Table2 => table2(),
        Target::Table3 => table3(),
        Target::Fig6 => fig6(),
    }
}

fn table1() -> Result<(Table, usize), Fail> {
    let mut table = Table::new(&["signature", "expected", "computed", "match"]);
    let mut bad = 0;
    for rec in golden_rows(TABLE1)? {
        let sig: Signature = field(&rec, 0)?;
        let expected: f64 = field(&rec, 1)?;
        let computed = branching_point(&sig)?.t_sigma;
        let ok = (computed - expected).abs() <= T_SIGMA_TOL;
        bad += usize::from(!ok);
        table.push(vec![sig.to_string().into(), expected.into(), computed.into(), ok.into()]);
    }
    Ok((table, bad))
}

fn table2() -> Result<(Table, usize), Fail> {
    let mut expected: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for rec in golden_rows(TABLE2)? {
        expected.entry(field(&rec, 0)?).or_default().push(field(&rec, 1)?);
    }
    let mut table = Table::new(&["period", "cycle", "t", "expected", "computed"]);
    let mut bad = 0;
    for (&p, want) in &expected {
        let solved = enumerate_cycles(p)?;
        let mut names: Vec<String> = want.clone();
        for c in &solved {
            let name = c.cycle.to_string();
            if !names.contains(&name) {
                names.push(name);
            }
        }
        for name in names {
            let hit = solved.iter().find(|c| c.cycle.to_string() == name);
            let listed = want.contains(&name);
            bad += usize::from(listed != hit.is_some());
            table.push(vec![
                p.into(),
                name.into(),
                hit.map(|c| c.t0).into(),
                listed.into(),
                hit.is_some().into(),
            ]);
        }
    }
    Ok((table, bad))
}

fn table3() -> Result<(Table, usize), Fail> {
    let mut table = Table::new(&["period", "expected", "computed", "match"]);
    let mut bad = 0;
    for rec in golden_rows(TABLE3)? {
        let p: usize = field(&rec, 0)?;
        let expected: usize = field(&rec, 1)?;
        let computed = enumerate_cycles(p)?.len();
        bad += usize::from(computed != expected);
        table.push(vec![p.into(), expected.into(), computed.into(), (computed == expected).into()]);
    }
    Ok((table, bad))
}

fn fig6() -> Result<(Table, usize), Fail> {
    let golden = golden_rows(FIG6)?;
    let s = staircase(4, QuadParam::new(0.0)?, QuadParam::new(2.0)?, 2000)?;
    let mut table = Table::new(&["t", "increment", "expected_t", "expected_increment", "match"]);
    let mut bad = 0;
    for i in 0..golden.len().max(s.jumps.len()) {
        let want: Option<(f64, i64)> = match golden.get(i) {
            Some(rec) => Some((field(&rec.clone(), 0)?, field(rec, 1)?)),
            None => None,
        };
        let got = s.jumps.get(i).map(|j| (j.t, j.increment()));
        let ok = match (want, got) {
            (Some((wt, wi)), Some((gt, gi))) => (wt - gt).abs() <= JUMP_TOL && wi == gi,
            _ => false,
        };
        bad += usize::from(!ok);
        table.push(vec![
            got.map(|g| g.0).into(),
            got.map(|g| g.1).into(),
            want.map(|w| w.0).into(),
            want.map(|w| w.1).into(),
            ok.into(),
        ]);
    }
    if s.values.last() != Some(&16) {
        bad += 1;
    }
    Ok((table, bad))
}
