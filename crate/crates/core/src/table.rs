//! Columnar text tables: a header row, then one comma-separated row per
//! node. The `side` column is `L`/`R` on the two rows of a jump and empty
//! otherwise. Floats use the shortest representation that round-trips.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::phase_space::{Beyond, History, RecentSegment, Samples, TailRepresentation};
use crate::solver::{Side, Trajectory};
use crate::space::StateSpace;

fn header(first: &str, dim: usize) -> String {
    let mut h = format!("{first},side");
    for i in 0..dim {
        write!(h, ",v_{i}").unwrap();
    }
    h.push('\n');
    h
}

fn push_row(out: &mut String, x: f64, side: Side, v: &[f64]) {
    write!(out, "{x},{}", side.tag()).unwrap();
    for c in v {
        write!(out, ",{c}").unwrap();
    }
    out.push('\n');
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub x: f64,
    pub side: Side,
    pub values: Vec<f64>,
}

/// Parses a table written by this module. Returns the first header name and
/// the rows.
pub fn parse_table(text: &str) -> Result<(String, Vec<Row>)> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, head) = lines.next().ok_or(Error::Parse {
        line: 1,
        detail: "empty table".into(),
    })?;
    let cols: Vec<&str> = head.split(',').map(str::trim).collect();
    if cols.len() < 3 || cols[1] != "side" {
        return Err(Error::Parse {
            line: 1,
            detail: format!("expected `<x>,side,v_0,...`, got `{head}`"),
        });
    }
    let dim = cols.len() - 2;
    let mut rows = Vec::new();
    for (n, line) in lines {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let bad = |detail: String| Error::Parse { line: n + 1, detail };
        if fields.len() != dim + 2 {
            return Err(bad(format!("expected {} fields, got {}", dim + 2, fields.len())));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|e| bad(format!("`{s}`: {e}")));
        let side = match fields[1] {
            "" => Side::Continuous,
            "L" => Side::Left,
            "R" => Side::Right,
            other => return Err(bad(format!("side must be L, R or empty, got `{other}`"))),
        };
        rows.push(Row {
            x: num(fields[0])?,
            side,
            values: fields[2..].iter().map(|s| num(s)).collect::<Result<_>>()?,
        });
    }
    Ok((cols[0].to_string(), rows))
}

fn push_samples(out: &mut String, s: &Samples, skip_last: bool) {
    let n = s.len();
    for (i, (g, v)) in s.grid().iter().zip(s.values()).enumerate() {
        if skip_last && i + 1 == n {
            break;
        }
        let right = s.panel_start(i);
        if right != v.as_slice() {
            push_row(out, *g, Side::Left, v);
            push_row(out, *g, Side::Right, right);
        } else {
            push_row(out, *g, Side::Continuous, v);
        }
    }
}

/// Every sampled node of a history, tail first. The far tail descriptor
/// is not part of the table.
pub fn write_history(history: &History) -> String {
    let mut out = header("theta", history.dim());
    if let Some(s) = history.tail().samples() {
        // -tau is written once, from the recent window
        push_samples(&mut out, s, true);
    }
    push_samples(&mut out, history.recent(), false);
    out
}

/// Rebuilds a history from its table, splitting at `-tau`; `beyond`
/// describes everything below the first row.
pub fn read_history(text: &str, space: StateSpace, tau: f64, beyond: Beyond) -> Result<History> {
    let (first, rows) = parse_table(text)?;
    if first != "theta" {
        return Err(Error::Parse {
            line: 1,
            detail: format!("history table must start with `theta`, got `{first}`"),
        });
    }
    let dim = space.dim();
    if rows.iter().any(|r| r.values.len() != dim) {
        return Err(Error::Parse {
            line: 1,
            detail: format!("history table needs {dim} value columns"),
        });
    }
    let eps = 1e-12 * (1.0 + tau);
    let mut recent = Samples::builder(dim);
    let mut tail = Samples::builder(dim);
    let mut tail_len = 0usize;
    let mut i = 0;
    while i < rows.len() {
        let r = &rows[i];
        let (left, right) = match r.side {
            Side::Left => {
                let next = rows.get(i + 1).filter(|n| n.side == Side::Right && n.x == r.x).ok_or(
                    Error::Parse {
                        line: i + 2,
                        detail: "L row without matching R row".into(),
                    },
                )?;
                i += 1;
                (r.values.clone(), Some(next.values.clone()))
            }
            Side::Right => {
                return Err(Error::Parse {
                    line: i + 2,
                    detail: "R row without preceding L row".into(),
                })
            }
            Side::Continuous => (r.values.clone(), None),
        };
        if r.x <= -tau + eps {
            if r.x < -tau - eps {
                match &right {
                    Some(rv) => tail.push_jump(r.x, left.clone(), rv.clone()),
                    None => tail.push(r.x, left.clone()),
                };
            } else {
                tail.push(-tau, left.clone());
            }
            tail_len += 1;
        }
        if r.x >= -tau - eps {
            let x = if (r.x + tau).abs() <= eps { -tau } else { r.x };
            match right {
                Some(rv) => recent.push_jump(x, left, rv),
                None => recent.push(x, left),
            };
        }
        i += 1;
    }
    let recent: RecentSegment = recent.build()?;
    let samples = if tail_len >= 2 { Some(tail.build()?) } else { None };
    History::new(space, recent, TailRepresentation::new(tau, samples, beyond)?)
}

/// Columns `t, side, v_0 .. v_{n-1}`; impulse times give an `L` and an `R`
/// row.
pub fn write_trajectory(traj: &Trajectory) -> String {
    let mut out = header("t", traj.space().dim());
    for (t, side, v) in traj.rows() {
        push_row(&mut out, t, side, v);
    }
    out
}
