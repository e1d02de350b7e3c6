//! Line-oriented portrait text format.
//!
//! ```text
//! # the rabbit
//! degree=2
//! points=inf,0,c1,c2
//! map=inf->inf,0->c1,c1->c2,c2->0
//! ram=inf:2,0:2,c1:1,c2:1
//! branch=inf:(2),0:(1,1),c1:(2),c2:(1,1)
//! ```

use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::portrait::{Condition, Portrait, ValidationReport, Violation, MAX_DEGREE};

/// Outcome of parsing well-formed text: structural problems land in the
/// report, and `portrait` is present whenever the structure is sound.
#[derive(Debug, Clone)]
pub struct Parsed {
    pub report: ValidationReport,
    pub portrait: Option<Portrait>,
}

struct Token<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

fn is_label_char(c: char) -> bool {
    !c.is_whitespace() && !",:=()#<>-".contains(c)
}

fn label<'a>(tok: &Token<'a>) -> Result<&'a str> {
    let t = tok.text.trim();
    if t.is_empty() || !t.chars().all(is_label_char) {
        return Err(parse_err(tok.line, tok.column, format!("bad label '{t}'")));
    }
    Ok(t)
}

/// Splits a value on top-level commas, keeping column offsets. Commas inside
/// parentheses belong to partitions.
fn split_list<'a>(value: &'a str, line: usize, column: usize) -> Vec<Token<'a>> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    let mut col = column;
    let mut start_col = column;
    for (i, c) in value.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(Token {
                    text: &value[start..i],
                    line,
                    column: start_col,
                });
                start = i + 1;
                start_col = col + 1;
            }
            _ => {}
        }
        col += 1;
    }
    out.push(Token {
        text: &value[start..],
        line,
        column: start_col,
    });
    out
}

fn split_pair<'a>(tok: &Token<'a>, sep: &str) -> Result<(Token<'a>, Token<'a>)> {
    let i = tok
        .text
        .find(sep)
        .ok_or_else(|| parse_err(tok.line, tok.column, format!("expected '{sep}'")))?;
    let left = Token {
        text: &tok.text[..i],
        line: tok.line,
        column: tok.column,
    };
    let right = Token {
        text: &tok.text[i + sep.len()..],
        line: tok.line,
        column: tok.column + tok.text[..i + sep.len()].chars().count(),
    };
    Ok((left, right))
}

fn number(tok: &Token<'_>) -> Result<u32> {
    tok.text
        .trim()
        .parse::<u32>()
        .map_err(|_| parse_err(tok.line, tok.column, format!("bad integer '{}'", tok.text.trim())))
}

fn partition(tok: &Token<'_>) -> Result<Partition> {
    let t = tok.text.trim();
    let inner = t
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| parse_err(tok.line, tok.column, "expected '(k1,k2,...)'"))?;
    let parts = split_list(inner, tok.line, tok.column + 1)
        .iter()
        .map(number)
        .collect::<Result<Vec<_>>>()?;
    Partition::new(parts).map_err(|e| parse_err(tok.line, tok.column, e.to_string()))
}

#[derive(Default)]
struct Sections<'a> {
    degree: Option<Token<'a>>,
    points: Option<Vec<Token<'a>>>,
    map: Option<Vec<Token<'a>>>,
    ram: Option<Vec<Token<'a>>>,
    branch: Option<Vec<Token<'a>>>,
}

/// Parses portrait text. Syntax errors fail; structural and combinatorial
/// problems are reported.
pub fn parse_portrait(text: &str) -> Result<Parsed> {
    let mut s = Sections::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| parse_err(line, 1, "expected 'key=value'"))?;
        let column = key.chars().count() + 2;
        let slot_is_set = |set: bool| {
            if set {
                Err(parse_err(line, 1, format!("repeated section '{}'", key.trim())))
            } else {
                Ok(())
            }
        };
        match key.trim() {
            "degree" => {
                slot_is_set(s.degree.is_some())?;
                s.degree = Some(Token {
                    text: value,
                    line,
                    column,
                });
            }
            "points" => {
                slot_is_set(s.points.is_some())?;
                s.points = Some(split_list(value, line, column));
            }
            "map" => {
                slot_is_set(s.map.is_some())?;
                s.map = Some(split_list(value, line, column));
            }
            "ram" => {
                slot_is_set(s.ram.is_some())?;
                s.ram = Some(split_list(value, line, column));
            }
            "branch" => {
                slot_is_set(s.branch.is_some())?;
                s.branch = Some(split_list(value, line, column));
            }
            other => return Err(parse_err(line, 1, format!("unknown section '{other}'"))),
        }
    }

    let mut violations = Vec::new();
    let mut structure = |message: String| {
        violations.push(Violation {
            condition: Condition::Structure,
            message,
        })
    };
    // syntax first, so a malformed entry is a parse error even when a section is missing
    if let Some(d) = &s.degree {
        number(d)?;
    }
    for tok in s.points.iter().flatten() {
        label(tok)?;
    }
    for tok in s.map.iter().flatten() {
        let (a, b) = split_pair(tok, "->")?;
        label(&a)?;
        label(&b)?;
    }
    for tok in s.ram.iter().flatten() {
        let (a, k) = split_pair(tok, ":")?;
        label(&a)?;
        number(&k)?;
    }
    for tok in s.branch.iter().flatten() {
        let (b, lambda) = split_pair(tok, ":")?;
        label(&b)?;
        partition(&lambda)?;
    }
    let (Some(degree), Some(points), Some(map), Some(ram), Some(branch)) =
        (s.degree, s.points, s.map, s.ram, s.branch)
    else {
        structure("sections degree, points, map, ram and branch are all required".into());
        return Ok(Parsed {
            report: ValidationReport::from_violations(violations, false),
            portrait: None,
        });
    };

    let degree = number(&degree)?;
    if degree == 0 || degree > MAX_DEGREE {
        structure(format!("degree {degree} outside 1..={MAX_DEGREE}"));
    }
    let labels = points.iter().map(label).collect::<Result<Vec<_>>>()?;
    for (i, l) in labels.iter().enumerate() {
        if labels[..i].contains(l) {
            structure(format!("duplicate point {l}"));
        }
    }
    let n = labels.len();
    let index = |l: &str| labels.iter().position(|x| *x == l);

    let mut f: Vec<Option<usize>> = vec![None; n];
    for tok in &map {
        let (a, b) = split_pair(tok, "->")?;
        let (a, b) = (label(&a)?, label(&b)?);
        match (index(a), index(b)) {
            (Some(ia), Some(ib)) => {
                if f[ia].replace(ib).is_some() {
                    structure(format!("map given twice for {a}"));
                }
            }
            (None, _) => structure(format!("map source {a} is not a point")),
            (_, None) => structure(format!("map image {b} of {a} is not a point")),
        }
    }
    let mut rm: Vec<Option<u32>> = vec![None; n];
    for tok in &ram {
        let (a, k) = split_pair(tok, ":")?;
        let a = label(&a)?;
        let k = number(&k)?;
        match index(a) {
            Some(ia) => {
                if rm[ia].replace(k).is_some() {
                    structure(format!("ram given twice for {a}"));
                }
            }
            None => structure(format!("ram entry {a} is not a point")),
        }
    }
    let mut br: Vec<Option<Partition>> = vec![None; n];
    for tok in &branch {
        let (b, lambda) = split_pair(tok, ":")?;
        let b = label(&b)?;
        let lambda = partition(&lambda)?;
        match index(b) {
            Some(ib) => {
                if br[ib].replace(lambda).is_some() {
                    structure(format!("branch given twice for {b}"));
                }
            }
            None => structure(format!("branch entry {b} is not a point")),
        }
    }
    for (i, l) in labels.iter().enumerate() {
        if f[i].is_none() {
            structure(format!("no map entry for {l}"));
        }
        if rm[i].is_none() {
            structure(format!("no ram entry for {l}"));
        }
        if br[i].is_none() {
            structure(format!("no branch entry for {l}"));
        }
    }
    if !violations.is_empty() {
        return Ok(Parsed {
            report: ValidationReport::from_violations(violations, false),
            portrait: None,
        });
    }
    let portrait = Portrait::new(
        labels.iter().map(|l| l.to_string()).collect(),
        degree,
        f.into_iter().flatten().collect(),
        rm.into_iter().flatten().collect(),
        br.into_iter().flatten().collect(),
    )?;
    Ok(Parsed {
        report: portrait.validate(),
        portrait: Some(portrait),
    })
}

/// Parses and requires a valid portrait.
pub fn read_portrait(text: &str) -> Result<Portrait> {
    let parsed = parse_portrait(text)?;
    parsed.report.clone().into_result()?;
    Ok(parsed.portrait.expect("valid report implies a portrait"))
}

/// Canonical text: sections in fixed order, entries in point order.
pub fn print_portrait(p: &Portrait) -> String {
    let data = p.data();
    let pts = p.points();
    let join = |items: Vec<String>| items.join(",");
    let mut out = String::new();
    out.push_str(&format!("degree={}\n", p.degree()));
    out.push_str(&format!("points={}\n", pts.join(",")));
    out.push_str(&format!(
        "map={}\n",
        join((0..pts.len()).map(|a| format!("{}->{}", pts[a], pts[data.image(a)])).collect())
    ));
    out.push_str(&format!(
        "ram={}\n",
        join((0..pts.len()).map(|a| format!("{}:{}", pts[a], data.ramification(a))).collect())
    ));
    out.push_str(&format!(
        "branch={}\n",
        join((0..pts.len()).map(|b| format!("{}:{}", pts[b], data.branching(b))).collect())
    ));
    out
}
