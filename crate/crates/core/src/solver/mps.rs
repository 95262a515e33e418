//! MPS export and import.
//!
//! Files are written in the whitespace-separated ("free") MPS dialect:
//! NAME, optional OBJSENSE, ROWS, COLUMNS with INTORG/INTEND markers, RHS,
//! BOUNDS, ENDATA. Every column gets an explicit objective entry even when
//! the coefficient is zero, so empty columns survive a round trip, and
//! integer columns always get explicit bound lines to sidestep the
//! conflicting integer-bound defaults of other readers. Values are printed
//! with the shortest decimal form that parses back to the same f64, making
//! write/parse an exact round trip.
//!
//! The importer additionally understands RANGES (materialized as extra
//! rows), the LI/UI/BV bound types, and the classic quirk that a negative
//! UP bound without a prior LO drops the lower bound to minus infinity.
//! Imported models have an empty variable index: entity lookups only work
//! on models produced by the formulation builders.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write as _;

use alloc::collections::BTreeMap;

use crate::formulation::{Column, MilpModel, ObjSense, RowSense};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MpsError {
    /// 1-based line number the error was detected on.
    pub line: usize,
    pub message: String,
}

impl core::fmt::Display for MpsError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "mps line {}: {}", self.line, self.message)
    }
}

pub fn write_mps(model: &MilpModel) -> String {
    let obj_name = objective_row_name(model);
    let mut out = String::new();
    writeln!(out, "NAME          {}", model.name).unwrap();
    if model.sense == ObjSense::Maximize {
        writeln!(out, "OBJSENSE").unwrap();
        writeln!(out, "    MAX").unwrap();
    }
    writeln!(out, "ROWS").unwrap();
    writeln!(out, " N  {obj_name}").unwrap();
    for row in &model.rows {
        let tag = match row.sense {
            RowSense::Le => 'L',
            RowSense::Ge => 'G',
            RowSense::Eq => 'E',
        };
        writeln!(out, " {tag}  {}", row.name).unwrap();
    }

    // Row-major coefficients regrouped by column, duplicates summed.
    let mut by_col: Vec<Vec<(usize, f64)>> = alloc::vec![Vec::new(); model.columns.len()];
    for (i, row) in model.rows.iter().enumerate() {
        for &(j, a) in &row.coeffs {
            match by_col[j].iter_mut().find(|(r, _)| *r == i) {
                Some(entry) => entry.1 += a,
                None => by_col[j].push((i, a)),
            }
        }
    }

    writeln!(out, "COLUMNS").unwrap();
    let mut in_integer = false;
    for (j, col) in model.columns.iter().enumerate() {
        if col.integral != in_integer {
            let marker = if col.integral { "'INTORG'" } else { "'INTEND'" };
            writeln!(out, "    MARKER                 'MARKER'                 {marker}").unwrap();
            in_integer = col.integral;
        }
        writeln!(out, "    {:<12}  {:<12}  {}", col.name, obj_name, col.objective).unwrap();
        for &(i, a) in &by_col[j] {
            writeln!(out, "    {:<12}  {:<12}  {}", col.name, model.rows[i].name, a).unwrap();
        }
    }
    if in_integer {
        writeln!(out, "    MARKER                 'MARKER'                 'INTEND'").unwrap();
    }

    writeln!(out, "RHS").unwrap();
    if model.objective_offset != 0.0 {
        writeln!(out, "    RHS           {:<12}  {}", obj_name, -model.objective_offset).unwrap();
    }
    for row in &model.rows {
        if row.rhs != 0.0 {
            writeln!(out, "    RHS           {:<12}  {}", row.name, row.rhs).unwrap();
        }
    }

    writeln!(out, "BOUNDS").unwrap();
    for col in &model.columns {
        bound_lines(col, &mut out);
    }
    writeln!(out, "ENDATA").unwrap();
    out
}

/// "OBJ" unless a constraint row already uses that name.
fn objective_row_name(model: &MilpModel) -> String {
    let mut name = String::from("OBJ");
    while model.rows.iter().any(|r| r.name == name) {
        name.push('_');
    }
    name
}

fn bound_lines(col: &Column, out: &mut String) {
    let (lo, up) = (col.lower, col.upper);
    if col.integral && lo == 0.0 && up == 1.0 {
        writeln!(out, " BV BND           {}", col.name).unwrap();
        return;
    }
    if lo == up {
        writeln!(out, " FX BND           {:<12}  {lo}", col.name).unwrap();
        return;
    }
    if lo == f64::NEG_INFINITY && up == f64::INFINITY {
        writeln!(out, " FR BND           {}", col.name).unwrap();
        return;
    }
    if lo == f64::NEG_INFINITY {
        writeln!(out, " MI BND           {}", col.name).unwrap();
    } else if lo != 0.0 || col.integral || (up.is_finite() && up < 0.0) {
        writeln!(out, " LO BND           {:<12}  {lo}", col.name).unwrap();
    }
    if up.is_finite() {
        writeln!(out, " UP BND           {:<12}  {up}", col.name).unwrap();
    } else if col.integral {
        writeln!(out, " PL BND           {}", col.name).unwrap();
    }
}

#[derive(Clone, Copy, PartialEq, PartialOrd)]
enum Section {
    Start,
    Name,
    ObjSense,
    Rows,
    Columns,
    Rhs,
    Ranges,
    Bounds,
    End,
}

struct Parser {
    name: String,
    sense: ObjSense,
    objective_offset: f64,
    obj_row: Option<String>,
    row_names: Vec<String>,
    row_senses: Vec<RowSense>,
    row_rhs: Vec<f64>,
    row_coeffs: Vec<Vec<(usize, f64)>>,
    row_map: BTreeMap<String, usize>,
    columns: Vec<Column>,
    col_map: BTreeMap<String, usize>,
    /// Columns that have seen an explicit lower bound; guards the negative
    /// UP quirk.
    explicit_lower: Vec<bool>,
    in_integer: bool,
}

pub fn parse_mps(text: &str) -> Result<MilpModel, MpsError> {
    let mut section = Section::Start;
    let mut p = Parser {
        name: String::new(),
        sense: ObjSense::Minimize,
        objective_offset: 0.0,
        obj_row: None,
        row_names: Vec::new(),
        row_senses: Vec::new(),
        row_rhs: Vec::new(),
        row_coeffs: Vec::new(),
        row_map: BTreeMap::new(),
        columns: Vec::new(),
        col_map: BTreeMap::new(),
        explicit_lower: Vec::new(),
        in_integer: false,
    };
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        if raw.trim().is_empty() || raw.starts_with('*') {
            continue;
        }
        let header = !raw.starts_with(' ') && !raw.starts_with('\t');
        let tokens: Vec<&str> = raw.split_whitespace().collect();
        if header {
            section = enter_section(section, &tokens, line_no)?;
            if section == Section::Name && tokens.len() > 1 {
                p.name = tokens[1].to_string();
            }
            if section == Section::ObjSense && tokens.len() > 1 {
                p.sense = parse_sense(tokens[1], line_no)?;
            }
            if section == Section::End {
                return p.finish();
            }
            continue;
        }
        match section {
            Section::ObjSense => p.sense = parse_sense(tokens[0], line_no)?,
            Section::Rows => p.row_line(&tokens, line_no)?,
            Section::Columns => p.column_line(&tokens, line_no)?,
            Section::Rhs => p.rhs_line(&tokens, line_no)?,
            Section::Ranges => p.range_line(&tokens, line_no)?,
            Section::Bounds => p.bound_line(&tokens, line_no)?,
            Section::Start | Section::Name => {
                return Err(err(line_no, "data before any section header"));
            }
            Section::End => unreachable!(),
        }
    }
    Err(err(last_line, "missing ENDATA"))
}

fn err(line: usize, message: impl core::fmt::Display) -> MpsError {
    MpsError {
        line,
        message: message.to_string(),
    }
}

fn enter_section(current: Section, tokens: &[&str], line: usize) -> Result<Section, MpsError> {
    let next = match tokens[0] {
        "NAME" => Section::Name,
        "OBJSENSE" => Section::ObjSense,
        "ROWS" => Section::Rows,
        "COLUMNS" => Section::Columns,
        "RHS" => Section::Rhs,
        "RANGES" => Section::Ranges,
        "BOUNDS" => Section::Bounds,
        "ENDATA" => Section::End,
        other => return Err(err(line, format!("unknown section '{other}'"))),
    };
    if next <= current {
        return Err(err(
            line,
            format!("section {} out of order", tokens[0]),
        ));
    }
    if next == Section::Columns && current < Section::Rows {
        return Err(err(line, "COLUMNS before ROWS"));
    }
    if matches!(next, Section::Rhs | Section::Ranges | Section::Bounds)
        && current < Section::Columns
    {
        return Err(err(line, format!("section {} before COLUMNS", tokens[0])));
    }
    Ok(next)
}

fn parse_sense(token: &str, line: usize) -> Result<ObjSense, MpsError> {
    match token {
        "MAX" | "MAXIMIZE" => Ok(ObjSense::Maximize),
        "MIN" | "MINIMIZE" => Ok(ObjSense::Minimize),
        other => Err(err(line, format!("unknown objective sense '{other}'"))),
    }
}

fn parse_value(token: &str, line: usize) -> Result<f64, MpsError> {
    token
        .parse::<f64>()
        .map_err(|_| err(line, format!("bad numeric value '{token}'")))
}

impl Parser {
    fn row_line(&mut self, tokens: &[&str], line: usize) -> Result<(), MpsError> {
        if tokens.len() != 2 {
            return Err(err(line, "expected 'TYPE name' in ROWS"));
        }
        let name = tokens[1];
        match tokens[0] {
            "N" | "n" => {
                if self.obj_row.is_some() {
                    return Err(err(line, "only one objective (N) row is supported"));
                }
                self.obj_row = Some(name.to_string());
            }
            sense_tok => {
                let sense = match sense_tok {
                    "L" | "l" => RowSense::Le,
                    "G" | "g" => RowSense::Ge,
                    "E" | "e" => RowSense::Eq,
                    other => return Err(err(line, format!("unknown row type '{other}'"))),
                };
                if self.row_map.contains_key(name) || self.obj_row.as_deref() == Some(name) {
                    return Err(err(line, format!("duplicate row name '{name}'")));
                }
                self.row_map.insert(name.to_string(), self.row_names.len());
                self.row_names.push(name.to_string());
                self.row_senses.push(sense);
                self.row_rhs.push(0.0);
                self.row_coeffs.push(Vec::new());
            }
        }
        Ok(())
    }

    fn column_line(&mut self, tokens: &[&str], line: usize) -> Result<(), MpsError> {
        if tokens.len() >= 3 && tokens[1] == "'MARKER'" {
            match *tokens.last().unwrap() {
                "'INTORG'" => self.in_integer = true,
                "'INTEND'" => self.in_integer = false,
                other => return Err(err(line, format!("unknown marker '{other}'"))),
            }
            return Ok(());
        }
        if tokens.len() != 3 && tokens.len() != 5 {
            return Err(err(line, "expected 'col row value [row value]' in COLUMNS"));
        }
        let j = self.column_index(tokens[0]);
        for pair in tokens[1..].chunks(2) {
            let value = parse_value(pair[1], line)?;
            if self.obj_row.as_deref() == Some(pair[0]) {
                self.columns[j].objective += value;
                continue;
            }
            let Some(&i) = self.row_map.get(pair[0]) else {
                return Err(err(line, format!("unknown row '{}'", pair[0])));
            };
            match self.row_coeffs[i].iter_mut().find(|(c, _)| *c == j) {
                Some(entry) => entry.1 += value,
                None => self.row_coeffs[i].push((j, value)),
            }
        }
        Ok(())
    }

    fn column_index(&mut self, name: &str) -> usize {
        if let Some(&j) = self.col_map.get(name) {
            return j;
        }
        let j = self.columns.len();
        self.col_map.insert(name.to_string(), j);
        self.columns.push(Column {
            name: name.to_string(),
            lower: 0.0,
            upper: f64::INFINITY,
            objective: 0.0,
            integral: self.in_integer,
        });
        self.explicit_lower.push(false);
        j
    }

    fn rhs_line(&mut self, tokens: &[&str], line: usize) -> Result<(), MpsError> {
        if tokens.len() != 3 && tokens.len() != 5 {
            return Err(err(line, "expected 'set row value [row value]' in RHS"));
        }
        for pair in tokens[1..].chunks(2) {
            let value = parse_value(pair[1], line)?;
            if self.obj_row.as_deref() == Some(pair[0]) {
                self.objective_offset = -value;
                continue;
            }
            let Some(&i) = self.row_map.get(pair[0]) else {
                return Err(err(line, format!("unknown row '{}'", pair[0])));
            };
            self.row_rhs[i] = value;
        }
        Ok(())
    }

    /// A range tightens a row into an interval; keep the parsed row and add
    /// a companion row carrying the opposite inequality.
    fn range_line(&mut self, tokens: &[&str], line: usize) -> Result<(), MpsError> {
        if tokens.len() != 3 && tokens.len() != 5 {
            return Err(err(line, "expected 'set row value [row value]' in RANGES"));
        }
        for pair in tokens[1..].chunks(2) {
            let value = parse_value(pair[1], line)?;
            let Some(&i) = self.row_map.get(pair[0]) else {
                return Err(err(line, format!("unknown row '{}'", pair[0])));
            };
            let rhs = self.row_rhs[i];
            let coeffs = self.row_coeffs[i].clone();
            let companion = format!("{}_rng", self.row_names[i]);
            let (own_sense, own_rhs, extra_sense, extra_rhs) = match self.row_senses[i] {
                RowSense::Le => (RowSense::Le, rhs, RowSense::Ge, rhs - value.abs()),
                RowSense::Ge => (RowSense::Ge, rhs, RowSense::Le, rhs + value.abs()),
                RowSense::Eq => (
                    RowSense::Ge,
                    rhs.min(rhs + value),
                    RowSense::Le,
                    rhs.max(rhs + value),
                ),
            };
            self.row_senses[i] = own_sense;
            self.row_rhs[i] = own_rhs;
            self.row_map.insert(companion.clone(), self.row_names.len());
            self.row_names.push(companion);
            self.row_senses.push(extra_sense);
            self.row_rhs.push(extra_rhs);
            self.row_coeffs.push(coeffs);
        }
        Ok(())
    }

    fn bound_line(&mut self, tokens: &[&str], line: usize) -> Result<(), MpsError> {
        let (kind, needs_value) = match tokens[0] {
            "UP" | "LO" | "FX" | "LI" | "UI" => (tokens[0], true),
            "FR" | "MI" | "PL" | "BV" => (tokens[0], false),
            other => return Err(err(line, format!("unknown bound type '{other}'"))),
        };
        let expected = if needs_value { 4 } else { 3 };
        if tokens.len() != expected {
            return Err(err(line, format!("bound {kind} expects {expected} fields")));
        }
        let Some(&j) = self.col_map.get(tokens[2]) else {
            return Err(err(line, format!("unknown column '{}'", tokens[2])));
        };
        let col = &mut self.columns[j];
        match kind {
            "UP" => {
                let v = parse_value(tokens[3], line)?;
                col.upper = v;
                if v < 0.0 && !self.explicit_lower[j] {
                    col.lower = f64::NEG_INFINITY;
                }
            }
            "LO" => {
                col.lower = parse_value(tokens[3], line)?;
                self.explicit_lower[j] = true;
            }
            "FX" => {
                let v = parse_value(tokens[3], line)?;
                col.lower = v;
                col.upper = v;
                self.explicit_lower[j] = true;
            }
            "FR" => {
                col.lower = f64::NEG_INFINITY;
                col.upper = f64::INFINITY;
                self.explicit_lower[j] = true;
            }
            "MI" => {
                col.lower = f64::NEG_INFINITY;
                self.explicit_lower[j] = true;
            }
            "PL" => col.upper = f64::INFINITY,
            "BV" => {
                col.integral = true;
                col.lower = 0.0;
                col.upper = 1.0;
                self.explicit_lower[j] = true;
            }
            "LI" => {
                col.integral = true;
                col.lower = parse_value(tokens[3], line)?;
                self.explicit_lower[j] = true;
            }
            "UI" => {
                col.integral = true;
                col.upper = parse_value(tokens[3], line)?;
            }
            _ => unreachable!(),
        }
        Ok(())
    }

    fn finish(self) -> Result<MilpModel, MpsError> {
        let mut model = MilpModel::new(&self.name, self.sense);
        model.objective_offset = self.objective_offset;
        for col in self.columns {
            model.add_column(col.name, col.lower, col.upper, col.objective, col.integral);
        }
        for (i, name) in self.row_names.into_iter().enumerate() {
            model.add_row(
                name,
                self.row_coeffs[i].clone(),
                self.row_senses[i],
                self.row_rhs[i],
            );
        }
        Ok(model)
    }
}
