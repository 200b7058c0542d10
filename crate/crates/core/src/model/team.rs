use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use super::{ModelError, Variable};

/// A finite set of assignments over a fixed schema.
///
/// Values are opaque strings compared by byte equality. Internally each
/// distinct string is interned to a code, so rows are compact integer
/// vectors; two cells hold equal values iff their codes are equal.
/// Rows are kept sorted and deduplicated.
#[derive(Clone)]
pub struct Team {
    schema: Arc<[Variable]>,
    symbols: Arc<[String]>,
    rows: Vec<Box<[u32]>>,
    duplicates_dropped: usize,
}

/// One row of a team, viewed as a map from variables to values.
#[derive(Clone, Copy)]
pub struct Assignment<'a> {
    team: &'a Team,
    row: &'a [u32],
}

impl<'a> Assignment<'a> {
    pub fn get(&self, var: &Variable) -> Option<&'a str> {
        let col = self.team.column(var)?;
        Some(self.team.symbols[self.row[col] as usize].as_str())
    }

    pub fn values(&self) -> impl Iterator<Item = &'a str> + 'a {
        let team = self.team;
        self.row
            .iter()
            .map(move |&c| team.symbols[c as usize].as_str())
    }

    pub fn codes(&self) -> &'a [u32] {
        self.row
    }
}

impl Team {
    /// Builds a team from string rows. Duplicate rows collapse; the count
    /// of collapsed rows is available from [`Team::duplicates_dropped`].
    pub fn from_rows<R, S>(schema: Vec<Variable>, rows: R) -> Result<Self, ModelError>
    where
        R: IntoIterator,
        R::Item: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        check_schema(&schema)?;
        let mut intern: HashMap<String, u32> = HashMap::new();
        let mut symbols = Vec::new();
        let mut coded = Vec::new();
        for (i, row) in rows.into_iter().enumerate() {
            let mut codes = Vec::with_capacity(schema.len());
            for cell in row {
                let cell = cell.as_ref();
                let code = match intern.get(cell) {
                    Some(&c) => c,
                    None => {
                        let c = symbols.len() as u32;
                        symbols.push(cell.to_string());
                        intern.insert(cell.to_string(), c);
                        c
                    }
                };
                codes.push(code);
            }
            if codes.len() != schema.len() {
                return Err(ModelError::RowWidth {
                    row: i + 1,
                    found: codes.len(),
                    expected: schema.len(),
                });
            }
            coded.push(codes.into_boxed_slice());
        }
        Ok(Team::assemble(schema.into(), symbols.into(), coded))
    }

    /// Builds a team from pre-interned codes. Every code must index `symbols`,
    /// and `symbols` must not contain duplicate strings.
    pub fn from_codes(
        schema: Arc<[Variable]>,
        symbols: Arc<[String]>,
        rows: Vec<Box<[u32]>>,
    ) -> Result<Self, ModelError> {
        check_schema(&schema)?;
        for (i, row) in rows.iter().enumerate() {
            if row.len() != schema.len() {
                return Err(ModelError::RowWidth {
                    row: i + 1,
                    found: row.len(),
                    expected: schema.len(),
                });
            }
            debug_assert!(row.iter().all(|&c| (c as usize) < symbols.len()));
        }
        Ok(Team::assemble(schema, symbols, rows))
    }

    fn assemble(
        schema: Arc<[Variable]>,
        symbols: Arc<[String]>,
        mut rows: Vec<Box<[u32]>>,
    ) -> Self {
        let before = rows.len();
        rows.sort_unstable();
        rows.dedup();
        let duplicates_dropped = before - rows.len();
        Team {
            schema,
            symbols,
            rows,
            duplicates_dropped,
        }
    }

    pub fn empty(schema: Vec<Variable>) -> Result<Self, ModelError> {
        Team::from_rows(schema, Vec::<Vec<String>>::new())
    }

    pub fn schema(&self) -> &[Variable] {
        &self.schema
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn duplicates_dropped(&self) -> usize {
        self.duplicates_dropped
    }

    pub fn column(&self, var: &Variable) -> Option<usize> {
        self.schema.iter().position(|v| v == var)
    }

    pub fn rows(&self) -> impl Iterator<Item = Assignment<'_>> + '_ {
        self.rows
            .iter()
            .map(move |r| Assignment { team: self, row: r })
    }

    pub fn row(&self, index: usize) -> Assignment<'_> {
        Assignment {
            team: self,
            row: &self.rows[index],
        }
    }

    pub(crate) fn coded_rows(&self) -> &[Box<[u32]>] {
        &self.rows
    }

    pub fn symbol(&self, code: u32) -> &str {
        &self.symbols[code as usize]
    }

    /// Number of distinct values occurring in some cell.
    pub fn distinct_values(&self) -> usize {
        let mut seen: Vec<u32> = self.rows.iter().flat_map(|r| r.iter().copied()).collect();
        seen.sort_unstable();
        seen.dedup();
        seen.len()
    }

    /// The subteam of rows whose index satisfies `keep`.
    pub fn subteam(&self, mut keep: impl FnMut(usize) -> bool) -> Team {
        let rows = self
            .rows
            .iter()
            .enumerate()
            .filter(|(i, _)| keep(*i))
            .map(|(_, r)| r.clone())
            .collect();
        Team {
            schema: self.schema.clone(),
            symbols: self.symbols.clone(),
            rows,
            duplicates_dropped: 0,
        }
    }

    /// Restriction of every row to `vars`; rows that become equal collapse.
    pub fn project(&self, vars: &[Variable]) -> Result<Team, ModelError> {
        let cols: Vec<usize> = vars
            .iter()
            .map(|v| {
                self.column(v)
                    .ok_or_else(|| ModelError::BadIdentifier(v.to_string()))
            })
            .collect::<Result<_, _>>()?;
        let rows = self
            .rows
            .iter()
            .map(|r| {
                cols.iter()
                    .map(|&c| r[c])
                    .collect::<Vec<_>>()
                    .into_boxed_slice()
            })
            .collect();
        Team::from_codes(vars.to_vec().into(), self.symbols.clone(), rows)
    }

    /// Rows as strings, in the team's canonical (sorted code) order.
    pub fn string_rows(&self) -> Vec<Vec<String>> {
        self.rows()
            .map(|a| a.values().map(str::to_string).collect())
            .collect()
    }
}

fn check_schema(schema: &[Variable]) -> Result<(), ModelError> {
    let mut seen = std::collections::HashSet::new();
    for v in schema {
        if !seen.insert(v) {
            return Err(ModelError::DuplicateColumn(v.to_string()));
        }
    }
    Ok(())
}

impl PartialEq for Team {
    /// Same schema and the same set of string rows.
    fn eq(&self, other: &Self) -> bool {
        if self.schema != other.schema {
            return false;
        }
        let mut a = self.string_rows();
        let mut b = other.string_rows();
        a.sort();
        b.sort();
        a == b
    }
}

impl Eq for Team {}

impl fmt::Debug for Team {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let header: Vec<&str> = self.schema.iter().map(|v| v.name()).collect();
        writeln!(f, "{}", header.join(","))?;
        for row in self.rows() {
            writeln!(f, "{}", row.values().collect::<Vec<_>>().join(","))?;
        }
        Ok(())
    }
}
