use std::fmt;

use super::{Cell, DType, Table};
use crate::error::{MqlError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "<>",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }

    fn is_ordering(self) -> bool {
        !matches!(self, CmpOp::Eq | CmpOp::Ne)
    }

    fn holds(self, ord: std::cmp::Ordering) -> bool {
        use std::cmp::Ordering::*;
        match self {
            CmpOp::Eq => ord == Equal,
            CmpOp::Ne => ord != Equal,
            CmpOp::Lt => ord == Less,
            CmpOp::Le => ord != Greater,
            CmpOp::Gt => ord == Greater,
            CmpOp::Ge => ord != Less,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Literal {
    Number(f64),
    Text(String),
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Number(v) => write!(f, "{v}"),
            Literal::Text(s) => write!(f, "'{}'", s.replace('\'', "''")),
        }
    }
}

/// `column op literal`.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub column: String,
    pub op: CmpOp,
    pub value: Literal,
}

/// A conjunction of comparisons. The empty conjunction is true.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Predicate {
    pub terms: Vec<Comparison>,
}

impl Predicate {
    pub fn new(terms: Vec<Comparison>) -> Self {
        Predicate { terms }
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn columns(&self) -> impl Iterator<Item = &str> {
        self.terms.iter().map(|t| t.column.as_str())
    }

    /// Checks columns and operand types against `table` without evaluating.
    pub fn check(&self, table: &Table) -> Result<()> {
        for term in &self.terms {
            let col = table.column(&term.column)?;
            match (col.dtype(), &term.value) {
                (DType::Numeric, Literal::Text(s)) => {
                    return Err(MqlError::TypeMismatch(format!(
                        "numeric column `{}` compared with text '{s}'",
                        term.column
                    )))
                }
                (DType::Categorical, _) if term.op.is_ordering() => {
                    return Err(MqlError::TypeMismatch(format!(
                        "ordering comparison `{}` on categorical column `{}`",
                        term.op.symbol(),
                        term.column
                    )))
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// Indices of rows that satisfy every term. A missing cell in any compared
    /// column excludes the row.
    pub fn matching_rows(&self, table: &Table) -> Result<Vec<usize>> {
        self.check(table)?;
        let cols = self
            .terms
            .iter()
            .map(|t| table.column(&t.column))
            .collect::<Result<Vec<_>>>()?;
        Ok((0..table.row_count())
            .filter(|&row| {
                self.terms
                    .iter()
                    .zip(&cols)
                    .all(|(term, col)| term_holds(term, col.cell(row)))
            })
            .collect())
    }
}

fn term_holds(term: &Comparison, cell: Cell<'_>) -> bool {
    match (cell, &term.value) {
        (Cell::Missing, _) => false,
        (Cell::Number(v), Literal::Number(lit)) => term.op.holds(v.total_cmp(lit)),
        (Cell::Text(s), Literal::Text(lit)) => term.op.holds(s.cmp(lit.as_str())),
        // Categorical against a number: equality on the parsed token.
        (Cell::Text(s), Literal::Number(lit)) => {
            let equal = s.trim().parse::<f64>().is_ok_and(|v| v == *lit);
            match term.op {
                CmpOp::Eq => equal,
                CmpOp::Ne => !equal,
                _ => false,
            }
        }
        (Cell::Number(_), Literal::Text(_)) => false,
    }
}
