//! Abstract syntax for the three MQL statements.

use crate::error::{MqlError, Result};
use crate::table::Predicate;

#[derive(Debug, Clone, PartialEq)]
pub enum Statement {
    Generate(GenerateClauses),
    Construct(ConstructClauses),
    Inspect(InspectClauses),
}

impl Statement {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Statement::Generate(_) => "GENERATE",
            Statement::Construct(_) => "CONSTRUCT",
            Statement::Inspect(_) => "INSPECT",
        }
    }
}

/// The ML task a GENERATE or CONSTRUCT asks for.
#[derive(Debug, Clone, PartialEq)]
pub enum TaskHead {
    Prediction { target: String },
    Classification { labels: Vec<String> },
    Cluster { k: IntExpr },
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelRef {
    None,
    Stored(String),
    Algorithm(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum FeatureList {
    /// `FEATURES *`
    All,
    Columns(Vec<String>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenerateClauses {
    pub display: bool,
    pub task: TaskHead,
    pub over: Option<String>,
    pub model_ref: ModelRef,
    /// Threshold exactly as written; scaling happens in the analyzer.
    pub accuracy: Option<f64>,
    pub labels: Vec<String>,
    pub features: Option<FeatureList>,
    pub from: Vec<String>,
    pub filter: Option<Predicate>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Supervision {
    Supervised,
    Unsupervised,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstructClauses {
    pub model_name: String,
    pub supervision: Option<Supervision>,
    pub task: TaskHead,
    pub algorithm: Option<String>,
    pub accuracy: Option<f64>,
    pub train_n: IntExpr,
    pub test_m: IntExpr,
    pub features: FeatureList,
    pub from: Vec<String>,
    pub filter: Option<Predicate>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum WrangleAction {
    Categorize(Vec<String>),
    Impute,
    Numerize(Expr),
    Deduplicate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InspectAction {
    pub column: String,
    pub action: WrangleAction,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InspectClauses {
    pub actions: Vec<InspectAction>,
    pub from: Vec<String>,
    pub filter: Option<Predicate>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl IntOp {
    pub fn symbol(self) -> &'static str {
        match self {
            IntOp::Add => "+",
            IntOp::Sub => "-",
            IntOp::Mul => "*",
            IntOp::Div => "/",
        }
    }
}

/// Integer expressions for TRAIN ON, TEST ON and CLUSTER OF.
#[derive(Debug, Clone, PartialEq)]
pub enum IntExpr {
    Literal(i64),
    /// `COUNT(*)` over the FROM table.
    CountAll,
    Binary(Box<IntExpr>, IntOp, Box<IntExpr>),
}

impl IntExpr {
    /// Evaluates with `COUNT(*) = row_count`; division truncates toward zero.
    pub fn eval(&self, row_count: usize) -> Result<i64> {
        Ok(match self {
            IntExpr::Literal(v) => *v,
            IntExpr::CountAll => row_count as i64,
            IntExpr::Binary(l, op, r) => {
                let (l, r) = (l.eval(row_count)?, r.eval(row_count)?);
                let v = match op {
                    IntOp::Add => l.checked_add(r),
                    IntOp::Sub => l.checked_sub(r),
                    IntOp::Mul => l.checked_mul(r),
                    IntOp::Div if r == 0 => {
                        return Err(MqlError::Expression("integer division by zero".into()))
                    }
                    IntOp::Div => l.checked_div(r),
                };
                v.ok_or_else(|| MqlError::Expression("integer overflow".into()))?
            }
        })
    }

    /// Evaluates and requires a non-negative result.
    pub fn eval_count(&self, row_count: usize) -> Result<usize> {
        let v = self.eval(row_count)?;
        usize::try_from(v)
            .map_err(|_| MqlError::Expression(format!("expression evaluates to {v}, expected >= 0")))
    }

    pub fn uses_count(&self) -> bool {
        match self {
            IntExpr::Literal(_) => false,
            IntExpr::CountAll => true,
            IntExpr::Binary(l, _, r) => l.uses_count() || r.uses_count(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl ArithOp {
    pub fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
            ArithOp::Div => "/",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Log,
    Log10,
    Exp,
    Abs,
    Sqrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Log => "log",
            Func::Log10 => "log10",
            Func::Exp => "exp",
            Func::Abs => "abs",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn lookup(name: &str) -> Option<Func> {
        [Func::Log, Func::Log10, Func::Exp, Func::Abs, Func::Sqrt]
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(name))
    }

    /// Applies the function; `Err` carries a domain message.
    pub fn apply(self, x: f64) -> std::result::Result<f64, String> {
        match self {
            Func::Log | Func::Log10 if x <= 0.0 => {
                Err(format!("{}({x}) is undefined", self.name()))
            }
            Func::Sqrt if x < 0.0 => Err(format!("sqrt({x}) is undefined")),
            Func::Log => Ok(x.ln()),
            Func::Log10 => Ok(x.log10()),
            Func::Exp => Ok(x.exp()),
            Func::Abs => Ok(x.abs()),
            Func::Sqrt => Ok(x.sqrt()),
        }
    }
}

/// Real-valued expressions for NUMERIZE AS.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Number(f64),
    Column(String),
    Neg(Box<Expr>),
    Binary(Box<Expr>, ArithOp, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn columns(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_columns(&mut out);
        out
    }

    fn collect_columns<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Expr::Number(_) => {}
            Expr::Column(c) => out.push(c),
            Expr::Neg(e) | Expr::Call(_, e) => e.collect_columns(out),
            Expr::Binary(l, _, r) => {
                l.collect_columns(out);
                r.collect_columns(out);
            }
        }
    }

    /// Evaluates with every column reference bound to `value`.
    pub fn eval(&self, value: f64) -> std::result::Result<f64, String> {
        let v = match self {
            Expr::Number(n) => *n,
            Expr::Column(_) => value,
            Expr::Neg(e) => -e.eval(value)?,
            Expr::Binary(l, op, r) => {
                let (l, r) = (l.eval(value)?, r.eval(value)?);
                match op {
                    ArithOp::Add => l + r,
                    ArithOp::Sub => l - r,
                    ArithOp::Mul => l * r,
                    ArithOp::Div if r == 0.0 => return Err("division by zero".into()),
                    ArithOp::Div => l / r,
                }
            }
            Expr::Call(f, e) => f.apply(e.eval(value)?)?,
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err("result is not finite".into())
        }
    }
}
