use std::collections::HashSet;

use super::ast::*;
use super::lexer::tokenize;
use super::token::{Keyword, Token, TokenKind};
use crate::error::{MqlError, Result};
use crate::table::{CmpOp, Comparison, Literal, Predicate};

const UNSUPPORTED_AGGREGATES: &[&str] = &["SUM", "AVG", "MIN", "MAX", "MEDIAN", "STDDEV"];

/// Parses a `;`-separated program. The final `;` is optional.
pub fn parse_program(text: &str) -> Result<Vec<Statement>> {
    let mut p = Parser::new(tokenize(text)?);
    let mut out = Vec::new();
    loop {
        while p.eat(&TokenKind::Semicolon) {}
        if p.at_end() {
            break;
        }
        out.push(p.statement()?);
        if !p.at_end() && !p.eat(&TokenKind::Semicolon) {
            if p.peek_keyword(Keyword::USING) || p.peek_keyword(Keyword::ALGORITHM) {
                return Err(MqlError::Exclusivity);
            }
            return Err(p.expected("`;` or end of input"));
        }
    }
    Ok(out)
}

/// Parses exactly one statement (a trailing `;` is allowed).
pub fn parse_statement(text: &str) -> Result<Statement> {
    let mut stmts = parse_program(text)?;
    match stmts.len() {
        1 => Ok(stmts.remove(0)),
        n => Err(MqlError::Parse {
            line: 1,
            column: 1,
            found: format!("{n} statements"),
            expected: "exactly one statement".into(),
        }),
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn new(tokens: Vec<Token>) -> Self {
        Parser { tokens, pos: 0 }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    fn peek(&self) -> Option<&TokenKind> {
        self.tokens.get(self.pos).map(|t| &t.kind)
    }

    fn peek_at(&self, offset: usize) -> Option<&TokenKind> {
        self.tokens.get(self.pos + offset).map(|t| &t.kind)
    }

    fn peek_keyword(&self, kw: Keyword) -> bool {
        self.peek() == Some(&TokenKind::Keyword(kw))
    }

    fn bump(&mut self) -> Option<TokenKind> {
        let t = self.tokens.get(self.pos).map(|t| t.kind.clone());
        self.pos += 1;
        t
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.peek() == Some(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_keyword(&mut self, kw: Keyword) -> bool {
        self.eat(&TokenKind::Keyword(kw))
    }

    fn expected(&self, what: &str) -> MqlError {
        let (line, column, found) = match self.tokens.get(self.pos) {
            Some(t) => (t.line, t.column, t.kind.to_string()),
            None => {
                let (line, column) = self.tokens.last().map_or((1, 1), |t| (t.line, t.column));
                (line, column, "end of input".to_string())
            }
        };
        MqlError::Parse {
            line,
            column,
            found,
            expected: what.to_string(),
        }
    }

    fn expect(&mut self, kind: TokenKind) -> Result<()> {
        if self.eat(&kind) {
            Ok(())
        } else {
            Err(self.expected(&kind.to_string()))
        }
    }

    fn expect_keyword(&mut self, kw: Keyword) -> Result<()> {
        if self.eat_keyword(kw) {
            Ok(())
        } else {
            Err(self.expected(kw.as_str()))
        }
    }

    fn name(&mut self, what: &str) -> Result<String> {
        match self.peek() {
            Some(TokenKind::Ident(s) | TokenKind::QuotedIdent(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.expected(what)),
        }
    }

    fn name_list(&mut self, what: &str) -> Result<Vec<String>> {
        let mut names = vec![self.name(what)?];
        while self.eat(&TokenKind::Comma) {
            names.push(self.name(what)?);
        }
        Ok(names)
    }

    /// `name(.name)*`, a quoted identifier, or a string literal.
    fn table_name(&mut self) -> Result<String> {
        if let Some(TokenKind::Str(s)) = self.peek() {
            let s = s.clone();
            self.pos += 1;
            return Ok(s);
        }
        let mut name = self.name("table name")?;
        while self.peek() == Some(&TokenKind::Dot) {
            self.pos += 1;
            name.push('.');
            name.push_str(&self.name("table name after `.`")?);
        }
        Ok(name)
    }

    fn table_list(&mut self) -> Result<Vec<String>> {
        let mut names = vec![self.table_name()?];
        while self.eat(&TokenKind::Comma) {
            names.push(self.table_name()?);
        }
        Ok(names)
    }

    fn class_label(&mut self) -> Result<String> {
        match self.peek() {
            Some(
                TokenKind::Ident(s)
                | TokenKind::QuotedIdent(s)
                | TokenKind::Str(s)
                | TokenKind::Number(s),
            ) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.expected("class label")),
        }
    }

    fn number(&mut self, what: &str) -> Result<f64> {
        match self.peek() {
            Some(TokenKind::Number(s)) => {
                let v = s.parse::<f64>().map_err(|_| self.expected(what))?;
                self.pos += 1;
                Ok(v)
            }
            _ => Err(self.expected(what)),
        }
    }

    fn statement(&mut self) -> Result<Statement> {
        match self.peek() {
            Some(TokenKind::Keyword(Keyword::GENERATE)) => self.generate().map(Statement::Generate),
            Some(TokenKind::Keyword(Keyword::CONSTRUCT)) => {
                self.construct().map(Statement::Construct)
            }
            Some(TokenKind::Keyword(Keyword::INSPECT)) => self.inspect().map(Statement::Inspect),
            _ => Err(self.expected("GENERATE, CONSTRUCT or INSPECT")),
        }
    }

    fn task_head(&mut self) -> Result<TaskHead> {
        if self.eat_keyword(Keyword::PREDICTION) {
            Ok(TaskHead::Prediction {
                target: self.name("target column")?,
            })
        } else if self.eat_keyword(Keyword::CLASSIFICATION) {
            self.expect_keyword(Keyword::INTO)?;
            let mut labels = vec![self.class_label()?];
            while self.eat(&TokenKind::Comma) {
                labels.push(self.class_label()?);
            }
            if labels.len() < 2 {
                return Err(self.expected("`,` (CLASSIFICATION needs at least two labels)"));
            }
            Ok(TaskHead::Classification { labels })
        } else if self.eat_keyword(Keyword::CLUSTER) {
            self.expect_keyword(Keyword::OF)?;
            Ok(TaskHead::Cluster { k: self.int_expr()? })
        } else {
            Err(self.expected("PREDICTION, CLASSIFICATION or CLUSTER"))
        }
    }

    fn accuracy(&mut self) -> Result<Option<f64>> {
        if !self.eat_keyword(Keyword::WITH) {
            return Ok(None);
        }
        self.expect_keyword(Keyword::MODEL)?;
        self.expect_keyword(Keyword::ACCURACY)?;
        self.number("accuracy threshold").map(Some)
    }

    fn where_clause(&mut self) -> Result<Option<Predicate>> {
        if !self.eat_keyword(Keyword::WHERE) {
            return Ok(None);
        }
        let mut terms = vec![self.comparison()?];
        while self.eat_keyword(Keyword::AND) {
            terms.push(self.comparison()?);
        }
        Ok(Some(Predicate::new(terms)))
    }

    fn comparison(&mut self) -> Result<Comparison> {
        let column = self.name("column in WHERE")?;
        let op = match self.bump() {
            Some(TokenKind::Eq) => CmpOp::Eq,
            Some(TokenKind::Ne) => CmpOp::Ne,
            Some(TokenKind::Lt) => CmpOp::Lt,
            Some(TokenKind::Le) => CmpOp::Le,
            Some(TokenKind::Gt) => CmpOp::Gt,
            Some(TokenKind::Ge) => CmpOp::Ge,
            _ => {
                self.pos -= 1;
                return Err(self.expected("comparison operator"));
            }
        };
        let negative = self.eat(&TokenKind::Minus);
        let value = match self.peek() {
            Some(TokenKind::Str(s)) if !negative => {
                let s = s.clone();
                self.pos += 1;
                Literal::Text(s)
            }
            Some(TokenKind::Number(_)) => {
                let v = self.number("literal")?;
                Literal::Number(if negative { -v } else { v })
            }
            _ => return Err(self.expected("number or string literal")),
        };
        Ok(Comparison { column, op, value })
    }

    fn generate(&mut self) -> Result<GenerateClauses> {
        self.expect_keyword(Keyword::GENERATE)?;
        let display = if self.eat_keyword(Keyword::DISPLAY) {
            self.expect_keyword(Keyword::OF)?;
            true
        } else {
            false
        };
        let task = self.task_head()?;
        let over = if self.eat_keyword(Keyword::OVER) {
            Some(self.table_name()?)
        } else {
            None
        };

        let mut model_ref = ModelRef::None;
        while self.peek_keyword(Keyword::USING) || self.peek_keyword(Keyword::ALGORITHM) {
            let next = if self.eat_keyword(Keyword::USING) {
                if self.eat_keyword(Keyword::MODEL) {
                    ModelRef::Stored(self.name("model name")?)
                } else {
                    self.expect_keyword(Keyword::ALGORITHM)
                        .map_err(|_| self.expected("MODEL or ALGORITHM"))?;
                    ModelRef::Algorithm(self.name("algorithm name")?)
                }
            } else {
                self.expect_keyword(Keyword::ALGORITHM)?;
                ModelRef::Algorithm(self.name("algorithm name")?)
            };
            match (&model_ref, &next) {
                (ModelRef::None, _) => model_ref = next,
                (ModelRef::Stored(_), ModelRef::Algorithm(_))
                | (ModelRef::Algorithm(_), ModelRef::Stored(_)) => {
                    return Err(MqlError::Exclusivity)
                }
                _ => return Err(self.expected("a single USING clause")),
            }
        }

        let accuracy = self.accuracy()?;
        let mut labels = if self.eat_keyword(Keyword::LABEL) {
            self.name_list("label column")?
        } else {
            Vec::new()
        };
        let features = if self.eat_keyword(Keyword::FEATURES) {
            Some(self.feature_list()?)
        } else {
            None
        };
        // The short template form puts LABEL after FEATURES.
        if labels.is_empty() && features.is_some() && self.eat_keyword(Keyword::LABEL) {
            labels = self.name_list("label column")?;
        }
        let (from, filter) = if self.eat_keyword(Keyword::FROM) {
            (self.table_list()?, self.where_clause()?)
        } else {
            (Vec::new(), None)
        };

        if !matches!(model_ref, ModelRef::Stored(_)) {
            if features.is_none() {
                return Err(self.expected("FEATURES (required unless USING MODEL)"));
            }
            if from.is_empty() {
                return Err(self.expected("FROM (required unless USING MODEL)"));
            }
        }
        if features.is_some() && from.is_empty() {
            return Err(self.expected("FROM after FEATURES"));
        }

        Ok(GenerateClauses {
            display,
            task,
            over,
            model_ref,
            accuracy,
            labels,
            features,
            from,
            filter,
        })
    }

    fn feature_list(&mut self) -> Result<FeatureList> {
        if self.eat(&TokenKind::Star) {
            Ok(FeatureList::All)
        } else {
            Ok(FeatureList::Columns(self.name_list("feature column")?))
        }
    }

    fn construct(&mut self) -> Result<ConstructClauses> {
        self.expect_keyword(Keyword::CONSTRUCT)?;
        let model_name = self.name("model name")?;
        let supervision = if self.eat_keyword(Keyword::AS) {
            if self.eat_keyword(Keyword::SUPERVISED) {
                Some(Supervision::Supervised)
            } else if self.eat_keyword(Keyword::UNSUPERVISED) {
                Some(Supervision::Unsupervised)
            } else {
                return Err(self.expected("SUPERVISED or UNSUPERVISED"));
            }
        } else {
            None
        };
        self.expect_keyword(Keyword::FOR)?;
        let task = self.task_head()?;
        let algorithm = if self.eat_keyword(Keyword::USING) {
            if self.peek_keyword(Keyword::MODEL) {
                return Err(self.expected("algorithm name (CONSTRUCT cannot use a stored model)"));
            }
            self.eat_keyword(Keyword::ALGORITHM);
            Some(self.name("algorithm name")?)
        } else {
            None
        };
        let accuracy = self.accuracy()?;
        self.expect_keyword(Keyword::TRAIN)?;
        self.expect_keyword(Keyword::ON)?;
        let train_n = self.int_expr()?;
        self.expect_keyword(Keyword::TEST)?;
        self.expect_keyword(Keyword::ON)?;
        let test_m = self.int_expr()?;
        self.expect_keyword(Keyword::FEATURES)?;
        let features = self.feature_list()?;
        self.expect_keyword(Keyword::FROM)?;
        let from = self.table_list()?;
        let filter = self.where_clause()?;
        Ok(ConstructClauses {
            model_name,
            supervision,
            task,
            algorithm,
            accuracy,
            train_n,
            test_m,
            features,
            from,
            filter,
        })
    }

    fn inspect(&mut self) -> Result<InspectClauses> {
        self.expect_keyword(Keyword::INSPECT)?;
        let mut actions = Vec::new();
        let mut seen = HashSet::new();
        if !self.peek_keyword(Keyword::FROM) {
            loop {
                let column = self.name("column to inspect")?;
                if !seen.insert(column.clone()) {
                    self.pos -= 1;
                    return Err(self.expected("a column not already inspected in this statement"));
                }
                let action = self.wrangle_action()?;
                actions.push(InspectAction { column, action });
                if !self.eat(&TokenKind::Comma) {
                    break;
                }
            }
        }
        self.expect_keyword(Keyword::FROM)?;
        let from = self.table_list()?;
        let filter = self.where_clause()?;
        Ok(InspectClauses {
            actions,
            from,
            filter,
        })
    }

    fn wrangle_action(&mut self) -> Result<WrangleAction> {
        if self.eat_keyword(Keyword::CATEGORIZE) {
            self.expect_keyword(Keyword::INTO)?;
            let mut labels = vec![self.class_label()?];
            // `, next_column ACTION` ends the label list.
            while self.peek() == Some(&TokenKind::Comma) && !self.next_is_new_action() {
                self.pos += 1;
                labels.push(self.class_label()?);
            }
            if labels.len() < 2 {
                return Err(self.expected("`,` (CATEGORIZE needs at least two labels)"));
            }
            Ok(WrangleAction::Categorize(labels))
        } else if self.eat_keyword(Keyword::IMPUTE) {
            Ok(WrangleAction::Impute)
        } else if self.eat_keyword(Keyword::NUMERIZE) {
            self.expect_keyword(Keyword::AS)?;
            Ok(WrangleAction::Numerize(self.expr()?))
        } else if self.eat_keyword(Keyword::DEDUPLICATE) {
            Ok(WrangleAction::Deduplicate)
        } else {
            Err(self.expected("CATEGORIZE, IMPUTE, NUMERIZE or DEDUPLICATE"))
        }
    }

    fn next_is_new_action(&self) -> bool {
        matches!(
            self.peek_at(2),
            Some(TokenKind::Keyword(
                Keyword::CATEGORIZE | Keyword::IMPUTE | Keyword::NUMERIZE | Keyword::DEDUPLICATE
            ))
        )
    }

    fn int_expr(&mut self) -> Result<IntExpr> {
        let mut lhs = self.int_term()?;
        loop {
            let op = match self.peek() {
                Some(TokenKind::Plus) => IntOp::Add,
                Some(TokenKind::Minus) => IntOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            lhs = IntExpr::Binary(Box::new(lhs), op, Box::new(self.int_term()?));
        }
    }

    fn int_term(&mut self) -> Result<IntExpr> {
        let mut lhs = self.int_factor()?;
        loop {
            let op = match self.peek() {
                Some(TokenKind::Star) => IntOp::Mul,
                Some(TokenKind::Slash) => IntOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            lhs = IntExpr::Binary(Box::new(lhs), op, Box::new(self.int_factor()?));
        }
    }

    fn int_factor(&mut self) -> Result<IntExpr> {
        match self.peek().cloned() {
            Some(TokenKind::Number(s)) => {
                let v = s
                    .parse::<i64>()
                    .map_err(|_| self.expected("integer literal"))?;
                self.pos += 1;
                Ok(IntExpr::Literal(v))
            }
            Some(TokenKind::LParen) => {
                self.pos += 1;
                let e = self.int_expr()?;
                self.expect(TokenKind::RParen)?;
                Ok(e)
            }
            Some(TokenKind::Ident(name)) if self.peek_at(1) == Some(&TokenKind::LParen) => {
                if name.eq_ignore_ascii_case("COUNT") {
                    self.pos += 2;
                    self.expect(TokenKind::Star)
                        .map_err(|_| self.expected("`*` (only COUNT(*) is supported)"))?;
                    self.expect(TokenKind::RParen)?;
                    Ok(IntExpr::CountAll)
                } else if UNSUPPORTED_AGGREGATES
                    .iter()
                    .any(|a| a.eq_ignore_ascii_case(&name))
                {
                    Err(self.expected(&format!(
                        "COUNT(*) (aggregate {} is not supported)",
                        name.to_uppercase()
                    )))
                } else {
                    Err(self.expected("integer expression"))
                }
            }
            _ => Err(self.expected("integer expression")),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(TokenKind::Plus) => ArithOp::Add,
                Some(TokenKind::Minus) => ArithOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            lhs = Expr::Binary(Box::new(lhs), op, Box::new(self.term()?));
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(TokenKind::Star) => ArithOp::Mul,
                Some(TokenKind::Slash) => ArithOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            lhs = Expr::Binary(Box::new(lhs), op, Box::new(self.unary()?));
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat(&TokenKind::Minus) {
            Ok(Expr::Neg(Box::new(self.unary()?)))
        } else {
            self.primary()
        }
    }

    fn primary(&mut self) -> Result<Expr> {
        match self.peek().cloned() {
            Some(TokenKind::Number(_)) => Ok(Expr::Number(self.number("number")?)),
            Some(TokenKind::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(TokenKind::RParen)?;
                Ok(e)
            }
            Some(TokenKind::Ident(name)) if self.peek_at(1) == Some(&TokenKind::LParen) => {
                let func = Func::lookup(&name)
                    .ok_or_else(|| self.expected("one of log, log10, exp, abs, sqrt"))?;
                self.pos += 2;
                let arg = self.expr()?;
                self.expect(TokenKind::RParen)?;
                Ok(Expr::Call(func, Box::new(arg)))
            }
            Some(TokenKind::Ident(name) | TokenKind::QuotedIdent(name)) => {
                self.pos += 1;
                Ok(Expr::Column(name))
            }
            _ => Err(self.expected("expression")),
        }
    }
}
