use std::fmt;

macro_rules! keywords {
    ($($kw:ident),* $(,)?) => {
        /// Reserved words. Matching is case-insensitive.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
        pub enum Keyword {
            $($kw),*
        }

        impl Keyword {
            pub const ALL: &'static [Keyword] = &[$(Keyword::$kw),*];

            pub fn as_str(self) -> &'static str {
                match self {
                    $(Keyword::$kw => stringify!($kw)),*
                }
            }
        }
    };
}

keywords!(
    GENERATE, CONSTRUCT, INSPECT, DISPLAY, OF, PREDICTION, CLASSIFICATION, INTO, CLUSTER, OVER,
    USING, MODEL, ALGORITHM, WITH, ACCURACY, LABEL, FEATURES, FROM, WHERE, AND, AS, SUPERVISED,
    UNSUPERVISED, FOR, TRAIN, ON, TEST, CATEGORIZE, IMPUTE, NUMERIZE, DEDUPLICATE,
);

impl Keyword {
    pub fn lookup(word: &str) -> Option<Keyword> {
        Keyword::ALL
            .iter()
            .copied()
            .find(|k| k.as_str().eq_ignore_ascii_case(word))
    }
}

impl fmt::Display for Keyword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Keyword(Keyword),
    Ident(String),
    /// `"..."`, used for names that collide with keywords.
    QuotedIdent(String),
    /// `'...'`
    Str(String),
    /// Numeric literal, kept as written.
    Number(String),
    Comma,
    LParen,
    RParen,
    Star,
    Plus,
    Minus,
    Slash,
    Semicolon,
    Dot,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Keyword(k) => write!(f, "keyword {k}"),
            TokenKind::Ident(s) => write!(f, "identifier `{s}`"),
            TokenKind::QuotedIdent(s) => write!(f, "identifier \"{s}\""),
            TokenKind::Str(s) => write!(f, "string '{s}'"),
            TokenKind::Number(s) => write!(f, "number {s}"),
            TokenKind::Comma => f.write_str("`,`"),
            TokenKind::LParen => f.write_str("`(`"),
            TokenKind::RParen => f.write_str("`)`"),
            TokenKind::Star => f.write_str("`*`"),
            TokenKind::Plus => f.write_str("`+`"),
            TokenKind::Minus => f.write_str("`-`"),
            TokenKind::Slash => f.write_str("`/`"),
            TokenKind::Semicolon => f.write_str("`;`"),
            TokenKind::Dot => f.write_str("`.`"),
            TokenKind::Eq => f.write_str("`=`"),
            TokenKind::Ne => f.write_str("`<>`"),
            TokenKind::Lt => f.write_str("`<`"),
            TokenKind::Le => f.write_str("`<=`"),
            TokenKind::Gt => f.write_str("`>`"),
            TokenKind::Ge => f.write_str("`>=`"),
        }
    }
}

/// A token with its 1-based source position.
#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub line: usize,
    pub column: usize,
}
