//! Lexer, recursive-descent parser and canonical printer for MQL.

mod ast;
mod lexer;
mod parser;
mod printer;
mod token;

pub use ast::*;
pub use lexer::tokenize;
pub use parser::{parse_program, parse_statement};
pub use printer::{expr as print_expr, int_expr as print_int_expr, pretty_print, pretty_print_program};
pub use token::{Keyword, Token, TokenKind};

#[cfg(test)]
mod roundtrip {
    use super::*;
    use crate::table::{CmpOp, Comparison, Literal, Predicate};
    use proptest::prelude::*;

    fn name() -> impl Strategy<Value = String> {
        prop_oneof![
            4 => "[A-Za-z_][A-Za-z0-9_]{0,6}",
            1 => Just("label".to_string()),
            1 => "[a-z ]{1,4}\"?",
        ]
    }

    fn table_name() -> impl Strategy<Value = String> {
        prop_oneof![
            "[A-Za-z][A-Za-z0-9_]{0,5}",
            "[A-Za-z][a-z]{0,4}\\.csv",
            "[a-z]{1,3}/[a-z]{1,3}\\.csv",
        ]
    }

    fn int_expr() -> impl Strategy<Value = IntExpr> {
        let leaf = prop_oneof![
            (0i64..100_000).prop_map(IntExpr::Literal),
            Just(IntExpr::CountAll)
        ];
        leaf.prop_recursive(3, 12, 2, |inner| {
            (
                inner.clone(),
                prop_oneof![
                    Just(IntOp::Add),
                    Just(IntOp::Sub),
                    Just(IntOp::Mul),
                    Just(IntOp::Div)
                ],
                inner,
            )
                .prop_map(|(l, op, r)| IntExpr::Binary(Box::new(l), op, Box::new(r)))
        })
    }

    fn expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            (0.0f64..1e6).prop_map(Expr::Number),
            name().prop_map(Expr::Column)
        ];
        leaf.prop_recursive(3, 16, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
                (
                    inner.clone(),
                    prop_oneof![
                        Just(ArithOp::Add),
                        Just(ArithOp::Sub),
                        Just(ArithOp::Mul),
                        Just(ArithOp::Div)
                    ],
                    inner.clone()
                )
                    .prop_map(|(l, op, r)| Expr::Binary(Box::new(l), op, Box::new(r))),
                (
                    prop_oneof![Just(Func::Log), Just(Func::Exp), Just(Func::Sqrt)],
                    inner
                )
                    .prop_map(|(f, e)| Expr::Call(f, Box::new(e))),
            ]
        })
    }

    fn label() -> impl Strategy<Value = String> {
        prop_oneof![
            name(),
            (0u32..1000).prop_map(|v| v.to_string()),
            "[a-z]{1,3}-[a-z]{1,3}"
        ]
    }

    fn task() -> impl Strategy<Value = TaskHead> {
        prop_oneof![
            name().prop_map(|target| TaskHead::Prediction { target }),
            prop::collection::vec(label(), 2..4)
                .prop_map(|labels| TaskHead::Classification { labels }),
            int_expr().prop_map(|k| TaskHead::Cluster { k }),
        ]
    }

    fn predicate() -> impl Strategy<Value = Option<Predicate>> {
        let op = prop_oneof![
            Just(CmpOp::Eq),
            Just(CmpOp::Ne),
            Just(CmpOp::Lt),
            Just(CmpOp::Ge)
        ];
        let lit = prop_oneof![
            (-1e4f64..1e4).prop_map(Literal::Number),
            "[a-z' ]{0,4}".prop_map(Literal::Text)
        ];
        prop::option::of(
            prop::collection::vec((name(), op, lit), 1..3).prop_map(|terms| {
                Predicate::new(
                    terms
                        .into_iter()
                        .map(|(column, op, value)| Comparison { column, op, value })
                        .collect(),
                )
            }),
        )
    }

    fn features() -> impl Strategy<Value = FeatureList> {
        prop_oneof![
            Just(FeatureList::All),
            prop::collection::vec(name(), 1..4).prop_map(FeatureList::Columns)
        ]
    }

    fn accuracy() -> impl Strategy<Value = Option<f64>> {
        prop::option::of(prop_oneof![(0.01f64..1.0), (1u32..=100).prop_map(f64::from)])
    }

    fn generate() -> impl Strategy<Value = Statement> {
        (
            any::<bool>(),
            task(),
            prop::option::of(table_name()),
            prop_oneof![
                Just(ModelRef::None),
                name().prop_map(ModelRef::Stored),
                name().prop_map(ModelRef::Algorithm)
            ],
            accuracy(),
            prop::collection::vec(name(), 0..3),
            features(),
            prop::collection::vec(table_name(), 1..3),
            predicate(),
        )
            .prop_map(
                |(display, task, over, model_ref, accuracy, labels, features, from, filter)| {
                    Statement::Generate(GenerateClauses {
                        display,
                        task,
                        over,
                        model_ref,
                        accuracy,
                        labels,
                        features: Some(features),
                        from,
                        filter,
                    })
                },
            )
    }

    fn construct() -> impl Strategy<Value = Statement> {
        (
            name(),
            prop::option::of(prop_oneof![
                Just(Supervision::Supervised),
                Just(Supervision::Unsupervised)
            ]),
            task(),
            prop::option::of(name()),
            accuracy(),
            int_expr(),
            int_expr(),
            features(),
            prop::collection::vec(table_name(), 1..3),
            predicate(),
        )
            .prop_map(
                |(model_name, supervision, task, algorithm, accuracy, n, m, features, from, filter)| {
                    Statement::Construct(ConstructClauses {
                        model_name,
                        supervision,
                        task,
                        algorithm,
                        accuracy,
                        train_n: n,
                        test_m: m,
                        features,
                        from,
                        filter,
                    })
                },
            )
    }

    fn inspect() -> impl Strategy<Value = Statement> {
        let action = prop_oneof![
            prop::collection::vec(label(), 2..4).prop_map(WrangleAction::Categorize),
            Just(WrangleAction::Impute),
            expr().prop_map(WrangleAction::Numerize),
            Just(WrangleAction::Deduplicate),
        ];
        (
            prop::collection::btree_map(name(), action, 0..4),
            prop::collection::vec(table_name(), 1..2),
            predicate(),
        )
            .prop_map(|(actions, from, filter)| {
                Statement::Inspect(InspectClauses {
                    actions: actions
                        .into_iter()
                        .map(|(column, action)| InspectAction { column, action })
                        .collect(),
                    from,
                    filter,
                })
            })
    }

    proptest! {
        #[test]
        fn print_then_parse_is_identity(
            stmts in prop::collection::vec(prop_oneof![generate(), construct(), inspect()], 1..4)
        ) {
            let text = pretty_print_program(&stmts);
            let reparsed = parse_program(&text)
                .map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
            prop_assert_eq!(reparsed, stmts);
        }

        #[test]
        fn arbitrary_text_never_panics(text in "\\PC{0,80}") {
            let _ = parse_program(&text);
        }
    }
}
