use std::sync::Arc;

use crate::analyzer::{Delta, ModelMode};
use crate::display::{render_bar, render_clusters, render_scatter, PlotKind};
use crate::error::{MqlError, Result};
use crate::learn::{MlType, Model};
use crate::result::{Actuals, ResultSet};
use crate::table::{Column, Table};

use super::{MissingPolicy, Output, Report, Session};

impl Session {
    /// Feature cells left missing in `t` are set to 0 or the training median.
    fn fill_missing(&self, t: &Table, model: &Model) -> Result<Table> {
        let mut out: Option<Table> = None;
        for (j, f) in model.features.iter().enumerate() {
            let cur = out.as_ref().unwrap_or(t);
            let Some(cells) = cur.column(&f.name).ok().and_then(|c| c.as_numeric()) else {
                continue;
            };
            if cells.iter().all(Option::is_some) {
                continue;
            }
            let fill = match self.missing {
                MissingPolicy::Zero => 0.0,
                MissingPolicy::Impute => model.train_medians.get(j).copied().unwrap_or(0.0),
            };
            let col = Column::numeric(&f.name, cells.iter().map(|v| Some(v.unwrap_or(fill))).collect())?;
            out = Some(cur.replace_column(&f.name, col)?);
        }
        Ok(out.unwrap_or_else(|| t.clone()))
    }

    pub(crate) fn exec_generate(&mut self, d: &Delta, i: usize, report: &mut Report) -> Result<()> {
        let ml = d.ml_type.expect("task statement");
        let (model, input): (Model, Arc<Table>) = if d.model == ModelMode::Stored {
            let name = d.mod_name.as_deref().unwrap_or_default();
            let model = self.store.load(name)?;
            if let Some(p) = d.accuracy {
                let score = model.reference_metrics().normalized_score;
                if score < p {
                    return Err(MqlError::AccuracyBelowThreshold {
                        model: name.to_string(),
                        score,
                        threshold: p,
                    });
                }
            }
            let input = match (&d.over_table, d.from_table()) {
                (Some(o), _) => self.resolve_table(o)?,
                (None, Some(f)) => {
                    let t = self.resolve_table(f)?;
                    match &d.filter {
                        Some(p) => Arc::new(t.apply_where(p)?),
                        None => t,
                    }
                }
                (None, None) => return Err(MqlError::Unsupported("USING MODEL needs OVER or FROM".into())),
            };
            (model, input)
        } else {
            let prep = self.prepare(d, i, report)?;
            let trained = self.train(d, &prep, true, i, report)?;
            let input = match (&d.over_table, ml) {
                (Some(o), _) => self.resolve_table(o)?,
                (None, MlType::Clus) => Arc::new(trained.train),
                (None, _) => Arc::new(trained.test.unwrap_or_else(|| prep.data.take_rows(&[]))),
            };
            (trained.model, input)
        };

        let scored = self.fill_missing(&input, &model)?;
        let outputs = model.predict(&scored)?;
        let labels = d
            .labels
            .iter()
            .map(|l| Ok((l.clone(), scored.column(l)?.cells().map(|c| c.token()).collect())))
            .collect::<Result<Vec<_>>>()?;
        let target_name = model.target.clone().unwrap_or_default();
        let actuals = match (ml, scored.column(&target_name)) {
            (MlType::Pred, Ok(c)) if c.missing_count() == 0 => {
                c.as_numeric().map(|v| Actuals::Real(v.iter().flatten().copied().collect()))
            }
            (MlType::Class, Ok(c)) if c.missing_count() == 0 => Some(Actuals::Class(c.cells().map(|c| c.token()).collect())),
            _ => None,
        };
        let rs = ResultSet {
            statement: i,
            ml_type: ml,
            target_name,
            labels,
            outputs,
            actuals,
            categories: model.class_labels.clone(),
            over: d.over_table.is_some(),
        };
        report
            .artifacts
            .push(self.write_artifact(&format!("stmt{i:02}_result.csv"), &rs.to_csv()?)?);
        report.outputs.push(Output::Result(rs.clone()));

        if d.display {
            let kind = PlotKind::for_result(&rs);
            let svg = match kind {
                PlotKind::Bar => render_bar(&rs)?,
                PlotKind::Scatter => render_scatter(&rs)?,
                PlotKind::Clusters => {
                    render_clusters(&rs, &scored, &model.feature_names(), &model.centroids().unwrap_or_default())?
                }
            };
            report
                .artifacts
                .push(self.write_artifact(&format!("stmt{i:02}_{}.svg", kind.file_stem()), &svg)?);
        }
        Ok(())
    }
}
