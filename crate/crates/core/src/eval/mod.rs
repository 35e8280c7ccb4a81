//! Satisfaction labels, leave-one-out evaluation, metrics and reports.

mod labels;
mod loocv;
mod metrics;
mod questionnaire;
mod report;

pub use labels::{binarize_labels, Binarized, LOW_PERCENTILE};
pub use loocv::{fit_all, fit_fold, loocv, FoldFit, FoldOutcome, LabeledDataset, LoocvConfig, LoocvResult, SelectionScope, DEFAULT_K};
pub use metrics::{compute_metrics, roc_auc, ClassificationMetrics};
pub use questionnaire::{average_items, cronbach_alpha, parse_questionnaire, write_questionnaire, QuestionnaireResponse, ITEMS};
pub use report::{evaluate_model, render_report, EvalReport, ReportRow, SelectedFeature, REPORT_COLUMNS};

/// JSON for floats that may be infinite or NaN: finite values stay numbers,
/// the rest become the strings `"inf"`, `"-inf"` and `"nan"`.
pub(crate) mod float_repr {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => match t.as_str() {
                "nan" => Ok(f64::NAN),
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                other => Err(serde::de::Error::custom(format!("not a number: {other:?}"))),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::{Engine, FeatureMatrix, FeatureVector};
    use crate::models::{ModelKind, ModelSpec};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn dataset(n: usize, d: usize, sep: f64, seed: u64) -> LabeledDataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let labels: Vec<u8> = (0..n).map(|i| u8::from(i % 3 != 0)).collect();
        let rows: Vec<Vec<f64>> = labels
            .iter()
            .map(|&l| {
                (0..d)
                    .map(|j| {
                        let z: f64 = StandardNormal.sample(&mut rng);
                        if j < 2 { z + sep * f64::from(l) } else { z }
                    })
                    .collect()
            })
            .collect();
        LabeledDataset {
            engine: Engine::SpectralStat,
            session_ids: (0..n).map(|i| format!("s{i:02}")).collect(),
            names: (0..d).map(|j| format!("f{j}")).collect(),
            scores: labels.iter().map(|&l| 2.0 + 2.0 * f64::from(l)).collect(),
            rows,
            labels,
            threshold: 2.0,
        }
    }

    fn cfg(k: usize) -> LoocvConfig {
        LoocvConfig { k, ..Default::default() }
    }

    #[test]
    fn four_rows_four_folds() {
        let ds = dataset(6, 3, 4.0, 1);
        let ds = LabeledDataset { rows: ds.rows[..4].to_vec(), labels: vec![0, 1, 0, 1], scores: vec![1.0, 4.0, 1.0, 4.0], session_ids: ds.session_ids[..4].to_vec(), ..ds };
        let spec = ModelSpec::default_for(ModelKind::GaussianNb, 0);
        let r = loocv(&ds, &spec, &cfg(1)).unwrap();
        assert_eq!(r.folds.len(), 4);
        let ids: Vec<&str> = r.folds.iter().map(|f| f.session_id.as_str()).collect();
        assert_eq!(ids, ["s00", "s01", "s02", "s03"]);
    }

    #[test]
    fn separable_data_is_perfect() {
        let ds = dataset(30, 8, 12.0, 2);
        for kind in ModelKind::ALL {
            let row = evaluate_model(&ds, &ModelSpec::default_for(kind, 3), &cfg(3)).unwrap();
            assert_eq!(row.metrics.accuracy, 100.0, "{kind}");
        }
    }

    #[test]
    fn degenerate_fold_predicts_majority() {
        // One class-0 row: its fold trains on class 1 only.
        let mut ds = dataset(8, 3, 3.0, 4);
        ds.labels = vec![0, 1, 1, 1, 1, 1, 1, 1];
        let r = loocv(&ds, &ModelSpec::default_for(ModelKind::LogisticRegression, 0), &cfg(2)).unwrap();
        assert!(r.folds[0].degenerate);
        assert_eq!(r.folds[0].prediction, 1);
        assert_eq!(r.degenerate_sessions(), vec!["s00".to_string()]);
    }

    #[test]
    fn held_out_row_does_not_touch_fold_statistics() {
        let ds = dataset(24, 12, 1.0, 5);
        let spec = ModelSpec::default_for(ModelKind::LogisticRegression, 0);
        for fold in [0, 7, 19] {
            let a = fit_fold(&ds, fold, &spec, &cfg(4), None).unwrap();
            let mut mutated = ds.clone();
            mutated.rows[fold].iter_mut().for_each(|v| *v = *v * 100.0 + 17.0);
            let b = fit_fold(&mutated, fold, &spec, &cfg(4), None).unwrap();
            assert_eq!(a.names, b.names);
            assert_eq!(a.standardizer, b.standardizer);
        }
    }

    #[test]
    fn global_scope_reuses_one_selection() {
        let ds = dataset(18, 6, 2.0, 6);
        let c = LoocvConfig { scope: SelectionScope::Global, ..cfg(2) };
        let r = loocv(&ds, &ModelSpec::default_for(ModelKind::GaussianNb, 0), &c).unwrap();
        assert!(r.folds.windows(2).all(|w| w[0].selected == w[1].selected));
    }

    #[test]
    fn report_rendering_and_round_trip() {
        let ds = dataset(15, 5, 3.0, 7);
        let mut rows = Vec::new();
        for kind in [ModelKind::RandomForest, ModelKind::LogisticRegression] {
            rows.push(evaluate_model(&ds, &ModelSpec::default_for(kind, 1), &cfg(2)).unwrap());
        }
        let mut rep = EvalReport { sessions: 15, class_counts: ds.class_counts(), threshold: ds.threshold, k: 2, scope: SelectionScope::InFold, seed: 1, rows };
        rep.sort_rows();
        assert_eq!(rep.rows[0].model, ModelKind::LogisticRegression);
        let back = EvalReport::from_json(&rep.to_json()).unwrap();
        assert_eq!(back.to_json(), rep.to_json());
        let table = render_report(&rep);
        assert_eq!(table.lines().count(), 4);
        assert!(table.lines().next().unwrap().contains("Precision | Recall | F1-Score | Accuracy | ROC-AUC"));
        let empty = EvalReport { rows: vec![], ..rep };
        assert_eq!(render_report(&empty).lines().count(), 2);
    }

    #[test]
    fn nonfinite_floats_survive_json() {
        let f = SelectedFeature { name: "x".into(), folds: 1, f_value: f64::INFINITY, p_value: f64::NAN };
        let back: SelectedFeature = serde_json::from_str(&serde_json::to_string(&f).unwrap()).unwrap();
        assert_eq!(back.f_value, f64::INFINITY);
        assert!(back.p_value.is_nan());
    }

    #[test]
    fn exported_model_scores_like_the_fit() {
        let ds = dataset(20, 6, 2.0, 8);
        for kind in ModelKind::ALL {
            let fit = fit_all(&ds, &ModelSpec::default_for(kind, 2), &cfg(3)).unwrap();
            let back = crate::models::ExportedModel::from_json(&fit.export(kind).to_json()).unwrap();
            for row in &ds.rows {
                assert_eq!(back.predict(&ds.names, row).unwrap(), fit.predict_row(row), "{kind}");
            }
        }
        let bad = crate::models::ExportedModel { selected_features: vec!["nope".into()], ..fit_all(&ds, &ModelSpec::default_for(ModelKind::GaussianNb, 0), &cfg(1)).unwrap().export(ModelKind::GaussianNb) };
        assert!(bad.predict(&ds.names, &ds.rows[0]).is_err());
    }

    #[test]
    fn dataset_alignment() {
        let m = FeatureMatrix {
            engine: Engine::Zones,
            names: vec!["a".into()],
            rows: vec![
                FeatureVector { session_id: "b".into(), values: vec![1.0], flagged: vec![false] },
                FeatureVector { session_id: "a".into(), values: vec![2.0], flagged: vec![false] },
            ],
        };
        let q = vec![QuestionnaireResponse::new("a", [5, 5, 5, 5, 5]).unwrap(), QuestionnaireResponse::new("b", [1, 1, 1, 1, 1]).unwrap()];
        let ds = LabeledDataset::from_matrix(&m, &q).unwrap();
        assert_eq!(ds.scores, vec![1.0, 5.0]);
        assert_eq!(ds.labels, vec![0, 1]);
        assert!(LabeledDataset::from_matrix(&m, &q[..1]).is_err());
    }
}
