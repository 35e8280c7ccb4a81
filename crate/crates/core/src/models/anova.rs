use statrs::distribution::{ContinuousCDF, FisherSnedecor};

use crate::error::{Error, Result};

/// One-way ANOVA F statistic for two groups and its upper-tail p-value.
///
/// Zero within-group variance with non-zero between-group variance gives
/// `(+inf, 0)`. A column that is constant overall has no defined F and
/// returns `(NaN, NaN)`.
pub fn anova_f(column: &[f64], labels: &[u8]) -> Result<(f64, f64)> {
    if column.len() != labels.len() {
        return Err(Error::invalid("column and labels differ in length"));
    }
    let mut sum = [0.0f64; 2];
    let mut cnt = [0usize; 2];
    for (&v, &y) in column.iter().zip(labels) {
        if y > 1 {
            return Err(Error::invalid(format!("label {y} is not 0 or 1")));
        }
        sum[y as usize] += v;
        cnt[y as usize] += 1;
    }
    if cnt[0] == 0 || cnt[1] == 0 {
        return Err(Error::SingleClass);
    }
    let n = column.len();
    let grand = (sum[0] + sum[1]) / n as f64;
    let means = [sum[0] / cnt[0] as f64, sum[1] / cnt[1] as f64];
    let ssb: f64 = (0..2).map(|g| cnt[g] as f64 * (means[g] - grand).powi(2)).sum();
    let ssw: f64 = column.iter().zip(labels).map(|(&v, &y)| (v - means[y as usize]).powi(2)).sum();
    let df_b = 1.0;
    let df_w = (n - 2) as f64;
    if ssw == 0.0 {
        return Ok(if ssb > 0.0 { (f64::INFINITY, 0.0) } else { (f64::NAN, f64::NAN) });
    }
    if df_w <= 0.0 {
        return Ok((f64::NAN, f64::NAN));
    }
    let f = (ssb / df_b) / (ssw / df_w);
    let p = match FisherSnedecor::new(df_b, df_w) {
        Ok(d) => d.sf(f),
        Err(_) => f64::NAN,
    };
    Ok((f, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use socialsig_oracles::anova_f_direct;

    #[test]
    fn identical_groups() {
        let (f, p) = anova_f(&[1.0, 2.0, 3.0, 1.0, 2.0, 3.0], &[0, 0, 0, 1, 1, 1]).unwrap();
        assert_eq!(f, 0.0);
        assert!((p - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_within_variance() {
        assert_eq!(anova_f(&[0.0, 0.0, 1.0, 1.0], &[0, 0, 1, 1]).unwrap(), (f64::INFINITY, 0.0));
        assert!(anova_f(&[2.0; 4], &[0, 0, 1, 1]).unwrap().0.is_nan());
    }

    #[test]
    fn small_hand_example() {
        // Means 1.5 and 4, grand mean 2.75: SSB = 6.25, SSW = 0.5 + 2 = 2.5,
        // F = 6.25 / (2.5 / 2) = 5.
        let (f, p) = anova_f(&[1.0, 2.0, 3.0, 5.0], &[0, 0, 1, 1]).unwrap();
        assert!((f - 5.0).abs() < 1e-12);
        // F(1, 2) = T² for T with 2 degrees of freedom: P(|T| > t) = 1 - t/sqrt(2 + t²).
        let t = 5f64.sqrt();
        let want = 1.0 - t / (2.0 + t * t).sqrt();
        assert!((p - want).abs() < 1e-10, "{p} vs {want}");
    }

    #[test]
    fn single_class_rejected() {
        assert!(matches!(anova_f(&[1.0, 2.0], &[1, 1]), Err(Error::SingleClass)));
    }

    proptest! {
        #[test]
        fn matches_direct_sums(v in prop::collection::vec((-10.0f64..10.0, 0u8..2), 4..80)) {
            let labels: Vec<u8> = v.iter().map(|p| p.1).collect();
            prop_assume!(labels.contains(&0) && labels.contains(&1));
            let col: Vec<f64> = v.iter().map(|p| p.0).collect();
            let groups = vec![
                v.iter().filter(|p| p.1 == 0).map(|p| p.0).collect::<Vec<_>>(),
                v.iter().filter(|p| p.1 == 1).map(|p| p.0).collect::<Vec<_>>(),
            ];
            let (f, p) = anova_f(&col, &labels).unwrap();
            let want = anova_f_direct(&groups);
            prop_assert!((f - want).abs() <= 1e-10 * want.abs().max(1.0));
            prop_assert!((0.0..=1.0).contains(&p));
        }
    }
}
