//! Tab-separated interchange formats.
//!
//! The accuracy matrix is wide: a header row `dataset<TAB>method…`, then one
//! row per dataset of mean accuracies. Fold-level results are long: one
//! `dataset method run fold accuracy correct tested` row per fold. In both,
//! lines starting with `#` are comments and blank lines are ignored.

use std::fmt::Write as _;

use lcwnb_core::eval::{AccuracyMatrix, EvalResult, FoldAccuracy};
use lcwnb_core::lcwnb::auto_kappa;

use crate::error::{Error, Result};

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
}

fn number(field: &str, line: usize) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|_| Error::parse(line, format!("`{field}` is not a number")))
}

pub fn read_matrix_tsv(text: &str) -> Result<AccuracyMatrix> {
    let mut lines = content_lines(text);
    let (_, header) = lines.next().ok_or_else(|| Error::parse(1, "empty accuracy matrix"))?;
    let methods: Vec<String> = header.split('\t').skip(1).map(|s| s.trim().to_string()).collect();
    let mut datasets = Vec::new();
    let mut means = Vec::new();
    for (line, l) in lines {
        let fields: Vec<&str> = l.split('\t').collect();
        if fields.len() != methods.len() + 1 {
            return Err(Error::parse(
                line,
                format!("expected {} fields, found {}", methods.len() + 1, fields.len()),
            ));
        }
        datasets.push(fields[0].trim().to_string());
        means.push(fields[1..].iter().map(|f| number(f, line)).collect::<Result<Vec<_>>>()?);
    }
    Ok(AccuracyMatrix::new(datasets, methods, means)?)
}

pub fn write_matrix_tsv(matrix: &AccuracyMatrix, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    let _ = writeln!(out, "dataset\t{}", matrix.methods().join("\t"));
    for (d, row) in matrix.datasets().iter().zip(matrix.means()) {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "{d}\t{}", cells.join("\t"));
    }
    out
}

const FOLD_HEADER: &str = "dataset\tmethod\trun\tfold\taccuracy\tcorrect\ttested";

pub fn write_folds_tsv(results: &[EvalResult]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{FOLD_HEADER}");
    for r in results {
        for f in &r.folds {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                r.dataset, r.method, f.run, f.fold, f.accuracy, f.correct, f.tested
            );
        }
    }
    out
}

/// Reads fold rows back into per-(dataset, method) results, in order of
/// first appearance. The `correct` and `tested` columns are optional.
pub fn read_folds_tsv(text: &str) -> Result<Vec<EvalResult>> {
    let mut groups: Vec<((String, String), Vec<FoldAccuracy>)> = Vec::new();
    for (line, l) in content_lines(text) {
        let fields: Vec<&str> = l.split('\t').map(str::trim).collect();
        if fields[0] == "dataset" {
            continue;
        }
        if fields.len() != 5 && fields.len() != 7 {
            return Err(Error::parse(line, format!("expected 5 or 7 fields, found {}", fields.len())));
        }
        let int = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| Error::parse(line, format!("`{s}` is not a nonnegative integer")))
        };
        let accuracy = number(fields[4], line)?;
        if !(0.0..=1.0).contains(&accuracy) {
            return Err(Error::parse(line, format!("accuracy {accuracy} outside [0, 1]")));
        }
        let (correct, tested) = if fields.len() == 7 {
            (int(fields[5])?, int(fields[6])?)
        } else {
            (0, 0)
        };
        let fold = FoldAccuracy {
            run: int(fields[2])?,
            fold: int(fields[3])?,
            correct,
            tested,
            accuracy,
        };
        let key = (fields[0].to_string(), fields[1].to_string());
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, v)) => v.push(fold),
            None => groups.push((key, vec![fold])),
        }
    }
    Ok(groups
        .into_iter()
        .map(|((d, m), folds)| EvalResult::from_folds(m, d, folds))
        .collect())
}

/// Published size of one benchmark dataset; `m` counts the class attribute.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Characteristics {
    pub dataset: String,
    pub n: usize,
    pub m: usize,
    pub r: usize,
}

pub fn read_characteristics(text: &str) -> Result<Vec<Characteristics>> {
    let mut out = Vec::new();
    for (line, l) in content_lines(text) {
        let fields: Vec<&str> = l.split('\t').map(str::trim).collect();
        if fields[0] == "dataset" {
            continue;
        }
        if fields.len() != 4 {
            return Err(Error::parse(line, format!("expected 4 fields, found {}", fields.len())));
        }
        let int = |s: &str| s.parse::<usize>().map_err(|_| Error::parse(line, format!("`{s}` is not an integer")));
        out.push(Characteristics {
            dataset: fields[0].to_string(),
            n: int(fields[1])?,
            m: int(fields[2])?,
            r: int(fields[3])?,
        });
    }
    Ok(out)
}

/// Per-dataset accuracies of the `κ` switching rule: the column named by
/// `columns` for `auto_kappa(m)` = 20, 10, 5 respectively.
pub fn switching_column(
    matrix: &AccuracyMatrix,
    characteristics: &[Characteristics],
    columns: [&str; 3],
) -> Result<Vec<f64>> {
    let idx = columns
        .iter()
        .map(|c| matrix.method_index(c))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    matrix
        .datasets()
        .iter()
        .zip(matrix.means())
        .map(|(d, row)| {
            let ch = characteristics
                .iter()
                .find(|c| c.dataset == *d)
                .ok_or_else(|| Error::Ingest(format!("no characteristics for dataset `{d}`")))?;
            let k = auto_kappa(ch.m);
            let pick = if k >= 20.0 {
                idx[0]
            } else if k >= 10.0 {
                idx[1]
            } else {
                idx[2]
            };
            Ok(row[pick])
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_round_trip() {
        let text = "# note\ndataset\ta\tb\nd1\t0.5\t0.25\n\nd2\t1\t0\n";
        let m = read_matrix_tsv(text).unwrap();
        assert_eq!(m.methods(), ["a", "b"]);
        assert_eq!(m.means(), [vec![0.5, 0.25], vec![1.0, 0.0]]);
        let back = read_matrix_tsv(&write_matrix_tsv(&m, &["x".into()])).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn matrix_errors() {
        assert!(matches!(read_matrix_tsv("dataset\ta\nd1\t0.1\t0.2\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(read_matrix_tsv("dataset\ta\nd1\tx\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(read_matrix_tsv("dataset\ta\ta\nd1\t1\t2\n"), Err(Error::Core(_))));
    }

    #[test]
    fn folds_round_trip() {
        let r = EvalResult::from_folds(
            "nb",
            "iris",
            vec![
                FoldAccuracy { run: 0, fold: 0, correct: 14, tested: 15, accuracy: 14.0 / 15.0 },
                FoldAccuracy { run: 0, fold: 1, correct: 15, tested: 15, accuracy: 1.0 },
            ],
        );
        let back = read_folds_tsv(&write_folds_tsv(std::slice::from_ref(&r))).unwrap();
        assert_eq!(back, vec![r]);
        assert!(read_folds_tsv("dataset\tmethod\trun\tfold\taccuracy\nd\tm\t0\t0\t1.5\n").is_err());
    }

    #[test]
    fn switching_rule_picks_by_attribute_count() {
        let m = AccuracyMatrix::new(
            vec!["small".into(), "mid".into(), "big".into()],
            vec!["k5".into(), "k10".into(), "k20".into()],
            vec![vec![1.0, 2.0, 3.0], vec![1.0, 2.0, 3.0], vec![1.0, 2.0, 3.0]],
        )
        .unwrap();
        let ch = read_characteristics("dataset\tn\tm\tr\nsmall\t10\t14\t2\nmid\t10\t16\t2\nbig\t10\t17\t2\n").unwrap();
        assert_eq!(switching_column(&m, &ch, ["k20", "k10", "k5"]).unwrap(), vec![3.0, 2.0, 1.0]);
    }
}
