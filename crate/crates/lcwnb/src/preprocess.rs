//! Missing-value replacement, equal-width discretization and removal of
//! near-unique attributes, applied once to a whole dataset.

use lcwnb_core::{AttributeSchema, ClassSchema, Dataset, Instance};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raw::{Cell, ColumnType, RawDataset};

pub const DEFAULT_BINS: usize = 10;
pub const DEFAULT_PRUNE_RATIO: f64 = 0.95;

/// Value used for a column's missing cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fill {
    Mean(f64),
    Mode(String),
}

/// Per-column fill values, `None` for complete columns. Numeric columns use
/// the mean of observed cells; nominal columns the most frequent value,
/// ties going to the value declared first.
pub fn missing_fills(raw: &RawDataset) -> Result<Vec<Option<Fill>>> {
    let mut fills = Vec::with_capacity(raw.columns.len());
    for (c, col) in raw.columns.iter().enumerate() {
        let missing = raw.missing_count(c);
        if missing == 0 {
            fills.push(None);
            continue;
        }
        if missing == raw.num_rows() {
            return Err(Error::Ingest(format!("attribute `{}` has no observed values", col.name)));
        }
        let fill = match &col.kind {
            ColumnType::Numeric => {
                let (sum, n) = raw.rows.iter().fold((0.0, 0usize), |(s, n), r| match r[c] {
                    Cell::Numeric(v) => (s + v, n + 1),
                    _ => (s, n),
                });
                Fill::Mean(sum / n as f64)
            }
            ColumnType::Nominal(domain) => {
                let mut counts = vec![0usize; domain.len()];
                for r in &raw.rows {
                    if let Cell::Nominal(v) = r[c] {
                        counts[v] += 1;
                    }
                }
                let mut best = 0;
                for (v, &k) in counts.iter().enumerate() {
                    if k > counts[best] {
                        best = v;
                    }
                }
                Fill::Mode(domain[best].clone())
            }
        };
        fills.push(Some(fill));
    }
    Ok(fills)
}

/// Returns a copy with every missing cell filled.
pub fn replace_missing(raw: &RawDataset) -> Result<RawDataset> {
    let fills = missing_fills(raw)?;
    let mut out = raw.clone();
    for (c, fill) in fills.iter().enumerate() {
        let Some(fill) = fill else { continue };
        let cell = match fill {
            Fill::Mean(v) => Cell::Numeric(*v),
            Fill::Mode(v) => Cell::Nominal(raw.columns[c].domain().and_then(|d| d.iter().position(|x| x == v)).unwrap_or(0)),
        };
        for row in &mut out.rows {
            if row[c] == Cell::Missing {
                row[c] = cell;
            }
        }
    }
    Ok(out)
}

/// Equal-width intervals over `[min, max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EqualWidth {
    pub min: f64,
    pub max: f64,
    pub bins: usize,
}

impl EqualWidth {
    pub fn fit(values: impl IntoIterator<Item = f64>, bins: usize) -> Option<Self> {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for v in values {
            min = min.min(v);
            max = max.max(v);
        }
        (min <= max).then_some(Self { min, max, bins })
    }

    pub fn is_constant(&self) -> bool {
        self.max <= self.min
    }

    /// Number of values after discretization: 1 for a constant column.
    pub fn cardinality(&self) -> usize {
        if self.is_constant() {
            1
        } else {
            self.bins
        }
    }

    /// `min + k·(max − min)/bins` for `k = 0..=bins`; just `[min]` when constant.
    pub fn edges(&self) -> Vec<f64> {
        if self.is_constant() {
            return vec![self.min];
        }
        let width = (self.max - self.min) / self.bins as f64;
        (0..=self.bins).map(|k| self.min + k as f64 * width).collect()
    }

    /// `⌊bins·(v − min)/(max − min)⌋` clamped to `[0, bins − 1]`.
    pub fn bin(&self, v: f64) -> usize {
        if self.is_constant() {
            return 0;
        }
        let raw = (self.bins as f64 * (v - self.min) / (self.max - self.min)).floor();
        if raw <= 0.0 {
            0
        } else {
            (raw as usize).min(self.bins - 1)
        }
    }

    pub fn labels(&self) -> Vec<String> {
        let e = self.edges();
        if self.is_constant() {
            return vec![format!("[{}]", e[0])];
        }
        (0..self.bins)
            .map(|k| {
                let close = if k + 1 == self.bins { ']' } else { ')' };
                format!("[{},{}{close}", e[k], e[k + 1])
            })
            .collect()
    }
}

fn numeric_values(raw: &RawDataset, c: usize) -> Result<Vec<f64>> {
    raw.rows
        .iter()
        .map(|r| match r[c] {
            Cell::Numeric(v) => Ok(v),
            _ => Err(Error::Ingest(format!(
                "attribute `{}` has missing values; replace them before discretizing",
                raw.columns[c].name
            ))),
        })
        .collect()
}

/// Converts a complete table into a categorical [`Dataset`]: numeric columns
/// are binned, nominal ones keep their declared domains.
pub fn discretize(raw: &RawDataset, bins: usize) -> Result<Dataset> {
    Ok(discretize_with_bins(raw, bins)?.0)
}

fn discretize_with_bins(raw: &RawDataset, bins: usize) -> Result<(Dataset, Vec<Option<EqualWidth>>)> {
    if bins == 0 {
        return Err(Error::Ingest("need at least one bin".into()));
    }
    raw.check_class()?;
    let features = raw.feature_indices();
    let mut attributes = Vec::with_capacity(features.len());
    let mut binning = Vec::with_capacity(features.len());
    let mut columns: Vec<Vec<usize>> = Vec::with_capacity(features.len());
    for &c in &features {
        let col = &raw.columns[c];
        match &col.kind {
            ColumnType::Numeric => {
                let values = numeric_values(raw, c)?;
                let eq = EqualWidth::fit(values.iter().copied(), bins)
                    .ok_or_else(|| Error::Ingest(format!("attribute `{}` has no values", col.name)))?;
                attributes.push(AttributeSchema::new(col.name.clone(), eq.labels()));
                columns.push(values.iter().map(|&v| eq.bin(v)).collect());
                binning.push(Some(eq));
            }
            ColumnType::Nominal(domain) => {
                attributes.push(AttributeSchema::new(col.name.clone(), domain.iter().cloned()));
                let values = raw
                    .rows
                    .iter()
                    .map(|r| match r[c] {
                        Cell::Nominal(v) => Ok(v),
                        _ => Err(Error::Ingest(format!(
                            "attribute `{}` has missing values; replace them before discretizing",
                            col.name
                        ))),
                    })
                    .collect::<Result<Vec<_>>>()?;
                columns.push(values);
                binning.push(None);
            }
        }
    }
    let class_domain = raw.class_column().domain().unwrap_or_default().to_vec();
    let instances = raw
        .rows
        .iter()
        .enumerate()
        .map(|(j, r)| {
            let y = match r[raw.class_index] {
                Cell::Nominal(y) => y,
                _ => unreachable!("class column checked above"),
            };
            Instance::labeled(columns.iter().map(|col| col[j]).collect(), y)
        })
        .collect();
    let ds = Dataset::try_new(attributes, ClassSchema::new(class_domain), instances)?;
    Ok((ds, binning))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PruneEntry {
    pub name: String,
    pub distinct: usize,
    pub removed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PruneReport {
    pub ratio: f64,
    /// Attributes with at least this many distinct observed values are removed.
    pub threshold: f64,
    pub attributes: Vec<PruneEntry>,
}

/// Drops attributes whose number of distinct observed values is at least
/// `ratio · n`.
pub fn prune_high_cardinality(dataset: &Dataset, ratio: f64) -> Result<(Dataset, PruneReport)> {
    if !(ratio > 0.0 && ratio.is_finite()) {
        return Err(Error::Ingest(format!("prune ratio must be positive, got {ratio}")));
    }
    let threshold = ratio * dataset.len() as f64;
    let mut entries = Vec::with_capacity(dataset.num_attributes());
    let mut keep = Vec::new();
    for (i, attr) in dataset.attributes.iter().enumerate() {
        let mut seen = vec![false; attr.cardinality()];
        for inst in &dataset.instances {
            seen[inst.values[i]] = true;
        }
        let distinct = seen.iter().filter(|&&s| s).count();
        let removed = distinct as f64 >= threshold;
        if !removed {
            keep.push(i);
        }
        entries.push(PruneEntry {
            name: attr.name.clone(),
            distinct,
            removed,
        });
    }
    if keep.is_empty() && dataset.num_attributes() > 0 {
        return Err(Error::Ingest(format!(
            "every attribute has at least {threshold} distinct values; nothing left after pruning"
        )));
    }
    let attributes = keep.iter().map(|&i| dataset.attributes[i].clone()).collect();
    let instances = dataset
        .instances
        .iter()
        .map(|inst| Instance {
            values: keep.iter().map(|&i| inst.values[i]).collect(),
            label: inst.label,
        })
        .collect();
    let pruned = Dataset::try_new(attributes, dataset.classes.clone(), instances)?;
    Ok((
        pruned,
        PruneReport {
            ratio,
            threshold,
            attributes: entries,
        },
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PreprocessOptions {
    pub bins: usize,
    pub prune_ratio: f64,
}

impl Default for PreprocessOptions {
    fn default() -> Self {
        Self {
            bins: DEFAULT_BINS,
            prune_ratio: DEFAULT_PRUNE_RATIO,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "kebab-case")]
pub enum Action {
    Kept,
    Discretized { edges: Vec<f64> },
    Removed { distinct: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeReport {
    pub name: String,
    /// `nominal` or `numeric`.
    pub source_type: String,
    pub missing: usize,
    pub fill: Option<Fill>,
    #[serde(flatten)]
    pub action: Action,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreprocessReport {
    pub relation: String,
    pub instances: usize,
    pub class: String,
    pub class_labels: Vec<String>,
    pub bins: usize,
    pub prune_ratio: f64,
    pub attributes: Vec<AttributeReport>,
}

impl PreprocessReport {
    pub fn removed(&self) -> Vec<&str> {
        self.attributes
            .iter()
            .filter(|a| matches!(a.action, Action::Removed { .. }))
            .map(|a| a.name.as_str())
            .collect()
    }
}

/// Replace missing values, discretize, then prune near-unique attributes.
pub fn preprocess(raw: &RawDataset, options: &PreprocessOptions) -> Result<(Dataset, PreprocessReport)> {
    raw.check_class()?;
    let fills = missing_fills(raw)?;
    let filled = replace_missing(raw)?;
    let (binned, binning) = discretize_with_bins(&filled, options.bins)?;
    let (pruned, prune) = prune_high_cardinality(&binned, options.prune_ratio)?;

    let attributes = raw
        .feature_indices()
        .into_iter()
        .zip(binning)
        .zip(prune.attributes)
        .map(|((c, eq), entry)| {
            let col = &raw.columns[c];
            let action = if entry.removed {
                Action::Removed {
                    distinct: entry.distinct,
                }
            } else if let Some(eq) = eq {
                Action::Discretized { edges: eq.edges() }
            } else {
                Action::Kept
            };
            AttributeReport {
                name: col.name.clone(),
                source_type: if col.is_numeric() { "numeric" } else { "nominal" }.into(),
                missing: raw.missing_count(c),
                fill: fills[c].clone(),
                action,
            }
        })
        .collect();
    let report = PreprocessReport {
        relation: raw.relation.clone(),
        instances: raw.num_rows(),
        class: raw.class_column().name.clone(),
        class_labels: pruned.classes.labels.clone(),
        bins: options.bins,
        prune_ratio: options.prune_ratio,
        attributes,
    };
    Ok((pruned, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arff::parse_arff;
    use crate::raw::Column;

    fn table(columns: Vec<Column>, rows: Vec<Vec<Cell>>) -> RawDataset {
        RawDataset {
            relation: "t".into(),
            class_index: columns.len() - 1,
            columns,
            rows,
        }
    }

    fn class_col(n: usize) -> Column {
        Column::nominal("class", (0..n).map(|i| format!("c{i}")).collect())
    }

    #[test]
    fn numeric_mean_fill() {
        let raw = table(
            vec![Column::numeric("a"), class_col(1)],
            vec![
                vec![Cell::Numeric(1.0), Cell::Nominal(0)],
                vec![Cell::Missing, Cell::Nominal(0)],
                vec![Cell::Numeric(3.0), Cell::Nominal(0)],
            ],
        );
        let out = replace_missing(&raw).unwrap();
        assert_eq!(out.rows[1][0], Cell::Numeric(2.0));
        assert_eq!(replace_missing(&out).unwrap(), out);
    }

    #[test]
    fn nominal_mode_fill_and_tie() {
        let x = |v| vec![v, Cell::Nominal(0)];
        let col = Column::nominal("a", vec!["x".into(), "y".into()]);
        let raw = table(
            vec![col.clone(), class_col(1)],
            vec![x(Cell::Nominal(0)), x(Cell::Nominal(0)), x(Cell::Missing), x(Cell::Nominal(1))],
        );
        assert_eq!(replace_missing(&raw).unwrap().rows[2][0], Cell::Nominal(0));

        let tied = table(
            vec![col, class_col(1)],
            vec![x(Cell::Nominal(1)), x(Cell::Missing), x(Cell::Nominal(0))],
        );
        assert_eq!(missing_fills(&tied).unwrap()[0], Some(Fill::Mode("x".into())));
        assert_eq!(replace_missing(&tied).unwrap().rows[1][0], Cell::Nominal(0));
    }

    #[test]
    fn entirely_missing_column_is_an_error() {
        let raw = table(
            vec![Column::numeric("a"), class_col(1)],
            vec![vec![Cell::Missing, Cell::Nominal(0)]],
        );
        assert!(matches!(replace_missing(&raw), Err(Error::Ingest(_))));
    }

    #[test]
    fn equal_width_bins() {
        let eq = EqualWidth::fit([0.0, 10.0], 10).unwrap();
        assert_eq!(eq.bin(3.7), 3);
        assert_eq!(eq.bin(10.0), 9);
        assert_eq!(eq.bin(0.0), 0);
        assert_eq!(eq.bin(-1.0), 0);
        assert_eq!(eq.edges().len(), 11);
        assert_eq!(eq.labels()[9], "[9,10]");
        let flat = EqualWidth::fit([4.0, 4.0], 10).unwrap();
        assert_eq!((flat.cardinality(), flat.bin(4.0)), (1, 0));
    }

    #[test]
    fn constant_column_becomes_single_value() {
        let raw = table(
            vec![Column::numeric("k"), Column::numeric("v"), class_col(2)],
            (0..4)
                .map(|j| vec![Cell::Numeric(7.0), Cell::Numeric(j as f64), Cell::Nominal(j % 2)])
                .collect(),
        );
        let ds = discretize(&raw, 10).unwrap();
        assert_eq!(ds.attributes[0].cardinality(), 1);
        assert_eq!(ds.attributes[1].cardinality(), 10);
        assert_eq!(ds.instances.iter().map(|i| i.values[1]).collect::<Vec<_>>(), vec![0, 3, 6, 9]);
        assert_eq!(ds.len(), 4);
        assert_eq!(ds.instances.iter().map(|i| i.label).collect::<Vec<_>>(), vec![Some(0), Some(1), Some(0), Some(1)]);
    }

    #[test]
    fn discretize_refuses_missing() {
        let raw = table(
            vec![Column::numeric("a"), class_col(1)],
            vec![vec![Cell::Missing, Cell::Nominal(0)], vec![Cell::Numeric(1.0), Cell::Nominal(0)]],
        );
        assert!(discretize(&raw, 10).is_err());
    }

    fn nominal_dataset(cards: &[usize], values: &[Vec<usize>]) -> Dataset {
        Dataset::try_new(
            cards
                .iter()
                .enumerate()
                .map(|(i, &q)| AttributeSchema::new(format!("a{i}"), (0..q).map(|v| v.to_string())))
                .collect(),
            ClassSchema::new(["p", "q"]),
            values.iter().enumerate().map(|(j, v)| Instance::labeled(v.clone(), j % 2)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn pruning_rules() {
        let rows: Vec<Vec<usize>> = (0..100).map(|j| vec![j, j % 2, j.min(95)]).collect();
        let ds = nominal_dataset(&[100, 2, 96], &rows);
        let (pruned, report) = prune_high_cardinality(&ds, 0.95).unwrap();
        let removed: Vec<bool> = report.attributes.iter().map(|e| e.removed).collect();
        assert_eq!(removed, vec![true, false, true]);
        assert_eq!(report.attributes[2].distinct, 96);
        assert_eq!(pruned.num_attributes(), 1);
        assert_eq!(pruned.attributes[0].name, "a1");

        let ids: Vec<Vec<usize>> = (0..10).map(|j| vec![j]).collect();
        assert!(matches!(
            prune_high_cardinality(&nominal_dataset(&[10], &ids), 0.95),
            Err(Error::Ingest(_))
        ));
    }

    #[test]
    fn pipeline_on_small_arff() {
        let text = "@relation r\n@attribute id {a,b,c,d}\n@attribute x numeric\n@attribute k {u,v}\n@attribute class {p,q}\n@data\na,1,u,p\nb,1,?,q\nc,?,v,p\nd,4,u,q\n";
        let raw = parse_arff(text).unwrap();
        let (ds, report) = preprocess(&raw, &PreprocessOptions::default()).unwrap();
        assert_eq!(report.removed(), vec!["id"]);
        assert_eq!(ds.num_attributes(), 2);
        assert!(lcwnb_core::validate(&ds).is_ok());
        assert_eq!(report.attributes[1].fill, Some(Fill::Mean(2.0)));
        assert!(matches!(report.attributes[1].action, Action::Discretized { .. }));
        assert_eq!(report.attributes[2].fill, Some(Fill::Mode("u".into())));
        assert_eq!(report.attributes[2].action, Action::Kept);
        assert_eq!(report.attributes.len(), 3);
    }
}
