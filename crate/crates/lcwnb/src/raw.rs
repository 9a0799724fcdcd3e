//! Typed, possibly incomplete tables as read from ARFF or CSV.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum ColumnType {
    /// Declared values in declaration order.
    Nominal(Vec<String>),
    Numeric,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub kind: ColumnType,
}

impl Column {
    pub fn nominal(name: impl Into<String>, domain: Vec<String>) -> Self {
        Self {
            name: name.into(),
            kind: ColumnType::Nominal(domain),
        }
    }

    pub fn numeric(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            kind: ColumnType::Numeric,
        }
    }

    pub fn domain(&self) -> Option<&[String]> {
        match &self.kind {
            ColumnType::Nominal(d) => Some(d),
            ColumnType::Numeric => None,
        }
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self.kind, ColumnType::Numeric)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Missing,
    /// Index into the column's declared domain.
    Nominal(usize),
    Numeric(f64),
}

/// Columns (features and class together) and rows of cells. The class is
/// one of the columns, by default the last.
#[derive(Debug, Clone, PartialEq)]
pub struct RawDataset {
    pub relation: String,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
    pub class_index: usize,
}

impl RawDataset {
    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn class_column(&self) -> &Column {
        &self.columns[self.class_index]
    }

    /// Column indices other than the class, in file order.
    pub fn feature_indices(&self) -> Vec<usize> {
        (0..self.columns.len()).filter(|&c| c != self.class_index).collect()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    /// Selects the class by name, or by 0-based index when `spec` is a
    /// number that is not also a column name.
    pub fn set_class(&mut self, spec: &str) -> Result<()> {
        let idx = self
            .column_index(spec)
            .or_else(|| spec.parse::<usize>().ok().filter(|&i| i < self.columns.len()))
            .ok_or_else(|| Error::Ingest(format!("no class column `{spec}`")))?;
        self.class_index = idx;
        self.check_class()
    }

    pub fn missing_count(&self, column: usize) -> usize {
        self.rows.iter().filter(|r| r[column] == Cell::Missing).count()
    }

    /// The class column must be nominal and complete.
    pub fn check_class(&self) -> Result<()> {
        let class = self.class_column();
        if class.is_numeric() {
            return Err(Error::Ingest(format!("class attribute `{}` is numeric", class.name)));
        }
        let missing = self.missing_count(self.class_index);
        if missing > 0 {
            return Err(Error::Ingest(format!(
                "class attribute `{}` has {missing} missing value(s)",
                class.name
            )));
        }
        Ok(())
    }
}
