use std::fmt;

use super::{FactKey, ModelError, QualityModel, Result, Sign};

/// Aggregated sign of all atomic impacts below an (entity, activity) pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LiftedSign {
    None,
    Positive,
    Negative,
    Mixed,
}

impl LiftedSign {
    pub fn symbol(self) -> &'static str {
        match self {
            LiftedSign::None => "0",
            LiftedSign::Positive => "+",
            LiftedSign::Negative => "-",
            LiftedSign::Mixed => "*",
        }
    }

    /// Joins one more atomic sign into the aggregate.
    pub fn join(self, sign: Sign) -> LiftedSign {
        match (self, sign) {
            (LiftedSign::None, Sign::Positive) | (LiftedSign::Positive, Sign::Positive) => {
                LiftedSign::Positive
            }
            (LiftedSign::None, Sign::Negative) | (LiftedSign::Negative, Sign::Negative) => {
                LiftedSign::Negative
            }
            _ => LiftedSign::Mixed,
        }
    }
}

impl fmt::Display for LiftedSign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LiftedSign::None => "NONE",
            LiftedSign::Positive => "POSITIVE",
            LiftedSign::Negative => "NEGATIVE",
            LiftedSign::Mixed => "MIXED",
        })
    }
}

/// Atomic facts by atomic activities. Rows follow the depth-first entity
/// order (attributes sorted within an entity), columns the depth-first
/// activity order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImpactMatrix {
    pub rows: Vec<FactKey>,
    pub columns: Vec<String>,
    cells: Vec<Option<Sign>>,
}

impl ImpactMatrix {
    pub fn cell(&self, row: usize, column: usize) -> Option<Sign> {
        self.cells[row * self.columns.len() + column]
    }

    pub fn get(&self, fact: &FactKey, activity: &str) -> Option<Sign> {
        let r = self.rows.iter().position(|f| f == fact)?;
        let c = self.columns.iter().position(|a| a == activity)?;
        self.cell(r, c)
    }

    pub fn row(&self, fact: &FactKey) -> Option<&[Option<Sign>]> {
        let r = self.rows.iter().position(|f| f == fact)?;
        let w = self.columns.len();
        Some(&self.cells[r * w..(r + 1) * w])
    }

    pub fn nonzero_count(&self) -> usize {
        self.cells.iter().filter(|c| c.is_some()).count()
    }

    /// Text rendering: a numbered column legend followed by one row per
    /// atomic fact with `+`, `-` or `0` per column.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, col) in self.columns.iter().enumerate() {
            out.push_str(&format!("A{:<3} {}\n", i + 1, col));
        }
        if !self.columns.is_empty() {
            out.push('\n');
        }
        let labels: Vec<String> = self.rows.iter().map(|f| f.to_string()).collect();
        let width = labels.iter().map(|l| l.len()).max().unwrap_or(0);
        let header: Vec<String> = (1..=self.columns.len()).map(|i| format!("A{i}")).collect();
        out.push_str(&format!("{:width$}", "", width = width));
        for h in &header {
            out.push_str(&format!(" {h:>4}"));
        }
        out.push('\n');
        for (r, label) in labels.iter().enumerate() {
            out.push_str(&format!("{label:width$}"));
            for c in 0..self.columns.len() {
                let sym = self.cell(r, c).map(Sign::symbol).unwrap_or("0");
                out.push_str(&format!(" {sym:>4}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Lifted signs between two lists of (usually non-atomic) nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftedMatrix {
    pub rows: Vec<String>,
    pub columns: Vec<String>,
    pub cells: Vec<Vec<LiftedSign>>,
}

impl LiftedMatrix {
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, col) in self.columns.iter().enumerate() {
            out.push_str(&format!("T{:<3} {}\n", i + 1, col));
        }
        if !self.columns.is_empty() {
            out.push('\n');
        }
        let width = self.rows.iter().map(|l| l.len()).max().unwrap_or(0);
        out.push_str(&format!("{:width$}", "", width = width));
        for i in 1..=self.columns.len() {
            out.push_str(&format!(" {:>4}", format!("T{i}")));
        }
        out.push('\n');
        for (row, cells) in self.rows.iter().zip(&self.cells) {
            out.push_str(&format!("{row:width$}"));
            for cell in cells {
                out.push_str(&format!(" {:>4}", cell.symbol()));
            }
            out.push('\n');
        }
        out
    }
}

impl QualityModel {
    /// The atomic maintainability matrix.
    pub fn impact_matrix(&self) -> ImpactMatrix {
        let mut rows = Vec::new();
        for node in self.entities().atomic_nodes() {
            // facts map is sorted by (entity, attribute)
            rows.extend(
                self.facts()
                    .filter(|f| f.key.entity == node.path())
                    .map(|f| f.key.clone()),
            );
        }
        let columns: Vec<String> = self
            .activities()
            .atomic_nodes()
            .iter()
            .map(|n| n.path().to_string())
            .collect();
        let mut cells = vec![None; rows.len() * columns.len()];
        for (r, fact) in rows.iter().enumerate() {
            for impact in self.impacts_of(fact) {
                if let Some(c) = columns.iter().position(|a| a == impact.activity()) {
                    cells[r * columns.len() + c] = Some(impact.sign);
                }
            }
        }
        ImpactMatrix {
            rows,
            columns,
            cells,
        }
    }

    /// Aggregates the impacts of all atomic facts below `entity` onto all
    /// atomic activities below `activity`. Both paths may be at any level.
    pub fn lift_impact(&self, entity: &str, activity: &str) -> Result<LiftedSign> {
        if !self.entities().contains(entity) {
            return Err(ModelError::UnknownEntity(entity.to_string()));
        }
        if !self.activities().contains(activity) {
            return Err(ModelError::UnknownActivity(activity.to_string()));
        }
        Ok(self
            .impacts()
            .filter(|i| {
                self.entities().is_within(&i.key.fact.entity, entity)
                    && self.activities().is_within(i.activity(), activity)
            })
            .fold(LiftedSign::None, |acc, i| acc.join(i.sign)))
    }

    pub fn lifted_matrix(&self, entities: &[String], activities: &[String]) -> Result<LiftedMatrix> {
        let mut cells = Vec::with_capacity(entities.len());
        for e in entities {
            let mut row = Vec::with_capacity(activities.len());
            for a in activities {
                row.push(self.lift_impact(e, a)?);
            }
            cells.push(row);
        }
        Ok(LiftedMatrix {
            rows: entities.to_vec(),
            columns: activities.to_vec(),
            cells,
        })
    }

    /// Children of the entity root by children of the activity root.
    pub fn top_level_lifted_matrix(&self) -> LiftedMatrix {
        let entities: Vec<String> = self
            .entities()
            .root()
            .children()
            .map(|n| n.path().to_string())
            .collect();
        let activities: Vec<String> = self
            .activities()
            .root()
            .children()
            .map(|n| n.path().to_string())
            .collect();
        self.lifted_matrix(&entities, &activities)
            .expect("top-level paths exist")
    }
}
