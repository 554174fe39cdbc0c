use super::field::ComplexField;
use super::grid::TorusGrid;
use crate::error::{domain, Result};
use crate::real::Real;

/// Fields sampled at strictly increasing times on one grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SpaceTimeSeries<R> {
    times: Vec<R>,
    fields: Vec<ComplexField<R>>,
}

impl<R: Real> SpaceTimeSeries<R> {
    pub fn new(times: Vec<R>, fields: Vec<ComplexField<R>>) -> Result<Self> {
        if times.len() != fields.len() {
            return domain(format!("{} times for {} fields", times.len(), fields.len()));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return domain("series times must be strictly increasing");
        }
        if let Some(first) = fields.first() {
            for f in &fields[1..] {
                first.grid().ensure_same(f.grid(), "space-time series")?;
            }
        }
        Ok(Self { times, fields })
    }

    pub fn empty() -> Self {
        Self {
            times: Vec::new(),
            fields: Vec::new(),
        }
    }

    /// Appends a snapshot; `time` must exceed the last stored time.
    pub fn push(&mut self, time: R, field: ComplexField<R>) -> Result<()> {
        if let Some(&last) = self.times.last() {
            if !(time > last) {
                return domain("series times must be strictly increasing");
            }
            self.fields[0]
                .grid()
                .ensure_same(field.grid(), "space-time series")?;
        }
        self.times.push(time);
        self.fields.push(field);
        Ok(())
    }

    pub fn times(&self) -> &[R] {
        &self.times
    }

    pub fn fields(&self) -> &[ComplexField<R>] {
        &self.fields
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn grid(&self) -> Option<&TorusGrid<R>> {
        self.fields.first().map(|f| f.grid())
    }

    pub fn last(&self) -> Option<&ComplexField<R>> {
        self.fields.last()
    }

    /// Applies `f` to every snapshot, keeping the times.
    pub fn map_fields(&self, f: impl Fn(&ComplexField<R>) -> ComplexField<R>) -> Self {
        Self {
            times: self.times.clone(),
            fields: self.fields.iter().map(f).collect(),
        }
    }

    /// Snapshot-wise `self - other`; both series must share their times.
    pub fn difference(&self, other: &Self) -> Result<Self> {
        if self.times != other.times {
            return domain("series differences need identical sample times");
        }
        let fields = self
            .fields
            .iter()
            .zip(&other.fields)
            .map(|(a, b)| a.sub(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            times: self.times.clone(),
            fields,
        })
    }

    pub fn into_parts(self) -> (Vec<R>, Vec<ComplexField<R>>) {
        (self.times, self.fields)
    }
}
