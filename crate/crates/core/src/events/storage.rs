use crate::error::{Error, Result};

/// Ragged array of variable-length lists stored as one flat buffer plus
/// list-start offsets.
///
/// List `i` occupies `flat[offsets[i]..offsets[i + 1]]`.
#[derive(Clone, Debug, PartialEq)]
pub struct EventStorage<T> {
    offsets: Vec<usize>,
    flat: Vec<T>,
}

impl<T> Default for EventStorage<T> {
    fn default() -> Self {
        EventStorage { offsets: vec![0], flat: Vec::new() }
    }
}

impl<T> EventStorage<T> {
    pub fn from_parts(offsets: Vec<usize>, flat: Vec<T>) -> Result<Self> {
        validate_offsets(&offsets, flat.len())?;
        Ok(EventStorage { offsets, flat })
    }

    pub fn from_lists<I, L>(lists: I) -> Self
    where
        I: IntoIterator<Item = L>,
        L: IntoIterator<Item = T>,
    {
        let mut offsets = vec![0];
        let mut flat = Vec::new();
        for list in lists {
            flat.extend(list);
            offsets.push(flat.len());
        }
        EventStorage { offsets, flat }
    }

    /// Number of lists.
    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn total_events(&self) -> usize {
        self.flat.len()
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn flat(&self) -> &[T] {
        &self.flat
    }

    pub fn flat_mut(&mut self) -> &mut [T] {
        &mut self.flat
    }

    pub fn list(&self, i: usize) -> &[T] {
        &self.flat[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn list_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.flat[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn list_len(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn lists(&self) -> impl Iterator<Item = &[T]> + '_ {
        self.offsets.windows(2).map(|w| &self.flat[w[0]..w[1]])
    }

    pub fn lengths(&self) -> impl Iterator<Item = usize> + '_ {
        self.offsets.windows(2).map(|w| w[1] - w[0])
    }

    pub fn into_parts(self) -> (Vec<usize>, Vec<T>) {
        (self.offsets, self.flat)
    }

    /// Re-checks the offset invariants.
    pub fn validate(&self) -> Result<()> {
        validate_offsets(&self.offsets, self.flat.len())
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> EventStorage<U> {
        EventStorage { offsets: self.offsets.clone(), flat: self.flat.iter().map(f).collect() }
    }
}

impl<T: Clone> EventStorage<T> {
    /// Gathers lists by index into a new storage.
    pub fn gather(&self, indices: impl IntoIterator<Item = usize>) -> Self {
        EventStorage::from_lists(indices.into_iter().map(|i| self.list(i).iter().cloned()))
    }
}

/// Incremental builder appending one list at a time.
#[derive(Debug)]
pub struct EventBuilder<T> {
    offsets: Vec<usize>,
    flat: Vec<T>,
}

impl<T> EventBuilder<T> {
    pub fn with_capacity(lists: usize, events: usize) -> Self {
        let mut offsets = Vec::with_capacity(lists + 1);
        offsets.push(0);
        EventBuilder { offsets, flat: Vec::with_capacity(events) }
    }

    pub fn push_event(&mut self, value: T) {
        self.flat.push(value);
    }

    pub fn extend_current(&mut self, values: impl IntoIterator<Item = T>) {
        self.flat.extend(values);
    }

    pub fn finish_list(&mut self) {
        self.offsets.push(self.flat.len());
    }

    pub fn build(self) -> EventStorage<T> {
        EventStorage { offsets: self.offsets, flat: self.flat }
    }
}

fn validate_offsets(offsets: &[usize], flat_len: usize) -> Result<()> {
    match offsets.first() {
        None => return Err(Error::Validation("event offsets are empty".into())),
        Some(&o) if o != 0 => {
            return Err(Error::Validation(format!("event offsets must start at 0, got {o}")))
        }
        _ => {}
    }
    if let Some(i) = offsets.windows(2).position(|w| w[1] < w[0]) {
        return Err(Error::Validation(format!(
            "event offsets decrease at position {}: {} -> {}",
            i + 1,
            offsets[i],
            offsets[i + 1]
        )));
    }
    let last = *offsets.last().unwrap();
    if last != flat_len {
        return Err(Error::Validation(format!(
            "last event offset {last} does not match {flat_len} stored events"
        )));
    }
    Ok(())
}
