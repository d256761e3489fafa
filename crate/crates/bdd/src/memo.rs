/// Per-operation memo table indexed by node, reused across operations.
///
/// Entries are tagged with the epoch of the operation that wrote them, so
/// starting a new operation costs nothing.
#[derive(Debug, Default)]
pub(crate) struct DenseMemo {
    epoch: u32,
    /// (epoch, value) per node index.
    slots: Vec<(u32, u32)>,
}

impl DenseMemo {
    /// Starts a new operation over nodes `0..len`.
    pub(crate) fn begin(&mut self, len: usize) {
        if self.slots.len() < len {
            self.slots.resize(len, (0, 0));
        }
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.slots.fill((0, 0));
            self.epoch = 1;
        }
    }

    #[inline]
    pub(crate) fn get(&self, idx: u32) -> Option<u32> {
        match self.slots.get(idx as usize) {
            Some(&(e, v)) if e == self.epoch => Some(v),
            _ => None,
        }
    }

    #[inline]
    pub(crate) fn set(&mut self, idx: u32, value: u32) {
        if let Some(slot) = self.slots.get_mut(idx as usize) {
            *slot = (self.epoch, value);
        }
    }
}
