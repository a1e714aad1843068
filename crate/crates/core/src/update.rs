/// One alarm update. Slots are counted from the start of the run.
///
/// `delivery_slot` is the slot boundary at which the CAP holds the update,
/// i.e. one past the slot of the successful transmission, so an update sent
/// successfully in the slot it was generated has delay 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Update {
    pub generation_slot: u64,
    pub delivery_slot: Option<u64>,
}

impl Update {
    pub fn new(generation_slot: u64) -> Self {
        Self {
            generation_slot,
            delivery_slot: None,
        }
    }

    pub fn deliver(&mut self, slot: u64) {
        debug_assert!(slot >= self.generation_slot);
        self.delivery_slot = Some(slot);
    }

    pub fn delay(&self) -> Option<u64> {
        self.delivery_slot.map(|d| d - self.generation_slot)
    }

    /// Delivered within the deadline (inclusive).
    pub fn is_timely(&self, deadline: u32) -> bool {
        self.delay().is_some_and(|t| t <= u64::from(deadline))
    }

    /// Last slot in which a successful transmission still meets the deadline.
    pub fn last_useful_slot(&self, deadline: u32) -> u64 {
        self.generation_slot + u64::from(deadline) - 1
    }
}
