use serde::{Deserialize, Serialize};

/// A value together with a "degenerate input" flag. Operations whose input
/// hits an undefined case (zero range, zero denominator, rank deficit) still
/// return a defined value and raise the flag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Flagged<T> {
    pub value: T,
    pub degenerate: bool,
}

impl<T> Flagged<T> {
    pub fn new(value: T, degenerate: bool) -> Self {
        Self { value, degenerate }
    }

    pub fn clean(value: T) -> Self {
        Self { value, degenerate: false }
    }
}
