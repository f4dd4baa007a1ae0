use serde::Serialize;

/// Outcome of a batch of identity checks.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub checked: usize,
    pub failures: Vec<String>,
}

/// Failures kept verbatim before the list is truncated.
const KEEP: usize = 20;

impl Verdict {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn record(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.fail(msg());
        }
    }

    pub fn fail(&mut self, msg: String) {
        if self.failures.len() < KEEP {
            self.failures.push(msg);
        } else if self.failures.len() == KEEP {
            self.failures.push("…further failures omitted".into());
        }
    }

    pub fn merge(&mut self, other: Verdict) {
        self.checked += other.checked;
        for f in other.failures {
            self.fail(f);
        }
    }
}
