use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};

use crate::lang::Var;

/// Fresh variable names `1`, `2`, ... in creation order, skipping names
/// already taken by the goal.
#[derive(Debug, Clone, Default)]
pub struct NameGen {
    next: u32,
    taken: BTreeSet<String>,
}

impl NameGen {
    pub fn avoiding(vars: impl IntoIterator<Item = Var>) -> Self {
        NameGen { next: 0, taken: vars.into_iter().map(|v| v.name).collect() }
    }

    fn fresh(&mut self) -> String {
        loop {
            self.next += 1;
            let n = self.next.to_string();
            if !self.taken.contains(&n) {
                return n;
            }
        }
    }

    pub fn svar(&mut self) -> Var {
        let n = self.fresh();
        Var::s(&n)
    }

    pub fn evar(&mut self) -> Var {
        let n = self.fresh();
        Var::e(&n)
    }
}
