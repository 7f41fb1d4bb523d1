//! Resource limits shared by the generation engines.

/// Limits for one engine run.
///
/// All three fields must be positive. Hitting `depth` is the normal way a
/// run ends; hitting `max_elements` or `fuel` truncates the run, which the
/// engines report through their `stabilized`/`complete` flags rather than
/// as an error (a truncated closure is still a postfixpoint, so partial
/// results are meaningful).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Budget {
    /// Chain rounds (or tree height) to run to.
    pub depth: usize,
    /// Cap on distinct generated elements.
    pub max_elements: usize,
    /// Cap on candidate evaluations (tuple enumerations, rule firings).
    pub fuel: u64,
}

impl Budget {
    pub fn new(depth: usize, max_elements: usize, fuel: u64) -> Budget {
        assert!(depth > 0, "budget depth must be positive");
        assert!(max_elements > 0, "budget element cap must be positive");
        assert!(fuel > 0, "budget fuel must be positive");
        Budget {
            depth,
            max_elements,
            fuel,
        }
    }

    /// A budget that limits only the depth, with roomy default caps.
    pub fn depth(depth: usize) -> Budget {
        Budget::new(depth, 2_000_000, 100_000_000)
    }
}
