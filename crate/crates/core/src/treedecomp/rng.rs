/// 64-bit linear congruential generator (Knuth's MMIX constants).
///
/// Fixed here rather than taken from a crate so that tie-breaking, and
/// with it every decomposition, is reproducible from the seed alone.
#[derive(Clone, Debug)]
pub struct Lcg {
    state: u64,
}

const MUL: u64 = 6364136223846793005;
const INC: u64 = 1442695040888963407;

impl Lcg {
    pub fn new(seed: u64) -> Self {
        let mut g = Lcg { state: 0 };
        g.step();
        g.state = g.state.wrapping_add(seed);
        g.step();
        g
    }

    fn step(&mut self) {
        self.state = self.state.wrapping_mul(MUL).wrapping_add(INC);
    }

    /// Next 31-bit output (the high bits of the state).
    pub fn next_u32(&mut self) -> u32 {
        let out = (self.state >> 33) as u32;
        self.step();
        out
    }

    /// Uniform-ish index in `0..n`.
    ///
    /// # Panics
    /// If `n == 0`.
    pub fn below(&mut self, n: usize) -> usize {
        assert!(n > 0, "empty range");
        self.next_u32() as usize % n
    }
}

/// Derives the per-rule seed; rule 0 sees the seed unchanged.
pub fn rule_seed(seed: i64, rule_index: usize) -> u64 {
    (seed as u64) ^ (rule_index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}
