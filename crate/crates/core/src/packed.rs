//! Small nonnegative integer vectors packed four bits per coordinate into a
//! `u128`, so that adding vectors is one machine addition.

pub(crate) type Packed = u128;

/// Coordinates that fit in one `u128` at four bits each, leaving the top
/// bit free for a flag.
pub(crate) const MAX_PACKED_ATOMS: usize = 31;

pub(crate) const FLAG: Packed = 1 << 127;

/// One unit in every coordinate whose bit is set in `mask`.
pub(crate) fn spread(mask: u64) -> Packed {
    let mut out = 0u128;
    let mut m = mask;
    while m != 0 {
        let i = m.trailing_zeros();
        out |= 1u128 << (4 * i);
        m &= m - 1;
    }
    out
}

/// `0x8` in every coordinate below `n`.
pub(crate) fn high_bits(n: usize) -> Packed {
    spread(crate::subset::full_mask(n)) * 8
}

/// Coordinatewise `d ≤ c`, for coordinates at most 7.
pub(crate) fn dominated(d: Packed, c: Packed, high: Packed) -> bool {
    ((c | high) - d) & high == high
}

pub(crate) fn nibble(p: Packed, i: usize) -> u32 {
    ((p >> (4 * i)) & 0xf) as u32
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dominance_is_coordinatewise() {
        let h = high_bits(3);
        let a = spread(0b101) * 2 + spread(0b010);
        let b = spread(0b111) * 2;
        assert!(dominated(a, b, h));
        assert!(!dominated(b, a, h));
        assert!(dominated(a, a, h));
        assert_eq!(nibble(a, 1), 1);
    }
}
