//! Strictly increasing multi-indices as bitmasks, with the orientation signs
//! of exterior algebra.
//!
//! A subset I ⊆ {0, …, n−1} is stored as a `u32` bitmask; the form component
//! dz^I means dz^{i₁} ∧ … ∧ dz^{i_p} with i₁ < … < i_p (ascending bit order).
//! Since n ≤ 2 here, every sign can be computed directly from popcounts; the
//! formulas below are valid for any n.

/// All masks over `n` slots with exactly `weight` bits, in ascending numeric
/// order — the canonical component ordering for form storage.
pub fn masks(n: usize, weight: usize) -> Vec<u32> {
    (0u32..(1 << n))
        .filter(|m| m.count_ones() as usize == weight)
        .collect()
}

/// Position of `mask` within `masks(n, popcount(mask))`.
pub fn rank(n: usize, mask: u32) -> usize {
    masks(n, mask.count_ones() as usize)
        .iter()
        .position(|&m| m == mask)
        .expect("mask out of range")
}

/// Binomial coefficient C(n, k) — component counts for (p, q)-forms.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut num = 1usize;
    let mut den = 1usize;
    for i in 0..k.min(n - k) {
        num *= n - i;
        den *= i + 1;
    }
    num / den
}

/// Sign (−1)^{inversions} of sorting the concatenation dz^A ∧ dz^B into
/// ascending order; `None` when the factors overlap (the product vanishes).
///
/// The inversion count is #{(x, y) : x ∈ A, y ∈ B, x > y}.
pub fn merge_sign(a: u32, b: u32) -> Option<f64> {
    if a & b != 0 {
        return None;
    }
    let mut inversions = 0u32;
    let mut bits = b;
    while bits != 0 {
        let y = bits.trailing_zeros();
        inversions += (a >> (y + 1)).count_ones();
        bits &= bits - 1;
    }
    Some(if inversions % 2 == 0 { 1.0 } else { -1.0 })
}

/// Sign (−1)^{#{j ∈ mask : j < i}} of removing (or inserting) the single
/// factor `i` at the front: ι_{∂_i} dz^{mask} = sign · dz^{mask∖i} for
/// i ∈ mask, and dz^i ∧ dz^{mask} = sign · dz^{mask∪i} for i ∉ mask.
pub fn slot_sign(i: usize, mask: u32) -> f64 {
    let below = (mask & ((1u32 << i) - 1)).count_ones();
    if below % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Iterator over the set bits of a mask (ascending).
pub fn bits(mask: u32) -> impl Iterator<Item = usize> {
    (0..32).filter(move |i| mask & (1 << i) != 0)
}
